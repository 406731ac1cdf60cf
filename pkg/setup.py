from setuptools import setup, find_packages
from pathlib import Path

# Read the contents of README.md for the long description
this_directory = Path(__file__).parent
long_description = (this_directory / "README.md").read_text(encoding='utf-8')

setup(
    name='coarsedecomp',
    version='0.1.0',
    description='Checkable coarse-geometry certificates: decomposition games, '
                'property A witnesses and Rips complexes over finite metric spaces.',
    long_description=long_description,
    long_description_content_type='text/markdown',
    packages=find_packages(),
    include_package_data=True,
    package_data={
        'coarsedecomp.data': ['*.json'],
    },
    install_requires=[
        'networkx>=2.5',
        'numpy>=1.18.0',
    ],
    entry_points={
        'console_scripts': [
            'coarsedecomp=coarsedecomp.cli:main',
        ],
    },
    classifiers=[
        'Programming Language :: Python :: 3.9',
        'Operating System :: OS Independent',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
        'License :: OSI Approved :: MIT License',
    ],
    license='MIT',
    python_requires='>=3.9',
    keywords=[
        'Coarse Geometry',
        'Decomposition Complexity',
        'Property A',
        'Rips Complex',
        'Asymptotic Dimension',
    ],
    extras_require={
        'dev': [
            'pytest>=7.0.0',
            'pytest-mock>=3.11.1',
            'hypothesis>=6.0.0',
            'flake8>=6.0.0',
        ],
        'docs': [
            'sphinx>=4.0.0',
            'furo>=2021.8.14',
        ],
    },
)
