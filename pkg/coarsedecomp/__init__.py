# coarsedecomp/__init__.py

"""
coarsedecomp: checkable certificates for coarse geometry on finite metric spaces.
"""

__version__ = "0.1.0"
