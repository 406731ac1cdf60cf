# coarsedecomp/config.py

"""
config.py

Package-wide defaults and the RunConfig passed from the command line into
the library.

Classes:
    RunConfig: Immutable run settings (paths, seed, budgets, estimator levels).
"""

import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

BALL_CAP = 200_000
ENUMERATION_CAP = 1_000_000
SEARCH_BUDGET = 1_000_000
EXACT_SEARCH_PIECES = 24

TRIANGLE_FULL_CHECK_LIMIT = 300
TRIANGLE_SAMPLES = 10_000
DENSE_LIMIT = 6_000

SUBDIVISION_LEVEL = 3
CLIQUE_CAP = 12
POWER_TOLERANCE = 1e-9
POWER_MAX_ITERATIONS = 10_000

ORACLE_SAMPLES = 100_000
SAFETY_FACTOR = Fraction(11, 10)
MAX_CONSTANT_DIMENSION = 4

DEFAULT_SEED = 0
CACHE_ENV_VAR = "COARSE_DECOMP_CACHE"


def cache_dir():
    """
    Returns the subdivision-graph cache directory, or None when caching is off.

    Returns:
        Path or None: The directory named by ``COARSE_DECOMP_CACHE``.
    """
    value = os.environ.get(CACHE_ENV_VAR)
    if not value:
        return None
    path = Path(value)
    path.mkdir(parents=True, exist_ok=True)
    return path


@dataclass(frozen=True)
class RunConfig:
    """
    Settings for one command-line run.

    Attributes:
        command (str): Subcommand path, e.g. ``"decompose run"``.
        input_path (str): Primary input file, if any.
        output_path (str): Where the result is written; None means stdout.
        seed (int): Seed for every random choice in the run.
        budget (int): Cap on enumerations and searches.
        subdivision (int): Subdivision level L of the geodesic estimator.
        tolerance (float): Power-iteration tolerance for archimedean lengths.
        samples (int): Sample count for the dimension-constant oracle.
        workers (int): Thread count for independent verification tasks.
        timings (bool): Whether reports include runtimes.
    """

    command: str = ""
    input_path: str = None
    output_path: str = None
    seed: int = DEFAULT_SEED
    budget: int = ENUMERATION_CAP
    subdivision: int = SUBDIVISION_LEVEL
    tolerance: float = POWER_TOLERANCE
    samples: int = ORACLE_SAMPLES
    workers: int = 1
    timings: bool = False

    @classmethod
    def from_args(cls, args):
        """
        Builds a RunConfig from an argparse namespace.

        Args:
            args (argparse.Namespace): Parsed arguments; missing attributes
                fall back to the defaults.

        Returns:
            RunConfig: The run settings.
        """
        command = " ".join(
            part for part in (getattr(args, "command", None),
                              getattr(args, "action", None)) if part)
        return cls(
            command=command,
            input_path=getattr(args, "input", None),
            output_path=getattr(args, "out", None),
            seed=getattr(args, "seed", DEFAULT_SEED),
            budget=getattr(args, "budget", ENUMERATION_CAP),
            subdivision=getattr(args, "subdivision", SUBDIVISION_LEVEL),
            tolerance=getattr(args, "tolerance", POWER_TOLERANCE),
            samples=getattr(args, "samples", ORACLE_SAMPLES),
            workers=getattr(args, "workers", 1),
            timings=getattr(args, "timings", False),
        )

    def rng(self):
        """Returns a fresh numpy generator seeded from this config."""
        return np.random.default_rng(self.seed)
