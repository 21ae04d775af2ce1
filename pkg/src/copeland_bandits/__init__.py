"""Copeland dueling bandits: learners, analytics and a regret harness."""

from . import bounds, ccb, harness, klbandit, prefmat, rucb, scb
from ._kernels import backend_name
from .oracle import ComparisonOracle, RegretTrace, regret_of_pair
from .prefmat import (
    PreferenceMatrix,
    copeland_scores,
    copeland_winners,
    fixture,
    gap_summary,
    gen_cyclic_copeland,
    gen_random,
    scb_quantities,
)
from .rng import Xoshiro256pp, derive_seed

__all__ = [
    "ComparisonOracle",
    "PreferenceMatrix",
    "RegretTrace",
    "Xoshiro256pp",
    "backend_name",
    "bounds",
    "ccb",
    "copeland_scores",
    "copeland_winners",
    "derive_seed",
    "fixture",
    "gap_summary",
    "gen_cyclic_copeland",
    "gen_random",
    "harness",
    "klbandit",
    "prefmat",
    "regret_of_pair",
    "rucb",
    "scb",
    "scb_quantities",
]

__version__ = "0.1.0"
