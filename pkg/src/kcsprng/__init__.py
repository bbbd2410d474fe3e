"""KCS-PRNG: alternating-step LFSR generator masked by rotating elliptic curves."""

from .curvestore import CurveTable, load_table, save_table, select_pair, verify_curve
from .ecc import PUBLISHED_CURVE_1, PUBLISHED_CURVE_2, CurveParams, Point, scalar_mul
from .generator import KcsPrng, OsEntropySource, Seed, SeedFileSource, boot
from .lfsr import GaloisLfsr, standard_registers
from .seqgen import SequenceGenerator, combiner, init_seqgen

__all__ = [
    "CurveParams", "CurveTable", "GaloisLfsr", "KcsPrng", "OsEntropySource", "PUBLISHED_CURVE_1",
    "PUBLISHED_CURVE_2", "Point", "Seed", "SeedFileSource", "SequenceGenerator", "boot",
    "combiner", "init_seqgen", "load_table", "save_table", "scalar_mul", "select_pair",
    "standard_registers", "verify_curve",
]
