"""One-shot signatures over lazily sampled GF(2) coset oracles, with a
symbolic coset-state simulator, claw-free reductions and experiment harness."""

from .gf2 import BitMatrix, BitVec, Coset, Subspace
from .lazy_random import DeterministicRng, derive_seed, parse_seed
from .oracle_suite import OracleSuite, Params, reference_params, toy_params
from .oss import KeyPair, Signature, code_for, sign, siggen, strong_unforgeability_witness, verify

__all__ = [
    "BitMatrix", "BitVec", "Coset", "Subspace",
    "DeterministicRng", "derive_seed", "parse_seed",
    "OracleSuite", "Params", "reference_params", "toy_params",
    "KeyPair", "Signature", "code_for", "sign", "siggen", "strong_unforgeability_witness", "verify",
]
__version__ = "0.1.0"
