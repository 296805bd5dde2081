"""Rectangular PCP machinery at desk scale.

Bit-packed F2 linear algebra, PCP verifier property checkers
(rectangularity, smoothness, neighbor listing, randomness-oblivious
predicates), verifier transforms (smoothing, alphabet reduction,
parity-check conversion, composition), line-based query patterns with
neighbor-listing agents, and the low-rank counting pipeline that turns
accepted proofs into rigidity verdicts.
"""

from rectpcp.f2 import BitMatrix, BitVector, LinearCode

__all__ = ["BitMatrix", "BitVector", "LinearCode"]
__version__ = "0.1.0"
