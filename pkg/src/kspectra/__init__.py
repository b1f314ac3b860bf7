"""Kloosterman spectra, quadratic-form invariants, and zero-subspace searches over F_2^n."""

from kspectra.gf2n import FieldCtx, mk_field

__version__ = "0.1.0"

__all__ = ["FieldCtx", "mk_field", "__version__"]
