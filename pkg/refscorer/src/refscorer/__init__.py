"""Standalone encoder sidecar.

Implements the hashed baseline encoder arithmetic written down in
docs/encoder-baseline.md and serves it over the newline-delimited JSON
line protocol (stdio or TCP).  The package shares no code with the main
tracker; conformance rests on the document alone.
"""

from .encoder import HashedEncoder
from .hashing import derive_seed, fnv1a64, mix64, signed_unit_floats, stream64, unit_floats

__all__ = [
    "HashedEncoder",
    "derive_seed",
    "fnv1a64",
    "mix64",
    "signed_unit_floats",
    "stream64",
    "unit_floats",
]
