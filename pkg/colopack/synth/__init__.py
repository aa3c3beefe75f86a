"""Synthetic fleets, traces and clustering fixtures."""

from colopack.synth.blobs import blob_centers, blobs
from colopack.synth.generator import SyntheticFleet, first_fit, generate, write_synthetic

__all__ = [
    "SyntheticFleet",
    "blob_centers",
    "blobs",
    "first_fit",
    "generate",
    "write_synthetic",
]
