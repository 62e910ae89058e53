"""Labelled, seed-derived random streams.

A stream is identified by ``(master_seed, label)``. The pair is hashed into a
64-bit seed with FNV-1a (label) and a SplitMix64 finalizer, so identical pairs
always give identical sequences and different labels give unrelated ones.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def fnv1a64(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & _MASK
    return h


@dataclass(frozen=True)
class RngStream:
    master_seed: int
    label: str = ""

    def __post_init__(self):
        if not isinstance(self.master_seed, (int, np.integer)):
            raise TypeError("master_seed must be an integer")

    @property
    def derived_seed(self) -> int:
        seed = int(self.master_seed) & _MASK
        return splitmix64(splitmix64(seed) ^ fnv1a64(self.label))

    def child(self, sublabel: str) -> "RngStream":
        label = f"{self.label}/{sublabel}" if self.label else sublabel
        return RngStream(self.master_seed, label)

    def generator(self) -> np.random.Generator:
        """A fresh numpy Generator positioned at the start of this stream."""
        return np.random.Generator(np.random.PCG64(self.derived_seed))
