"""Reproducible per-replica seeds.

``derive_replica_seed(master, i)`` is the splitmix64 finalizer applied to
``master XOR ((i + 1) * 0x9E3779B97F4A7C15 mod 2**64)``::

    z = master ^ (((i + 1) * 0x9E3779B97F4A7C15) & MASK)
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    z = z ^ (z >> 31)

with ``MASK = 2**64 - 1``. Every step is a bijection on 64-bit words, so for a
fixed master seed distinct replica indices (below 2**64) never collide.
"""

from __future__ import annotations

from .errors import DomainError

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


def derive_replica_seed(master_seed: int, replica_index: int) -> int:
    if isinstance(master_seed, bool) or not 0 <= int(master_seed) <= MASK:
        raise DomainError(f"master seed must be a 64-bit unsigned integer, got {master_seed!r}")
    if int(replica_index) < 0:
        raise DomainError(f"replica index must be >= 0, got {replica_index!r}")
    z = int(master_seed) ^ (((int(replica_index) + 1) * GOLDEN) & MASK)
    z = ((z ^ (z >> 30)) * MIX1) & MASK
    z = ((z ^ (z >> 27)) * MIX2) & MASK
    return z ^ (z >> 31)
