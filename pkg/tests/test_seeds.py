import pytest
from hypothesis import given
from hypothesis import strategies as st

from varsig import derive_replica_seed
from varsig.errors import DomainError
from varsig.seeds import GOLDEN, MASK, MIX1, MIX2


def reference_seed(master, i):
    # Transcription of the documented recipe, kept separate from the package code.
    z = (master ^ ((i + 1) * GOLDEN)) % 2**64
    z = ((z ^ (z >> 30)) * MIX1) % 2**64
    z = ((z ^ (z >> 27)) * MIX2) % 2**64
    return z ^ (z >> 31)


def test_stable_values():
    assert derive_replica_seed(0, 0) == 0xE220A8397B1DCDAF
    assert derive_replica_seed(0, 1) == reference_seed(0, 1)
    assert derive_replica_seed(2**64 - 1, 7) == reference_seed(2**64 - 1, 7)


def test_no_collisions_between_adjacent_replicas():
    seen = set()
    for s in range(10_000):
        a, b = derive_replica_seed(s, 0), derive_replica_seed(s, 1)
        assert a != b
        seen.update((a, b))
    assert len(seen) == 20_000


@given(master=st.integers(0, MASK), i=st.integers(0, 10**6))
def test_matches_reference(master, i):
    out = derive_replica_seed(master, i)
    assert out == reference_seed(master, i)
    assert 0 <= out <= MASK


@given(master=st.integers(0, MASK), i=st.integers(0, 10**6), j=st.integers(0, 10**6))
def test_injective_in_index(master, i, j):
    assert (derive_replica_seed(master, i) == derive_replica_seed(master, j)) == (i == j)


@pytest.mark.parametrize("master,i", [(-1, 0), (2**64, 0), (True, 0), (0, -1)])
def test_rejects(master, i):
    with pytest.raises(DomainError):
        derive_replica_seed(master, i)
