import numpy as np
import pytest

from schurtwirl import DEFAULT_POLICY


@pytest.fixture
def policy():
    return DEFAULT_POLICY


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def ket(bits: str) -> np.ndarray:
    """Computational basis ket from a bit string, e.g. ket('0101')."""
    vec = np.zeros(2 ** len(bits), dtype=complex)
    vec[int(bits, 2)] = 1.0
    return vec


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Independent Haar sampler for tests (Ginibre + QR with phase fix)."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def kron_power(mat: np.ndarray, t: int) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for _ in range(t):
        out = np.kron(out, mat)
    return out


def span_projector(vectors) -> np.ndarray:
    """Orthogonal projector onto the span of a (possibly non-orthogonal) family."""
    a = np.array(vectors, dtype=complex).T
    return a @ np.linalg.pinv(a)
