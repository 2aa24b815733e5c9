import numpy as np
import pytest

from cryptovar.errors import ContractViolation
from cryptovar.models import ensure_psd


def test_psd_matrix_unchanged():
    m = np.array([[2.0, 0.5], [0.5, 1.0]])
    out, adjusted = ensure_psd(m)
    assert not adjusted
    assert np.array_equal(out, m)


def test_zero_matrix_unchanged():
    out, adjusted = ensure_psd(np.zeros((3, 3)))
    assert not adjusted
    assert np.array_equal(out, np.zeros((3, 3)))


def test_invalid_correlation_clamped():
    m = np.array([[1.0, 1.2], [1.2, 1.0]])
    out, adjusted = ensure_psd(m)
    assert adjusted
    # eigen-floor oracle: eigenvalues (2.2, -0.2) -> rank-1 [[1.1,1.1],[1.1,1.1]],
    # diagonal restored to 1 -> off-diagonal exactly 1
    assert out[0, 0] == pytest.approx(1.0, abs=1e-12)
    assert out[1, 1] == pytest.approx(1.0, abs=1e-12)
    assert out[0, 1] == pytest.approx(1.0, abs=1e-9)
    assert np.linalg.eigvalsh(out).min() >= -1e-10


def test_diagonal_preserved_random():
    rng = np.random.default_rng(1)
    for _ in range(50):
        a = rng.normal(0, 1, (4, 4))
        m = 0.5 * (a + a.T)  # symmetric, usually indefinite
        out, adjusted = ensure_psd(m)
        assert np.linalg.eigvalsh(out).min() >= -1e-10
        for i in range(4):
            if m[i, i] > 0:
                assert out[i, i] == pytest.approx(m[i, i], rel=1e-9)


def test_non_symmetric_rejected():
    with pytest.raises(ContractViolation):
        ensure_psd(np.array([[1.0, 0.5], [0.2, 1.0]]))
