import numpy as np
import pytest

from evoalg import example_algebra, m_structure_matrices


def assert_parallel(u, v, tol=1e-6):
    """Assert two vectors span the same line (up to scale and phase)."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    assert nu > 0 and nv > 0
    cos = abs(np.vdot(u, v)) / (nu * nv)
    assert np.sqrt(max(0.0, 2.0 - 2.0 * cos)) <= tol, f"vectors not parallel: {u} vs {v}"


def columns_match_up_to_scale(p, expected_columns, tol=1e-6):
    """Each expected column is parallel to exactly one column of p, and vice versa."""
    p = np.asarray(p)
    n = p.shape[1]
    assert len(expected_columns) == n
    used = set()
    for want in expected_columns:
        hit = None
        for j in range(n):
            if j in used:
                continue
            w = np.asarray(want, dtype=complex)
            c = p[:, j].astype(complex)
            cos = abs(np.vdot(w, c)) / (np.linalg.norm(w) * np.linalg.norm(c))
            if np.sqrt(max(0.0, 2.0 - 2.0 * cos)) <= tol:
                hit = j
                break
        assert hit is not None, f"no column of {p} matches {want}"
        used.add(hit)


@pytest.fixture
def mendel0_mats():
    return m_structure_matrices(example_algebra("mendel", 0.0))


@pytest.fixture
def tetraploid0_mats():
    return m_structure_matrices(example_algebra("tetraploid", 0.0))
