"""Structure-constant model of a finite-dimensional commutative algebra.

An algebra over R or C is given by a basis ``e_1 .. e_n`` and the products
``e_i e_j = sum_k m_ijk e_k``.  Only entries with ``i <= j`` are stored, so a
non-commutative table is unrepresentable by construction.  The tensor is
repackaged as the n symmetric "structure matrices" ``M_k`` with
``(M_k)_{ij} = m_ijk``; the whole product is then bilinear in coordinates:
the k-th coordinate of ``a b`` is ``a^T M_k b``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from . import numkernel
from .numkernel import DEFAULT_TOL, DimensionMismatch, Singular, ToleranceContext

REAL = "real"
COMPLEX = "complex"


class MalformedSpec(ValueError):
    """The structure-constant data is not a valid algebra description."""


class EmptyAnnihilator(ValueError):
    """The annihilator is zero; use the full-rank path instead."""


class EmptyQuotient(ValueError):
    """The annihilator is the whole algebra; the quotient would be 0-dimensional."""


class AlreadyComplex(ValueError):
    """Complexification of an algebra that is already complex."""


@dataclass(frozen=True)
class AlgebraSpec:
    """Dimension, scalar field, and sparse symmetric structure constants.

    ``constants`` maps ``(i, j, k)`` with 1-based indices and ``i <= j`` to the
    coefficient of ``e_k`` in ``e_i e_j``; missing entries are zero.  The entry
    for ``(j, i, k)`` is read as ``(i, j, k)``.
    """

    dim: int
    field: str
    constants: Mapping[tuple[int, int, int], complex]
    labels: Optional[tuple[str, ...]] = None


def validate(spec: AlgebraSpec) -> AlgebraSpec:
    """Check and canonicalise a spec.

    Rejects non-finite constants, out-of-range or disordered indices and
    non-positive dimension; drops exact zeros and coerces values to complex.
    Raises :class:`MalformedSpec` with the offending entry in the message.
    """
    if not isinstance(spec.dim, int) or spec.dim < 1:
        raise MalformedSpec(f"dimension must be a positive integer, got {spec.dim!r}")
    if spec.field not in (REAL, COMPLEX):
        raise MalformedSpec(f"field must be 'real' or 'complex', got {spec.field!r}")
    n = spec.dim
    canonical: dict[tuple[int, int, int], complex] = {}
    for key, value in spec.constants.items():
        try:
            i, j, k = (int(x) for x in key)
        except (TypeError, ValueError):
            raise MalformedSpec(f"constant key {key!r} is not an (i, j, k) index triple") from None
        if not (1 <= i <= j <= n and 1 <= k <= n):
            raise MalformedSpec(f"index triple {key!r} out of range for dimension {n} (need 1 <= i <= j <= n, 1 <= k <= n)")
        v = complex(value)
        if not (cmath.isfinite(v)):
            raise MalformedSpec(f"constant at {key!r} is not finite: {value!r}")
        if spec.field == REAL and v.imag != 0.0:
            raise MalformedSpec(f"constant at {key!r} has non-zero imaginary part under field: real")
        if v != 0:
            canonical[(i, j, k)] = v
    labels = spec.labels
    if labels is not None:
        labels = tuple(str(x) for x in labels)
        if len(labels) != n:
            raise MalformedSpec(f"{len(labels)} labels for dimension {n}")
    return AlgebraSpec(n, spec.field, canonical, labels)


def _dtype(spec: AlgebraSpec):
    return np.float64 if spec.field == REAL else np.complex128


def m_structure_matrices(spec: AlgebraSpec) -> list[np.ndarray]:
    """The n symmetric matrices ``M_k`` with ``(M_k)_{ij} = m_ijk``.

    Symmetry is exact by construction.  Real algebras yield float64 matrices,
    complex ones complex128.
    """
    n = spec.dim
    mats = [np.zeros((n, n), dtype=_dtype(spec)) for _ in range(n)]
    for (i, j, k), v in spec.constants.items():
        value = v.real if spec.field == REAL else v
        mats[k - 1][i - 1, j - 1] = value
        mats[k - 1][j - 1, i - 1] = value
    return mats


def multiply(spec: AlgebraSpec, a, b) -> np.ndarray:
    """Product of two elements given by coordinate vectors.

    The k-th output coordinate is ``a^T M_k b``.
    """
    x = np.asarray(a)
    y = np.asarray(b)
    if x.shape != (spec.dim,) or y.shape != (spec.dim,):
        raise DimensionMismatch(f"coordinate vectors must have length {spec.dim}, got {x.shape} and {y.shape}")
    mats = m_structure_matrices(spec)
    return np.array([x @ m @ y for m in mats])


def change_basis(spec: AlgebraSpec, p, tol: ToleranceContext = DEFAULT_TOL) -> AlgebraSpec:
    """Re-express the algebra in the basis whose i-th vector is column i of ``p``.

    The new structure matrices are the congruence transforms ``P^T M_k P``
    re-coordinatised through ``P^{-1}``; products of elements commute with the
    coordinate change.  Raises :class:`Singular` for a rank-deficient ``p``.
    """
    spec = validate(spec)
    n = spec.dim
    pm = np.asarray(p)
    if pm.shape != (n, n):
        raise DimensionMismatch(f"change of basis must be {n}x{n}, got {pm.shape}")
    if numkernel.rank(pm, tol) < n:
        raise Singular("change of basis matrix is singular under the rank tolerance")
    p_is_real = not np.iscomplexobj(pm) or bool(np.all(pm.imag == 0))
    field = REAL if (spec.field == REAL and p_is_real) else COMPLEX
    if field == REAL:
        pm = pm.real.astype(np.float64)
    pinv = np.linalg.inv(pm)
    mats = m_structure_matrices(spec)
    congruent = [pm.T @ m @ pm for m in mats]
    constants: dict[tuple[int, int, int], complex] = {}
    for l in range(n):
        new_m = sum(pinv[l, k] * congruent[k] for k in range(n))
        new_m = (new_m + new_m.T) / 2.0  # guard against round-off asymmetry
        for i in range(n):
            for j in range(i, n):
                v = complex(new_m[i, j])
                if v != 0:
                    constants[(i + 1, j + 1, l + 1)] = v
    return validate(AlgebraSpec(n, field, constants))


def annihilator_basis(spec: AlgebraSpec, tol: ToleranceContext = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the annihilator in coordinates.

    The annihilator is the common kernel of the structure matrices; it is
    computed from the stacked ``(n^2) x n`` matrix in a single kernel call.
    """
    spec = validate(spec)
    stacked = np.vstack(m_structure_matrices(spec))
    return numkernel.kernel_basis(stacked, tol)


@dataclass(frozen=True)
class AdaptedBasis:
    """A basis listing the annihilator last, with the non-degenerate blocks.

    ``transform`` holds the new basis vectors as columns (annihilator columns
    last); in that basis every structure matrix is the direct sum of its
    leading ``(n - ann_dim)`` block and a zero block, and ``blocks`` holds the
    n leading blocks.
    """

    transform: np.ndarray
    ann_dim: int
    blocks: list[np.ndarray]


def adapt_basis_to_annihilator(spec: AlgebraSpec, tol: ToleranceContext = DEFAULT_TOL) -> AdaptedBasis:
    """Build a basis with the annihilator last and extract the leading blocks.

    The annihilator basis is completed to a full basis by greedy selection of
    standard basis vectors (largest residual first), which keeps the transform
    deterministic and well conditioned.  Raises :class:`EmptyAnnihilator` when
    the annihilator is zero.
    """
    spec = validate(spec)
    n = spec.dim
    ann = annihilator_basis(spec, tol)
    a = ann.shape[1]
    if a == 0:
        raise EmptyAnnihilator("annihilator is zero; no adapted basis needed")
    indices = numkernel.complete_to_basis(ann)
    r = n - a
    eye = np.eye(n, dtype=ann.dtype)
    transform = np.column_stack([eye[:, indices], ann]) if r else ann
    changed = change_basis(spec, transform, tol)
    blocks = [m[:r, :r] for m in m_structure_matrices(changed)]
    return AdaptedBasis(transform, a, blocks)


def complexify(spec: AlgebraSpec) -> AlgebraSpec:
    """The same structure constants regarded over the complex field.

    Any basis of the real algebra is a basis of its complexification, so the
    structure matrices are unchanged.
    """
    spec = validate(spec)
    if spec.field == COMPLEX:
        raise AlreadyComplex("algebra is already complex")
    return AlgebraSpec(spec.dim, COMPLEX, dict(spec.constants), spec.labels)


def quotient_by_annihilator(spec: AlgebraSpec, tol: ToleranceContext = DEFAULT_TOL) -> AlgebraSpec:
    """Quotient algebra by the annihilator, in the adapted basis.

    Its structure matrices are exactly the first ``r`` leading blocks of the
    adapted basis, where ``r = n - ann_dim``.
    """
    spec = validate(spec)
    adapted = adapt_basis_to_annihilator(spec, tol)
    r = spec.dim - adapted.ann_dim
    if r == 0:
        raise EmptyQuotient("annihilator is the whole algebra; quotient is 0-dimensional")
    constants: dict[tuple[int, int, int], complex] = {}
    for k in range(r):
        block = adapted.blocks[k]
        for i in range(r):
            for j in range(i, r):
                v = complex(block[i, j])
                if v != 0:
                    constants[(i + 1, j + 1, k + 1)] = v
    return validate(AlgebraSpec(r, spec.field, constants))
