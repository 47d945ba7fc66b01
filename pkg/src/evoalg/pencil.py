"""Linear pencils of symmetric matrices and the search for a full-rank point.

Given matrices ``M_1 .. M_m``, the pencil is ``M(lam) = sum_j lam_j M_j``.
The rank of ``M(lam)`` is maximised outside a proper algebraic subvariety, so
a random unit vector attains the maximum with probability one; the canonical
directions are tried first so that an invertible ``M_k`` is found
deterministically whenever one exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import numkernel
from .numkernel import DEFAULT_TOL, DimensionMismatch, ToleranceContext

DEFAULT_TRIALS = 16


@dataclass(frozen=True)
class PencilRankWitness:
    """A unit direction together with the rank it achieves.

    ``canonical_index`` is the 1-based index of the structure matrix when the
    witness is a canonical direction, else ``None``.  ``smallest_kept_sv`` is
    the smallest retained singular value at the witness, recorded for
    conditioning diagnostics and tie-breaking.
    """

    lambda0: np.ndarray
    r0: int
    trials_used: int
    seed: int
    canonical_index: Optional[int] = None
    smallest_kept_sv: float = 0.0


def _check_stack(mats: Sequence[np.ndarray]) -> int:
    if not mats:
        raise DimensionMismatch("a pencil needs at least one matrix")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape != (n, n):
            raise DimensionMismatch(f"pencil matrices must all be {n}x{n}, got {m.shape}")
    return n


def evaluate(mats: Sequence[np.ndarray], lam) -> np.ndarray:
    """Evaluate ``sum_j lam_j M_j``; symmetric whenever the inputs are."""
    n = _check_stack(mats)
    coeffs = np.asarray(lam)
    if coeffs.shape != (len(mats),):
        raise DimensionMismatch(f"pencil over {len(mats)} matrices needs {len(mats)} coefficients, got {coeffs.shape}")
    out = np.zeros((n, n), dtype=np.result_type(coeffs.dtype, *(m.dtype for m in mats)))
    for c, m in zip(coeffs, mats):
        out += c * m
    return out


def _rank_and_smin(m: np.ndarray, tol: ToleranceContext) -> tuple[int, float]:
    if not np.any(m):
        return 0, 0.0
    s = np.linalg.svd(m, compute_uv=False)
    cutoff = tol.rank_rtol * float(s[0]) * max(m.shape)
    r = int(np.count_nonzero(s > cutoff))
    return r, (float(s[r - 1]) if r else 0.0)


def _unit_gaussian(m: int, seed: int, trial: int) -> np.ndarray:
    rng = np.random.default_rng([seed, trial])
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return z / np.linalg.norm(z)


def max_pencil_rank(
    mats: Sequence[np.ndarray],
    tol: ToleranceContext = DEFAULT_TOL,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
) -> PencilRankWitness:
    """Best-rank pencil point found among canonical directions and random trials.

    Canonical directions are scanned first in ascending index and returned
    immediately when one reaches full rank.  Random candidates have standard
    complex Gaussian coordinates on per-trial streams derived from the seed,
    so the result is reproducible bit for bit; among random candidates of
    equal rank the one with the largest smallest retained singular value wins.
    A random candidate never displaces an equal-rank canonical one.
    """
    n = _check_stack(mats)
    m = len(mats)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    best: Optional[PencilRankWitness] = None
    used = 0
    for k in range(m):
        lam = np.zeros(m, dtype=np.complex128)
        lam[k] = 1.0
        used += 1
        r, smin = _rank_and_smin(evaluate(mats, lam.real if not np.iscomplexobj(mats[0]) else lam), tol)
        witness = PencilRankWitness(lam, r, used, seed, canonical_index=k + 1, smallest_kept_sv=smin)
        if r == n:
            return witness
        if best is None or r > best.r0:
            best = witness
    for t in range(trials):
        lam = _unit_gaussian(m, seed, t)
        used += 1
        r, smin = _rank_and_smin(evaluate(mats, lam), tol)
        replace = r > best.r0 or (
            r == best.r0 and best.canonical_index is None and smin > best.smallest_kept_sv
        )
        if replace:
            best = PencilRankWitness(lam, r, used, seed, canonical_index=None, smallest_kept_sv=smin)
    return PencilRankWitness(best.lambda0, best.r0, used, seed, best.canonical_index, best.smallest_kept_sv)
