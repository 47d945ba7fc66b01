"""End-to-end decision: is a given commutative algebra an evolution algebra?

The procedure mirrors the structure of the underlying theory:

* branch "a": some structure matrix is invertible; use it as the pencil
  point and reduce to a similarity problem (invertible-matrix shortcut).
* branch "b.1": the annihilator is zero and no structure matrix is
  invertible; search for a full-rank pencil point.  If the search tops out
  below full rank, the kernel dimension (zero) contradicts the rank defect
  and the algebra is not an evolution algebra.
* branch "b.2": the annihilator is non-zero; re-express the algebra with the
  annihilator last, decide the leading blocks, and embed the transform back.

Real algebras are decided through their complexification; a positive verdict
is reported only with a real change of basis.  When the similarity spectrum
is not real, the honest outcome is "complex only, undetermined over R" with
the complex certificate attached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import algebra, numkernel, pencil, sdc, sds
from .algebra import REAL, AlgebraSpec
from .numkernel import DEFAULT_TOL, NonConvergence, Singular, ToleranceContext
from .pencil import DEFAULT_TRIALS, PencilRankWitness
from .sdc import GramFactorisationError, Refutation
from .sds import NonRealSpectrum, RefinementInconsistency

EVOLUTION = "evolution"
NOT_EVOLUTION = "not_evolution"
COMPLEX_ONLY_UNDETERMINED = "complex_only_undetermined"
UNDETERMINED = "undetermined"

_RULES = {
    "a": "invertible structure matrix shortcut",
    "b.1": "full-rank pencil search with zero annihilator",
    "b.2": "annihilator reduction to the leading blocks",
}


@dataclass(frozen=True)
class Certificate:
    """A verifiable natural-basis witness.

    Column ``i`` of ``p`` holds the coordinates of the i-th natural basis
    vector in the input basis; ``diagonals[k]`` is the diagonal of
    ``P^T M_k P``; row ``i`` of ``natural_basis_products`` collects the
    coordinates of the square of the i-th natural basis vector in the input
    basis, i.e. entry ``(i, k)`` equals ``diagonals[k][i]``.
    """

    p: np.ndarray
    diagonals: tuple[np.ndarray, ...]
    natural_basis_products: np.ndarray


@dataclass(frozen=True)
class Diagnostics:
    branch: Optional[str]
    r0: Optional[int]
    lambda0: Optional[np.ndarray]
    ann_dim: Optional[int]
    trials: int
    trials_used: Optional[int]
    seed: int
    tolerances: ToleranceContext
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class Verdict:
    outcome: str
    certificate: Optional[Certificate] = None
    refutation: Optional[Refutation] = None
    diagnostics: Optional[Diagnostics] = None


@dataclass(frozen=True)
class CertificateCheck:
    ok: bool
    offending_pair: Optional[tuple[int, int]] = None
    residual: float = 0.0
    reason: Optional[str] = None


def _certificate(p: np.ndarray, mats: list[np.ndarray]) -> Certificate:
    diagonals = tuple(np.diag(p.T @ m @ p).copy() for m in mats)
    products = np.column_stack(diagonals)  # row i = coordinates of the square of e*_i
    return Certificate(p, diagonals, products)


def _find_real_pencil_point(
    mats: list[np.ndarray], tol: ToleranceContext, trials: int, seed: int
) -> Optional[np.ndarray]:
    """Random real Gaussian search for a full-rank pencil point."""
    n = mats[0].shape[0]
    m = len(mats)
    for t in range(trials):
        rng = np.random.default_rng([seed, 0x8EA7, t])
        lam = rng.standard_normal(m)
        lam = lam / np.linalg.norm(lam)
        if numkernel.rank(pencil.evaluate(mats, lam), tol) == n:
            return lam.astype(np.complex128)
    return None


def _solve_stack(
    mats: list[np.ndarray],
    witness: PencilRankWitness,
    real_input: bool,
    tol: ToleranceContext,
    trials: int,
    seed: int,
    notes: list[str],
) -> tuple[str, Optional[np.ndarray], Optional[Refutation]]:
    """Run the full-rank congruence solver with the real/complex dance.

    Returns ``(outcome, p, refutation)`` where outcome is one of EVOLUTION,
    NOT_EVOLUTION, COMPLEX_ONLY_UNDETERMINED.
    """
    if not real_input:
        res = sdc.sdc_full_rank(mats, witness, tol, seed, field="complex")
        if res.ok:
            return EVOLUTION, res.p, None
        return NOT_EVOLUTION, None, res.refutation

    lam = np.asarray(witness.lambda0)
    real_witness = witness
    if np.max(np.abs(lam.imag)) > 1e-14:
        real_lam = _find_real_pencil_point(mats, tol, trials, seed)
        if real_lam is None:
            notes.append("no real full-rank pencil point found; decided over C only")
            res = sdc.sdc_full_rank(mats, witness, tol, seed, field="complex")
            if res.ok:
                return COMPLEX_ONLY_UNDETERMINED, res.p, None
            return NOT_EVOLUTION, None, res.refutation
        notes.append("real full-rank pencil point found by re-search")
        real_witness = replace(witness, lambda0=real_lam, canonical_index=None)
    try:
        res = sdc.sdc_full_rank(mats, real_witness, tol, seed, field="real")
    except NonRealSpectrum:
        notes.append("similarity spectrum is not real; no real natural basis was certified")
        res = sdc.sdc_full_rank(mats, real_witness, tol, seed, field="complex")
        if res.ok:
            return COMPLEX_ONLY_UNDETERMINED, res.p, None
        return NOT_EVOLUTION, None, res.refutation
    if res.ok:
        return EVOLUTION, res.p, None
    return NOT_EVOLUTION, None, res.refutation


def is_evolution_algebra(
    spec: AlgebraSpec,
    tol: ToleranceContext = DEFAULT_TOL,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
) -> Verdict:
    """Decide whether the algebra admits a natural basis.

    Every positive verdict carries a certificate that passes
    :func:`check_certificate`; every negative verdict carries an
    independently recheckable refutation witness.  Numerical failures give
    an undetermined outcome, never a silently wrong verdict.
    """
    spec = algebra.validate(spec)
    n = spec.dim
    real_input = spec.field == REAL
    mats = algebra.m_structure_matrices(spec)
    notes: list[str] = []

    def diag(branch, r0, lambda0, ann_dim, trials_used):
        return Diagnostics(branch, r0, lambda0, ann_dim, trials, trials_used, seed, tol, tuple(notes))

    try:
        if not any(np.any(m) for m in mats):
            # zero algebra: the given basis is already natural
            p = np.eye(n)
            return Verdict(EVOLUTION, _certificate(p, mats), None, diag("b.2", 0, None, n, None))

        witness = None
        branch = None
        ann_dim: Optional[int] = None
        work = mats
        embed: Optional[tuple[np.ndarray, int]] = None

        for k, m in enumerate(mats):
            if numkernel.rank(m, tol) == n:
                lam = np.zeros(n, dtype=np.complex128)
                lam[k] = 1.0
                witness = PencilRankWitness(lam, n, k + 1, seed, canonical_index=k + 1)
                branch = "a"
                ann_dim = 0  # an invertible structure matrix forces a zero annihilator
                break

        if witness is None:
            ann = algebra.annihilator_basis(spec, tol)
            ann_dim = ann.shape[1]
            if ann_dim == 0:
                branch = "b.1"
                witness = pencil.max_pencil_rank(mats, tol, trials, seed)
                if witness.r0 < n:
                    notes.append(
                        "no full-rank pencil point found by randomized search; "
                        "the rank defect contradicts the zero common kernel"
                    )
                    return Verdict(
                        NOT_EVOLUTION,
                        None,
                        sdc.KernelDimensionMismatch(0, n - witness.r0),
                        diag(branch, witness.r0, witness.lambda0, 0, witness.trials_used),
                    )
            else:
                branch = "b.2"
                adapted = algebra.adapt_basis_to_annihilator(spec, tol)
                r = n - ann_dim
                work = adapted.blocks
                embed = (adapted.transform, ann_dim)
                witness = pencil.max_pencil_rank(work, tol, trials, seed)
                if witness.r0 < r:
                    notes.append("randomized search found no invertible pencil point for the reduced blocks")
                    return Verdict(
                        NOT_EVOLUTION,
                        None,
                        sdc.NoFullRankPencil(witness.trials_used, seed),
                        diag(branch, witness.r0, witness.lambda0, ann_dim, witness.trials_used),
                    )

        outcome, p_work, refutation = _solve_stack(list(work), witness, real_input, tol, trials, seed, notes)
        diagnostics = diag(branch, witness.r0, witness.lambda0, ann_dim, witness.trials_used)
        if outcome == NOT_EVOLUTION:
            return Verdict(NOT_EVOLUTION, None, refutation, diagnostics)

        if embed is not None:
            transform, a = embed
            r = n - a
            p_full = np.zeros((n, n), dtype=np.result_type(p_work.dtype, transform.dtype))
            p_full[:r, :r] = p_work
            p_full[r:, r:] = np.eye(a)
            p = transform @ p_full
        else:
            p = p_work

        check = sdc.verify_congruence(p, mats, tol)
        if not check.ok:
            notes.append("constructed transform failed independent congruence verification")
            return Verdict(UNDETERMINED, None, None, diag(branch, witness.r0, witness.lambda0, ann_dim, witness.trials_used))
        return Verdict(outcome, _certificate(p, mats), None, diagnostics)
    except (NonConvergence, RefinementInconsistency, GramFactorisationError, Singular) as exc:
        notes.append(f"numerical failure: {exc}")
        return Verdict(UNDETERMINED, None, None, diag(None, None, None, None, None))


def check_certificate(spec: AlgebraSpec, p, tol: ToleranceContext = DEFAULT_TOL) -> CertificateCheck:
    """Independent oracle for a natural-basis candidate.

    Recomputes every off-diagonal product of the candidate basis through the
    multiplication table; accepts when all of them vanish within the scaled
    tolerance.  Knows nothing about how ``p`` was produced.
    """
    spec = algebra.validate(spec)
    n = spec.dim
    pm = np.asarray(p)
    if pm.shape != (n, n):
        return CertificateCheck(ok=False, reason=f"transform must be {n}x{n}, got {pm.shape}")
    if numkernel.rank(pm, tol) < n:
        return CertificateCheck(ok=False, reason="transform is singular under the rank tolerance")
    mats = algebra.m_structure_matrices(spec)
    tensor_scale = math.sqrt(sum(float(np.linalg.norm(m)) ** 2 for m in mats))
    worst = 0.0
    worst_pair = None
    ok = True
    for i in range(n):
        for j in range(i + 1, n):
            product = algebra.multiply(spec, pm[:, i], pm[:, j])
            residual = float(np.linalg.norm(product))
            bound = tol.verify_rtol * tensor_scale * float(np.linalg.norm(pm[:, i])) * float(np.linalg.norm(pm[:, j]))
            if residual > worst:
                worst = residual
                worst_pair = (i + 1, j + 1)
            if residual > bound:
                ok = False
    if ok:
        return CertificateCheck(ok=True, residual=worst)
    return CertificateCheck(ok=False, offending_pair=worst_pair, residual=worst)


def _fmt_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.12g}"
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real:.12g}{sign}{abs(z.imag):.12g}i"


def _fmt_vector(v: np.ndarray) -> str:
    return "[" + ", ".join(_fmt_complex(x) for x in np.asarray(v)) + "]"


def explain(verdict: Verdict) -> str:
    """Human-readable report: branch taken, rule applied, witness data,
    and the parameters needed to reproduce the run."""
    lines = [f"verdict: {verdict.outcome}"]
    d = verdict.diagnostics
    if d is not None:
        if d.branch is not None:
            lines.append(f"branch: {d.branch} ({_RULES[d.branch]})")
        if d.ann_dim is not None:
            lines.append(f"annihilator dimension: {d.ann_dim}")
        if d.lambda0 is not None:
            lines.append(f"pencil point: lambda0 = {_fmt_vector(d.lambda0)} (rank {d.r0})")
    r = verdict.refutation
    if isinstance(r, sds.NonDiagonalisable):
        lines.append(
            f"refutation: matrix {r.index} of the similarity family is not diagonalisable; "
            f"defective eigenvalue {_fmt_complex(r.eigenvalue)}"
        )
    elif isinstance(r, sds.NonCommuting):
        lines.append(
            f"refutation: matrices {r.pair[0]} and {r.pair[1]} of the similarity family do not commute "
            f"(commutator norm {r.commutator_norm:.6g})"
        )
    elif isinstance(r, sdc.KernelDimensionMismatch):
        lines.append(
            f"refutation: common kernel has dimension {r.kernel_dim}, "
            f"but the pencil rank defect requires {r.expected}"
        )
    elif isinstance(r, sdc.NoFullRankPencil):
        lines.append(
            f"refutation: no invertible pencil point for the reduced blocks "
            f"after {r.trials} trials (seed {r.seed})"
        )
    c = verdict.certificate
    if c is not None:
        lines.append("natural basis (coordinates in the input basis):")
        for i in range(c.p.shape[1]):
            lines.append(f"  b{i + 1} = {_fmt_vector(c.p[:, i])}")
        lines.append("squares of the natural basis (input-basis coordinates):")
        for i in range(c.natural_basis_products.shape[0]):
            lines.append(f"  b{i + 1}^2 = {_fmt_vector(c.natural_basis_products[i])}")
    if d is not None:
        t = d.tolerances
        lines.append(
            "tolerances: "
            f"rank_rtol={t.rank_rtol:g}, eig_cluster_atol={t.eig_cluster_atol:g}, "
            f"commute_rtol={t.commute_rtol:g}, verify_rtol={t.verify_rtol:g}"
        )
        lines.append(f"reproduce with: seed={d.seed}, trials={d.trials}" +
                     (f", trials_used={d.trials_used}" if d.trials_used is not None else ""))
        for note in d.notes:
            lines.append(f"note: {note}")
    return "\n".join(lines)
