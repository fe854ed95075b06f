"""Position-momentum correlation measure for Gaussian states.

The measure is the squared Frobenius norm of the position-momentum block of
the covariance matrix.  It equals the squared Hilbert-Schmidt distance (up to
a factor 2) to the closest covariance matrix with that block removed, is
invariant under block-orthogonal passive gates and displacements, additive
under tensor products, and bounded at fixed trace by
``max_symplectic_coherence``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .gaussian_core import CovMat, GaussianState, blocks, is_pure, require_valid
from .symplectic_ops import SympGate, derive_rng, haar_unitary
from .ensembles import pure_cm_from_passive, sample_d, spectrum_from_weights

FREE_TOL = 1e-10
MEMBERSHIP_TOL = 1e-8


def symplectic_coherence(cov: CovMat) -> float:
    """Squared Frobenius norm of the position-momentum block.

    Additive under tensor products and zero exactly on states with no
    position-momentum correlations.
    """
    _, _, v_xp = blocks(cov)
    return float(np.sum(v_xp * v_xp))


def closest_free_cm(cov: CovMat) -> CovMat:
    """Block-diagonal truncation: the nearest correlation-free covariance.

    Zeroing the position-momentum block of a valid covariance matrix always
    yields a valid covariance matrix, and it minimises the Hilbert-Schmidt
    distance to the correlation-free set.
    """
    v_x, v_p, _ = blocks(cov)
    m = cov.m
    out = np.zeros((2 * m, 2 * m))
    out[:m, :m] = v_x
    out[m:, m:] = v_p
    return CovMat(out, tol=cov.tol)


def is_free(cov: CovMat, tol: float = FREE_TOL) -> bool:
    """Whether every position-momentum covariance entry is within ``tol`` of 0."""
    _, _, v_xp = blocks(cov)
    return bool(np.max(np.abs(v_xp)) <= tol) if v_xp.size else True


@dataclass(frozen=True)
class CoherenceReport:
    """Coherence value together with its distance interpretation.

    Attributes:
        coherence: squared Frobenius norm of the position-momentum block.
        hs_distance_sq_to_free: squared Frobenius distance to the
            block-diagonal truncation; equals ``2 * coherence``.
        closest_free: the truncated covariance matrix.
    """

    coherence: float
    hs_distance_sq_to_free: float
    closest_free: CovMat


def coherence_report(cov: CovMat) -> CoherenceReport:
    """Coherence, distance to the correlation-free set, and the minimiser."""
    free = closest_free_cm(cov)
    diff = cov.matrix - free.matrix
    return CoherenceReport(
        coherence=symplectic_coherence(cov),
        hs_distance_sq_to_free=float(np.sum(diff * diff)),
        closest_free=free,
    )


def max_symplectic_coherence(E: float, m: int) -> float:
    """Largest coherence any m-mode state with covariance trace E can have.

    ``(E - 2m)^2 / 4 + (E - 2m)``.

    Raises:
        ValueError: if E < 2m (no state has covariance trace below 2m).
    """
    excess = E - 2.0 * m
    if excess < 0:
        raise ValueError(f"covariance trace must be >= 2m, got E={E}, m={m}")
    return excess * excess / 4.0 + excess


def msc_squeezing(E: float, m: int) -> float:
    """Squeezing parameter of the canonical maximally correlated state.

    Solves ``e^{2r} + e^{-2r} = E - 2(m-1)`` with r >= 0.
    """
    budget = E - 2.0 * (m - 1)
    if budget < 2.0:
        raise ValueError(f"covariance trace must be >= 2m, got E={E}, m={m}")
    return 0.5 * float(np.arccosh(budget / 2.0))


def msc_canonical(E: float, m: int) -> GaussianState:
    """Canonical state attaining ``max_symplectic_coherence(E, m)``.

    Mode 1 carries a squeezed state rotated by pi/4; the remaining modes are
    vacuum.  The covariance trace is E exactly and the state is pure.

    Raises:
        ValueError: if E < 2m.
    """
    r = msc_squeezing(E, m)
    v = np.eye(2 * m)
    v[0, 0] = v[m, m] = np.cosh(2.0 * r)
    v[0, m] = v[m, 0] = -np.sinh(2.0 * r)
    return GaussianState(CovMat(v))


@dataclass(frozen=True)
class MscSpec:
    """Parameters of a maximal-coherence pure-state construction.

    The state is built as (outer orthogonal gate) o (per-mode phase
    shifters) o (inner orthogonal gate) acting on a squeezed first mode and
    vacuum elsewhere.

    Attributes:
        E: target covariance trace (>= 2m).
        m: mode count.
        r: squeezing parameter (>= 0).
        theta: per-mode phase angles, shape (m,).
        o_inner: m x m orthogonal matrix applied before the phase shifters.
        o_outer: m x m orthogonal matrix applied after the phase shifters.
    """

    E: float
    m: int
    r: float
    theta: np.ndarray
    o_inner: np.ndarray
    o_outer: np.ndarray


def msc_spec(E: float, m: int) -> MscSpec:
    """Canonical parameters: theta = (pi/4, 0, ..., 0), identity orthogonals."""
    theta = np.zeros(m)
    theta[0] = np.pi / 4.0
    return MscSpec(
        E=float(E),
        m=m,
        r=msc_squeezing(E, m),
        theta=theta,
        o_inner=np.eye(m),
        o_outer=np.eye(m),
    )


def msc_from_spec(spec: MscSpec) -> GaussianState:
    """Build the pure state described by an ``MscSpec``.

    The squeezing spectrum is ``(e^{2r}, 1, ..., 1)`` on positions and its
    inverse on momenta; the passive gate is assembled from the recipe's
    orthogonals and phase angles.
    """
    m = spec.m
    d = np.ones(m)
    d[0] = np.exp(2.0 * spec.r)
    ct, st = np.cos(spec.theta), np.sin(spec.theta)
    # Passive gate [[X, Y], [-Y, X]] for O_outer . R(theta) . O_inner.
    x = spec.o_outer @ (ct[:, None] * spec.o_inner)
    y = spec.o_outer @ (st[:, None] * spec.o_inner)
    return GaussianState(pure_cm_from_passive(x, y, d))


@dataclass(frozen=True)
class MembershipReport:
    """Residuals of the maximal-coherence membership conditions.

    With C = diag(cos theta), S = diag(sin theta) and the inner orthogonal O,
    all three matrices O^T C^2 O, O^T S^2 O, O^T (CS) O must have first row
    (+-1/2, 0, ..., 0).  Residuals are ``| 2|A_1j| - delta_1j |`` per column.
    """

    is_member: bool
    residual_cos_sq: np.ndarray
    residual_sin_sq: np.ndarray
    residual_cos_sin: np.ndarray

    @property
    def max_residual(self) -> float:
        return float(
            max(
                self.residual_cos_sq.max(),
                self.residual_sin_sq.max(),
                self.residual_cos_sin.max(),
            )
        )


def msc_membership_conditions(
    o: np.ndarray, theta: np.ndarray, tol: float = MEMBERSHIP_TOL
) -> MembershipReport:
    """Check whether phase angles and an inner orthogonal give maximal coherence.

    Args:
        o: m x m orthogonal matrix (the gate applied before the phase
            shifters, acting on a squeezed first mode).
        theta: per-mode phase angles, shape (m,).
        tol: residual tolerance.

    Returns:
        Per-condition first-row residuals and the overall verdict.

    Raises:
        ValueError: if ``o`` is not orthogonal.
    """
    o = np.asarray(o, dtype=float)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    m = o.shape[0]
    if o.shape != (m, m) or theta.shape != (m,):
        raise ValueError(f"shape mismatch: o {o.shape}, theta {theta.shape}")
    if not np.allclose(o @ o.T, np.eye(m), atol=1e-10):
        raise ValueError("matrix is not orthogonal")
    c, s = np.cos(theta), np.sin(theta)
    target = np.zeros(m)
    target[0] = 1.0

    def first_row_residual(diag: np.ndarray) -> np.ndarray:
        # First row of O^T diag(d) O: sum_k O_k1 d_k O_kj.
        row = (o[:, 0] * diag) @ o
        return np.abs(2.0 * np.abs(row) - target)

    res_c = first_row_residual(c * c)
    res_s = first_row_residual(s * s)
    res_cs = first_row_residual(c * s)
    ok = bool(max(res_c.max(), res_s.max(), res_cs.max()) <= tol)
    return MembershipReport(ok, res_c, res_s, res_cs)


def mixed_msc_check(
    cov: CovMat, comp1: CovMat, comp2: CovMat, tol: float = 1e-9
) -> tuple[bool, list[str]]:
    """Verify a maximal-coherence mixed state's equal-weight decomposition.

    Requires ``cov = (comp1 + comp2) / 2`` with both components pure, of equal
    covariance trace, with identical position-momentum blocks, and each
    attaining the maximal coherence for that trace.

    Returns:
        (verdict, list of human-readable failure reasons; empty when true).
    """
    reasons: list[str] = []
    if cov.m != comp1.m or cov.m != comp2.m:
        return False, ["mode counts differ"]
    mix = 0.5 * (comp1.matrix + comp2.matrix)
    if np.max(np.abs(mix - cov.matrix)) > tol:
        reasons.append("covariance is not the equal-weight average of the components")
    for label, comp in (("first", comp1), ("second", comp2)):
        if not is_pure(comp):
            reasons.append(f"{label} component is not pure")
    tr1, tr2 = float(np.trace(comp1.matrix)), float(np.trace(comp2.matrix))
    if abs(tr1 - tr2) > tol:
        reasons.append("component covariance traces differ")
    _, _, xp1 = blocks(comp1)
    _, _, xp2 = blocks(comp2)
    if np.max(np.abs(xp1 - xp2)) > tol:
        reasons.append("component position-momentum blocks differ")
    c_max = max_symplectic_coherence(tr1, comp1.m)
    for label, comp in (("first", comp1), ("second", comp2)):
        if abs(symplectic_coherence(comp) - c_max) > tol * max(1.0, c_max):
            reasons.append(f"{label} component coherence is not maximal for its trace")
    return (not reasons), reasons


def perturbation_bound(c_rho: float, c_sigma: float, E: float, eps: float) -> float:
    """Continuity bound on the coherence difference of two nearby states.

    For states within trace distance ``eps`` and second-moment energy at most
    ``E^2``: ``800 E^2 eps + 40 sqrt(2) E max(sqrt(c_rho), sqrt(c_sigma))
    sqrt(eps)``.  The energy cap is caller-supplied; covariance data alone
    does not determine it.
    """
    if min(c_rho, c_sigma, E, eps) < 0:
        raise ValueError("all arguments must be nonnegative")
    return float(
        800.0 * E * E * eps
        + 40.0 * np.sqrt(2.0) * E * max(np.sqrt(c_rho), np.sqrt(c_sigma)) * np.sqrt(eps)
    )


def trace_distance_cov_bound(E_cap: float, m: int, trace_dist: float) -> float:
    """Frobenius-distance bound between covariance matrices of nearby states.

    ``40 * E_cap * sqrt(m * trace_dist)`` where ``E_cap`` caps the
    second-moment energy of both states.
    """
    if min(E_cap, trace_dist) < 0 or m < 1:
        raise ValueError("arguments must be nonnegative with m >= 1")
    return float(40.0 * E_cap * np.sqrt(m * trace_dist))


class NoGoWitness(NamedTuple):
    """A fixed example where a correlation-free-preserving gate raises coherence.

    The gate ``diag(A, (A^T)^{-1})`` maps the position-momentum block by
    ``B -> A B A^{-1}``, so it maps correlation-free states to
    correlation-free states, yet on this covariance matrix it strictly
    increases the measure.
    """

    cov: CovMat
    gate: SympGate
    coherence_before: float
    coherence_after: float


def active_gate_counterexample() -> NoGoWitness:
    """Stored two-mode witness: a free-set-preserving gate that increases coherence.

    The input covariance is ``2 I`` plus a single unit position-momentum
    correlation between mode 2's position and mode 1's momentum; the shear
    ``A = [[1, 1], [0, 1]]`` maps that block from norm-squared 1 to 4.
    """
    v = 2.0 * np.eye(4)
    v[1, 2] = v[2, 1] = 1.0
    cov = CovMat(v)
    require_valid(cov)
    a = np.array([[1.0, 1.0], [0.0, 1.0]])
    s = np.zeros((4, 4))
    s[:2, :2] = a
    s[2:, 2:] = np.linalg.inv(a.T)
    gate = SympGate(m=2, S=s, disp=np.zeros(4))
    before = symplectic_coherence(cov)
    after = symplectic_coherence(CovMat(gate.S @ v @ gate.S.T))
    return NoGoWitness(cov, gate, before, after)


class SearchOutcome(NamedTuple):
    """Best coherence found by random search plus a description of the argmax."""

    sup_c: float
    argmax: dict


def _coherence_of_params(
    x: np.ndarray, y: np.ndarray, theta: np.ndarray, d: np.ndarray
) -> float:
    """Coherence of the pure state with passive part (X, Y) after per-mode phases."""
    ct, st = np.cos(theta), np.sin(theta)
    xr = x * ct - y * st
    yr = x * st + y * ct
    v_xp = -(xr * d) @ yr.T + (yr / d) @ xr.T
    return float(np.sum(v_xp * v_xp))


def numeric_max_search(
    E: float,
    m: int,
    trials: int,
    seed: int | np.random.Generator = 0,
    refine_passes: int = 3,
) -> SearchOutcome:
    """Randomized search for the largest coherence at fixed covariance trace.

    Samples pure covariance matrices (Haar passive gate times a random
    squeezing spectrum summing to the trace budget), then refines the best
    sample coordinate-wise over per-mode phase angles and squeezing weights
    with a bounded scalar optimizer.  Per-trial RNG streams are derived as
    ``seed XOR trial``, so the running maximum is reproducible and
    independent of evaluation order.

    Args:
        E: covariance trace budget (>= 2m).
        m: mode count.
        trials: number of random samples (>= 1).
        seed: base seed, or a generator used once to draw one.
        refine_passes: coordinate sweeps during local refinement.

    Returns:
        Best coherence found and a description of where it occurred.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if E < 2.0 * m:
        raise ValueError(f"covariance trace must be >= 2m, got E={E}, m={m}")
    if isinstance(seed, np.random.Generator):
        seed = int(seed.integers(0, 2**63))
    if E - 2.0 * m < 1e-15:
        return SearchOutcome(0.0, {"trial": -1, "note": "trace budget forces vacuum"})

    best_c = -1.0
    best = None
    zero_theta = np.zeros(m)
    for trial in range(trials):
        rng = derive_rng(seed, trial)
        d = sample_d(E, m, rng)
        x, y = haar_unitary(m, rng)
        c = _coherence_of_params(x, y, zero_theta, d)
        if c > best_c:
            best_c = c
            best = (trial, x, y, d)

    trial_idx, x, y, d = best
    sample_c = best_c
    theta = np.zeros(m)
    excess = E - 2.0 * m
    weights = np.clip((d + 1.0 / d - 2.0) / excess, 0.0, None)
    weights = weights / weights.sum()

    def eval_at(th: np.ndarray, w: np.ndarray) -> float:
        return _coherence_of_params(x, y, th, spectrum_from_weights(E, m, w))

    for _ in range(refine_passes):
        for i in range(m):
            def neg_theta(t: float) -> float:
                th = theta.copy()
                th[i] = t
                return -eval_at(th, weights)

            res = minimize_scalar(
                neg_theta, bounds=(-np.pi / 2, np.pi / 2), method="bounded"
            )
            if -res.fun > eval_at(theta, weights):
                theta[i] = float(res.x)
        if m > 1:
            for i in range(m):
                rest = weights.sum() - weights[i]

                def neg_weight(t: float) -> float:
                    w = weights.copy()
                    if rest > 0:
                        w *= (1.0 - t) / rest
                    w[i] = t
                    return -eval_at(theta, w / w.sum())

                res = minimize_scalar(neg_weight, bounds=(0.0, 1.0), method="bounded")
                if -res.fun > eval_at(theta, weights):
                    t = float(res.x)
                    if rest > 0:
                        weights *= (1.0 - t) / rest
                    weights[i] = t
                    weights = weights / weights.sum()

    refined_c = eval_at(theta, weights)
    sup_c = max(sample_c, refined_c)
    return SearchOutcome(
        sup_c,
        {
            "trial": trial_idx,
            "sample_coherence": sample_c,
            "refined_coherence": refined_c,
            "theta": theta.tolist(),
            "weights": weights.tolist(),
        },
    )
