"""Fixed-trace ensembles of pure Gaussian states and Haar moment checks.

The ensembles draw a squeezing spectrum ``d`` with ``sum(d_i + 1/d_i) = E``
and a Haar passive gate; the "orthogonal" kind uses ``S = diag(O, O)``
(no position-momentum correlations by construction), the "unitary" kind the
full passive family ``S = [[X, Y], [-Y, X]]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .gaussian_core import CovMat
from .symplectic_ops import (
    derive_rng,
    haar_orthogonal,
    haar_orthogonal_batch,
    haar_unitary,
    haar_unitary_batch,
)

KINDS = ("orthogonal", "unitary")


@dataclass(frozen=True)
class EnsembleConfig:
    """Sampling parameters for a fixed-trace pure-state ensemble.

    Attributes:
        m: mode count.
        E: covariance-matrix trace of every sample (E >= 2m).
        n_samples: number of Monte-Carlo samples.
        seed: base RNG seed; sample i uses the stream ``seed XOR i``.
        kind: "orthogonal" or "unitary".
    """

    m: int
    E: float
    n_samples: int
    seed: int
    kind: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.m < 1:
            raise ValueError(f"mode count must be >= 1, got {self.m}")
        if self.E < 2 * self.m:
            raise ValueError(f"need E >= 2m, got E={self.E}, m={self.m}")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")


@dataclass(frozen=True)
class EnsembleStats:
    """Monte-Carlo summary of the first-mode squared symplectic eigenvalue.

    Attributes:
        mean_nu_sq: Monte-Carlo mean of nu_1^2.
        stderr: standard error of that mean.
        s1_hat: Monte-Carlo mean of ``sum_{i!=j} d_i/d_j + d_j/d_i``.
        s2_hat: Monte-Carlo mean of ``sum_{i!=j} d_i d_j + 1/(d_i d_j)``.
        analytic_mean: closed-form ensemble mean evaluated at s1_hat/s2_hat.
        stderr_diff: standard error of the per-sample difference
            ``nu_1^2(i) - analytic(i)`` (the right scale for comparing
            mean_nu_sq with analytic_mean, since both share the sampled
            spectra).
    """

    mean_nu_sq: float
    stderr: float
    s1_hat: float
    s2_hat: float
    analytic_mean: float
    stderr_diff: float
    n_samples: int
    kind: str
    m: int
    E: float


def spectrum_from_weights(E: float, m: int, weights: np.ndarray) -> np.ndarray:
    """Squeezing spectrum ``d`` from nonnegative weights summing to 1.

    With ``x_i = (E - 2m) w_i`` the solution of ``d_i + 1/d_i = 2 + x_i``
    with ``d_i >= 1`` is ``d_i = 1 + x_i/2 + sqrt(x_i + x_i^2/4)``, which
    enforces ``sum(d_i + 1/d_i) = E`` exactly.
    """
    weights = np.asarray(weights, dtype=float)
    x = (E - 2 * m) * weights
    return 1.0 + x / 2.0 + np.sqrt(x + x * x / 4.0)


def sample_d(E: float, m: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a squeezing spectrum with ``d_i >= 1`` and ``sum(d_i + 1/d_i) = E``.

    The weights come from a point drawn uniformly on the unit (m-1)-sphere:
    ``w_i`` are the squared coordinates, so ``sum w_i = 1`` exactly.
    """
    if E < 2 * m:
        raise ValueError(f"need E >= 2m, got E={E}, m={m}")
    g = rng.standard_normal(m)
    norm = float(np.linalg.norm(g))
    while norm == 0.0:  # pragma: no cover - probability zero
        g = rng.standard_normal(m)
        norm = float(np.linalg.norm(g))
    w = (g / norm) ** 2
    return spectrum_from_weights(E, m, w)


def pure_cm_from_orthogonal(o: np.ndarray, d: np.ndarray) -> CovMat:
    """Assemble ``diag(O,O) diag(d, 1/d) diag(O,O)^T`` with an exactly zero qp block."""
    m = o.shape[0]
    v_x = (o * d) @ o.T
    v_p = (o / d) @ o.T
    full = np.zeros((2 * m, 2 * m))
    full[:m, :m] = 0.5 * (v_x + v_x.T)
    full[m:, m:] = 0.5 * (v_p + v_p.T)
    return CovMat(full)


def pure_cm_from_passive(x: np.ndarray, y: np.ndarray, d: np.ndarray) -> CovMat:
    """Assemble ``S_U diag(d, 1/d) S_U^T`` for ``S_U = [[X, Y], [-Y, X]]``."""
    m = x.shape[0]
    v_x = (x * d) @ x.T + (y / d) @ y.T
    v_p = (y * d) @ y.T + (x / d) @ x.T
    v_xp = -(x * d) @ y.T + (y / d) @ x.T
    full = np.empty((2 * m, 2 * m))
    full[:m, :m] = 0.5 * (v_x + v_x.T)
    full[m:, m:] = 0.5 * (v_p + v_p.T)
    full[:m, m:] = v_xp
    full[m:, :m] = v_xp.T
    return CovMat(full)


def sample_pure_cm(config: EnsembleConfig, rng: np.random.Generator) -> CovMat:
    """Draw one pure covariance matrix with trace ``config.E``.

    The orthogonal kind has a structurally zero position-momentum block, so
    its samples carry no position-momentum correlations at all.
    """
    d = sample_d(config.E, config.m, rng)
    if config.kind == "orthogonal":
        return pure_cm_from_orthogonal(haar_orthogonal(config.m, rng), d)
    x, y = haar_unitary(config.m, rng)
    return pure_cm_from_passive(x, y, d)


def _pair_sums(d: np.ndarray) -> tuple[float, float]:
    """``sum_{i!=j} d_i/d_j + d_j/d_i`` and ``sum_{i!=j} d_i d_j + 1/(d_i d_j)``."""
    m = d.shape[0]
    ratio = np.outer(d, 1.0 / d)
    prod = np.outer(d, d)
    s1 = float(ratio.sum() + ratio.T.sum() - 2 * m)
    s2 = float(prod.sum() + (1.0 / prod).sum() - np.sum(d * d) - np.sum(1.0 / (d * d)))
    return s1, s2


def analytic_mean_nu_sq(kind: str, m: int, s1: float, s2: float) -> float:
    """Closed-form ensemble mean of nu_1^2 given the spectrum statistics."""
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    if kind == "orthogonal":
        return 3.0 / (m + 2) + s1 / (2.0 * m * (m + 2))
    return 2.0 / (m + 1) + (s1 + s2) / (4.0 * m * (m + 1))


def ensemble_nu_sq(
    config: EnsembleConfig, return_samples: bool = False
) -> EnsembleStats | tuple[EnsembleStats, np.ndarray, np.ndarray]:
    """Monte-Carlo mean of the first-mode nu^2 over the ensemble.

    Per-sample streams are derived as ``seed XOR index`` so the result does
    not depend on evaluation order or worker count.

    Args:
        config: ensemble parameters.
        return_samples: also return per-sample arrays (nu_1^2, coherence).

    Returns:
        The statistics, plus the two per-sample arrays when requested.
    """
    n = config.n_samples
    m = config.m
    nu_sq = np.empty(n)
    coh = np.empty(n)
    analytic = np.empty(n)
    s1_arr = np.empty(n)
    s2_arr = np.empty(n)
    for i in range(n):
        rng = derive_rng(config.seed, i)
        d = sample_d(config.E, m, rng)
        if config.kind == "orthogonal":
            o = haar_orthogonal(m, rng)
            sx = float((o[0] * d) @ o[0])
            sp = float((o[0] / d) @ o[0])
            nu_sq[i] = sx * sp
            coh[i] = 0.0
        else:
            x, y = haar_unitary(m, rng)
            v = pure_cm_from_passive(x, y, d).matrix
            nu_sq[i] = v[0, 0] * v[m, m] - v[0, m] ** 2
            coh[i] = float(np.sum(v[:m, m:] ** 2))
        s1_arr[i], s2_arr[i] = _pair_sums(d)
        analytic[i] = analytic_mean_nu_sq(config.kind, m, s1_arr[i], s2_arr[i])

    mean = float(np.mean(nu_sq))
    stderr = float(np.std(nu_sq, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    diff = nu_sq - analytic
    stderr_diff = float(np.std(diff, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    stats = EnsembleStats(
        mean_nu_sq=mean,
        stderr=stderr,
        s1_hat=float(np.mean(s1_arr)),
        s2_hat=float(np.mean(s2_arr)),
        analytic_mean=analytic_mean_nu_sq(
            config.kind, m, float(np.mean(s1_arr)), float(np.mean(s2_arr))
        ),
        stderr_diff=stderr_diff,
        n_samples=n,
        kind=config.kind,
        m=m,
        E=config.E,
    )
    if return_samples:
        return stats, nu_sq, coh
    return stats


@dataclass(frozen=True)
class MomentCheck:
    """One estimated Haar fourth moment against its closed form."""

    kind: str
    name: str
    estimate: float
    exact: float
    stderr: float

    @property
    def n_sigma(self) -> float:
        if self.stderr == 0.0:
            return 0.0 if self.estimate == self.exact else float("inf")
        return abs(self.estimate - self.exact) / self.stderr


def _rows(samples: np.ndarray, kind: str, m: int) -> Iterable[MomentCheck]:
    """Moment rows for one kind given first-row samples (n x m, or complex)."""

    def check(name: str, values: np.ndarray, exact: float) -> MomentCheck:
        est = float(np.mean(values))
        se = float(np.std(values, ddof=1) / np.sqrt(values.shape[0]))
        return MomentCheck(kind, name, est, exact, se)

    if kind == "orthogonal":
        o1, o2 = samples[:, 0], samples[:, 1]
        denom = m * (m + 2)
        yield check("E[O_1i^2 O_1i^2]", o1**4, 3.0 / denom)
        yield check("E[O_1i^2 O_1j^2], i!=j", o1**2 * o2**2, 1.0 / denom)
    else:
        x1, y1 = samples[:, 0].real, samples[:, 0].imag
        x2, y2 = samples[:, 1].real, samples[:, 1].imag
        denom = 4.0 * m * (m + 1)
        yield check("E[X_1i^2 X_1i^2]", x1**4, 3.0 / denom)
        yield check("E[X_1i^2 X_1j^2], i!=j", x1**2 * x2**2, 1.0 / denom)
        yield check("E[Y_1i^2 Y_1i^2]", y1**4, 3.0 / denom)
        yield check("E[Y_1i^2 Y_1j^2], i!=j", y1**2 * y2**2, 1.0 / denom)
        yield check("E[X_1i^2 Y_1i^2]", x1**2 * y1**2, 1.0 / denom)
        yield check("E[X_1i^2 Y_1j^2], i!=j", x1**2 * y2**2, 1.0 / denom)
        yield check("E[X_1i Y_1i X_1j Y_1j], i!=j", x1 * y1 * x2 * y2, 0.0)


def haar_moment_check(
    m: int,
    n_samples: int,
    rng: np.random.Generator,
    kinds: tuple[str, ...] = KINDS,
    batch: int = 20_000,
) -> list[MomentCheck]:
    """Estimate the fourth moments of Haar first rows against closed forms.

    Args:
        m: matrix size (needs m >= 2 for the i != j rows).
        n_samples: Monte-Carlo sample count (>= 1000).
        rng: random generator (consumed sequentially; sampling is batched).
        kinds: which ensembles to check.
        batch: QR batch size.

    Returns:
        One row per moment with estimate, exact value and standard error.
    """
    if n_samples < 1000:
        raise ValueError("need at least 1000 samples for a meaningful check")
    if m < 2:
        raise ValueError("moment table needs m >= 2")
    out: list[MomentCheck] = []
    for kind in kinds:
        rows = []
        remaining = n_samples
        while remaining > 0:
            k = min(batch, remaining)
            if kind == "orthogonal":
                mats = haar_orthogonal_batch(m, k, rng)
            else:
                mats = haar_unitary_batch(m, k, rng)
            rows.append(mats[:, 0, :])
            remaining -= k
        first_rows = np.concatenate(rows, axis=0)
        out.extend(_rows(first_rows, kind, m))
    return out


def entanglement_entropy(nu: float) -> float:
    """Entropy of a symplectic eigenvalue.

    ``h(nu) = ((nu+1)/2) ln((nu+1)/2) - ((nu-1)/2) ln((nu-1)/2)`` with the
    analytic limit h(1) = 0.

    Args:
        nu: symplectic eigenvalue, must be >= 1.
    """
    if nu < 1.0:
        raise ValueError(f"symplectic eigenvalue must be >= 1, got {nu}")
    if nu - 1.0 < 1e-12:
        return 0.0
    up, down = (nu + 1.0) / 2.0, (nu - 1.0) / 2.0
    return float(up * np.log(up) - down * np.log(down))
