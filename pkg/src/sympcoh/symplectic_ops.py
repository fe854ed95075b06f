"""Symplectic gates, Gaussian channels, tensor/trace plumbing, Haar samplers.

A gate is a pair ``(S, disp)`` acting on Gaussian states as
``V -> S V S^T``, ``d -> S d + disp``. All constructors return matrices
satisfying ``S Omega S^T = Omega`` within 1e-9 (Frobenius).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gaussian_core import (
    CovMat,
    DimensionError,
    GaussianState,
    blocks,
    require_valid,
    symplectic_form,
)

SYMPLECTIC_TOL = 1e-9


class GateError(ValueError):
    """Raised for non-symplectic, non-orthogonal or out-of-range gate input."""


def derive_rng(seed: int, index: int) -> np.random.Generator:
    """Independent per-index RNG stream: ``default_rng(seed XOR index)``.

    Used by every Monte-Carlo loop so results are a deterministic function of
    (seed, index) and independent of worker count or evaluation order.
    """
    return np.random.default_rng((int(seed) ^ int(index)) & 0xFFFFFFFFFFFFFFFF)


def is_symplectic(s: np.ndarray, tol: float = SYMPLECTIC_TOL) -> bool:
    """True iff ``S Omega S^T = Omega`` within ``tol`` in Frobenius norm."""
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
        return False
    omega = symplectic_form(s.shape[0] // 2)
    return float(np.linalg.norm(s @ omega @ s.T - omega)) <= tol


@dataclass(frozen=True)
class SympGate:
    """A symplectic matrix plus displacement, acting on m modes."""

    m: int
    S: np.ndarray
    disp: np.ndarray = field(default=None)

    def __post_init__(self):
        s = np.array(self.S, dtype=float)
        if s.shape != (2 * self.m, 2 * self.m):
            raise DimensionError(
                f"gate matrix must be {2 * self.m} x {2 * self.m}, got {s.shape}"
            )
        if not is_symplectic(s):
            raise GateError("gate matrix is not symplectic (S Omega S^T != Omega)")
        disp = self.disp
        if disp is None:
            disp = np.zeros(2 * self.m)
        disp = np.array(disp, dtype=float).reshape(-1)
        if disp.shape[0] != 2 * self.m:
            raise DimensionError(
                f"displacement must have length {2 * self.m}, got {disp.shape[0]}"
            )
        s.flags.writeable = False
        disp.flags.writeable = False
        object.__setattr__(self, "S", s)
        object.__setattr__(self, "disp", disp)


def _check_mode(m: int, mode: int) -> None:
    if not 1 <= mode <= m:
        raise GateError(f"mode index {mode} out of range 1..{m}")


def squeezer(m: int, mode: int, r: float) -> SympGate:
    """Single-mode squeezer: ``diag(e^r, e^-r)`` on (q_mode, p_mode).

    Args:
        m: total mode count.
        mode: 1-based target mode.
        r: squeezing parameter (r = 0 is the identity).
    """
    _check_mode(m, mode)
    s = np.eye(2 * m)
    i = mode - 1
    s[i, i] = np.exp(r)
    s[m + i, m + i] = np.exp(-r)
    return SympGate(m, s)


def phase_shifter(m: int, mode: int, theta: float) -> SympGate:
    """Phase shifter ``[[cos t, sin t], [-sin t, cos t]]`` on one mode."""
    _check_mode(m, mode)
    s = np.eye(2 * m)
    i = mode - 1
    c, sn = np.cos(theta), np.sin(theta)
    s[i, i] = c
    s[i, m + i] = sn
    s[m + i, i] = -sn
    s[m + i, m + i] = c
    return SympGate(m, s)


def block_orthogonal(o: np.ndarray) -> SympGate:
    """Gate ``S = diag(O, O)`` for an m x m orthogonal matrix O."""
    o = np.asarray(o, dtype=float)
    if o.ndim != 2 or o.shape[0] != o.shape[1]:
        raise DimensionError(f"orthogonal matrix must be square, got {o.shape}")
    m = o.shape[0]
    if float(np.linalg.norm(o @ o.T - np.eye(m))) > SYMPLECTIC_TOL:
        raise GateError("matrix is not orthogonal (O O^T != I)")
    s = np.zeros((2 * m, 2 * m))
    s[:m, :m] = o
    s[m:, m:] = o
    return SympGate(m, s)


def passive_from_unitary(x: np.ndarray, y: np.ndarray) -> SympGate:
    """Passive gate ``S = [[X, Y], [-Y, X]]`` with ``X + iY`` unitary."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionError("X and Y must be square matrices of equal size")
    m = x.shape[0]
    u = x + 1j * y
    if float(np.linalg.norm(u @ u.conj().T - np.eye(m))) > SYMPLECTIC_TOL:
        raise GateError("X + iY is not unitary")
    s = np.zeros((2 * m, 2 * m))
    s[:m, :m] = x
    s[:m, m:] = y
    s[m:, :m] = -y
    s[m:, m:] = x
    return SympGate(m, s)


def displacement(m: int, d: Sequence[float]) -> SympGate:
    """Displacement gate: identity matrix, first moments shifted by ``d``."""
    d = np.asarray(d, dtype=float).reshape(-1)
    if d.shape[0] != 2 * m:
        raise DimensionError(f"displacement must have length {2 * m}, got {d.shape[0]}")
    return SympGate(m, np.eye(2 * m), d)


def compose(outer: SympGate, inner: SympGate) -> SympGate:
    """Gate equal to applying ``inner`` first, then ``outer``."""
    if outer.m != inner.m:
        raise DimensionError("cannot compose gates on different mode counts")
    return SympGate(outer.m, outer.S @ inner.S, outer.S @ inner.disp + outer.disp)


def apply(gate: SympGate, state: GaussianState) -> GaussianState:
    """Apply a gate: ``V -> S V S^T``, ``d -> S d + disp``; revalidates output."""
    if gate.m != state.m:
        raise DimensionError(
            f"gate acts on {gate.m} modes but state has {state.m}"
        )
    v = gate.S @ state.cov.matrix @ gate.S.T
    v = 0.5 * (v + v.T)
    cov = require_valid(CovMat(v))
    return GaussianState(cov, gate.S @ state.d + gate.disp)


def pure_gaussian_cm(s_u: SympGate, r: Sequence[float]) -> CovMat:
    """Pure-state covariance matrix ``S_U diag(Z^2, Z^-2) S_U^T``.

    Args:
        s_u: a passive (orthogonal symplectic) gate.
        r: length-m squeezing parameters; ``Z^2 = diag(e^{2 r_i})``.

    Returns:
        A pure covariance matrix with trace ``sum(e^{2r_i} + e^{-2r_i})``.
    """
    m = s_u.m
    if float(np.linalg.norm(s_u.S @ s_u.S.T - np.eye(2 * m))) > SYMPLECTIC_TOL:
        raise GateError("pure-state constructor needs an orthogonal (passive) gate")
    r = np.asarray(r, dtype=float).reshape(-1)
    if r.shape[0] != m:
        raise DimensionError(f"need {m} squeezing parameters, got {r.shape[0]}")
    core = np.concatenate([np.exp(2 * r), np.exp(-2 * r)])
    v = (s_u.S * core) @ s_u.S.T
    return CovMat(0.5 * (v + v.T))


def apply_loss(cov: CovMat, eta: float) -> CovMat:
    """Pure photon loss on the covariance matrix: ``V -> eta V + (1-eta) I``."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmissivity must be in [0, 1], got {eta}")
    return CovMat(eta * cov.matrix + (1.0 - eta) * np.eye(2 * cov.m))


def apply_loss_state(state: GaussianState, eta: float) -> GaussianState:
    """Pure photon loss on a state; first moments scale by sqrt(eta)."""
    return GaussianState(apply_loss(state.cov, eta), np.sqrt(eta) * state.d)


@dataclass(frozen=True)
class LossChannel:
    """Pure photon loss with transmissivity ``eta``."""

    eta: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"transmissivity must be in [0, 1], got {self.eta}")

    def apply_to(self, state: GaussianState) -> GaussianState:
        return apply_loss_state(state, self.eta)


@dataclass(frozen=True)
class IdentityChannel:
    """The do-nothing channel."""

    def apply_to(self, state: GaussianState) -> GaussianState:
        return state


def interleave_permutation(m_a: int, m_b: int) -> np.ndarray:
    """Permutation taking ``(q_A p_A q_B p_B)`` to ``(q_A q_B p_A p_B)``.

    Returns:
        A (2(m_a+m_b))-square permutation matrix ``P`` so that the direct sum
        of two qqpp covariance matrices, conjugated by ``P``, is again qqpp.
    """
    m = m_a + m_b
    src = (
        list(range(0, m_a))                         # q_A
        + list(range(2 * m_a, 2 * m_a + m_b))       # q_B
        + list(range(m_a, 2 * m_a))                 # p_A
        + list(range(2 * m_a + m_b, 2 * m))         # p_B
    )
    p = np.zeros((2 * m, 2 * m))
    p[np.arange(2 * m), src] = 1.0
    return p


def tensor_cm(a: CovMat, b: CovMat) -> CovMat:
    """Tensor product of covariance matrices, preserving qqpp ordering."""
    ds = np.zeros((2 * (a.m + b.m), 2 * (a.m + b.m)))
    ds[: 2 * a.m, : 2 * a.m] = a.matrix
    ds[2 * a.m :, 2 * a.m :] = b.matrix
    p = interleave_permutation(a.m, b.m)
    return CovMat(p @ ds @ p.T)


def tensor_states(a: GaussianState, b: GaussianState) -> GaussianState:
    """Tensor product of Gaussian states, preserving qqpp ordering."""
    p = interleave_permutation(a.m, b.m)
    return GaussianState(tensor_cm(a.cov, b.cov), p @ np.concatenate([a.d, b.d]))


def partial_trace(state: GaussianState, keep: Sequence[int]) -> GaussianState:
    """Keep a subset of modes (1-based indices) by row/column selection."""
    m = state.m
    keep = list(keep)
    if not keep or any(not 1 <= k <= m for k in keep) or len(set(keep)) != len(keep):
        raise DimensionError(f"kept modes must be distinct indices in 1..{m}")
    idx = np.array([k - 1 for k in keep] + [m + k - 1 for k in keep])
    return GaussianState(
        CovMat(state.cov.matrix[np.ix_(idx, idx)]), state.d[idx]
    )


def orthogonal_stinespring(
    state: GaussianState,
    o: np.ndarray,
    env: CovMat,
    d: Sequence[float] | None = None,
    free_tol: float = 1e-10,
) -> GaussianState:
    """Dilated free channel: tensor a free environment, rotate, displace, trace.

    Args:
        state: m-mode input state.
        o: (m+k) x (m+k) orthogonal matrix applied as ``diag(O, O)``.
        env: covariance matrix of a k-mode free state (zero qp block).
        d: optional length-2(m+k) displacement applied after the rotation.
        free_tol: max-abs tolerance on the environment's qp block.

    Returns:
        The output state on the first m modes.
    """
    _, _, env_xp = blocks(env)
    if float(np.max(np.abs(env_xp))) > free_tol:
        raise GateError("environment is not free (nonzero position-momentum block)")
    total = tensor_states(state, GaussianState(env))
    gate = block_orthogonal(o)
    if d is not None:
        gate = SympGate(gate.m, gate.S, d)
    rotated = apply(gate, total)
    return partial_trace(rotated, range(1, state.m + 1))


def beamsplitter_orthogonal(eta: float) -> np.ndarray:
    """2x2 beam-splitter mixing matrix ``[[√eta, √(1-eta)], [-√(1-eta), √eta]]``.

    Used as the orthogonal part of the dilation realizing pure loss with a
    one-mode vacuum environment.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmissivity must be in [0, 1], got {eta}")
    root_t, root_r = np.sqrt(eta), np.sqrt(1.0 - eta)
    return np.array([[root_t, root_r], [-root_r, root_t]])


@dataclass(frozen=True)
class StinespringChannel:
    """Channel defined by an orthogonal dilation (rotation, env, displacement)."""

    o: np.ndarray
    env: CovMat
    d: np.ndarray = None

    def apply_to(self, state: GaussianState) -> GaussianState:
        return orthogonal_stinespring(state, self.o, self.env, self.d)


# ---------------------------------------------------------------------------
# Haar samplers (QR with sign/phase correction)
# ---------------------------------------------------------------------------


def haar_orthogonal(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random m x m orthogonal matrix.

    QR decomposition of an i.i.d. standard-normal matrix with the diagonal of
    R sign-corrected, which makes the distribution exactly Haar.
    """
    z = rng.standard_normal((m, m))
    q, r = np.linalg.qr(z)
    signs = np.sign(np.diagonal(r))
    signs[signs == 0] = 1.0
    return q * signs


def haar_unitary(m: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Haar-random m x m unitary, returned as real/imag parts ``(X, Y)``.

    QR decomposition of a complex Ginibre matrix with the diagonal of R
    phase-corrected.
    """
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    phases = diag / np.abs(diag)
    u = q * phases
    return u.real.copy(), u.imag.copy()


def haar_orthogonal_batch(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of ``n`` Haar orthogonal matrices via batched QR (shape n x m x m)."""
    z = rng.standard_normal((n, m, m))
    q, r = np.linalg.qr(z)
    signs = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    signs[signs == 0] = 1.0
    return q * signs[:, None, :]


def haar_unitary_batch(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Stack of ``n`` Haar unitary matrices via batched QR (complex, n x m x m)."""
    z = (rng.standard_normal((n, m, m)) + 1j * rng.standard_normal((n, m, m))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[:, None, :]
