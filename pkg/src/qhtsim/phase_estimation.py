"""Analytic simulation of phase-estimation detection and rotation.

All procedures act per eigencomponent of the processed state, using the
exact outcome law of t-bit phase estimation (the squared Dirichlet
kernel).  A dense joint-state circuit simulator validates the analytic
reduction on tiny instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._spectral import orthogonal_spectrum
from .errors import PhaseRangeViolation, TooLarge
from .szegedy import EdgeOperator

MASS_CUT = 1e-13


@dataclass(frozen=True)
class PEConfig:
    """Ancilla width and repetition count for one estimation run."""

    t: int
    r: int

    def __post_init__(self):
        if not 1 <= self.t <= 20:
            raise TooLarge(f"ancilla bits t={self.t} outside [1, 20]")
        if self.r < 1 or self.r % 2 == 0:
            raise ValueError("repetition count must be a positive odd integer")

    @property
    def grid(self) -> int:
        return 1 << self.t

    @classmethod
    def from_targets(cls, delta: float, eps: float) -> "PEConfig":
        """Grid fine enough to separate phases >= delta (radians) from zero.

        2^t >= 2 pi / delta so nonzero phases sit at least one grid step
        from the origin; r = 2 ceil(log2(1/eps)) + 1 repetitions drive the
        per-component error below eps.
        """
        if delta <= 0:
            raise ValueError("precision delta must be positive")
        if not 0.0 < eps < 1.0:
            raise ValueError(f"eps must lie in (0, 1), got {eps}")
        t = max(1, math.ceil(math.log2(2.0 * math.pi / delta)))
        r = 2 * max(0, math.ceil(math.log2(1.0 / eps))) + 1
        return cls(t=t, r=r)


def pe_pmf(alpha: float, t: int) -> np.ndarray:
    """Exact outcome distribution of t-bit phase estimation at phase alpha."""
    if not 1 <= t <= 20:
        raise TooLarge(f"ancilla bits t={t} outside [1, 20]")
    N = 1 << t
    y = np.arange(N)
    d = alpha - 2.0 * np.pi * y / N
    d = np.mod(d + np.pi, 2.0 * np.pi) - np.pi
    out = np.empty(N)
    tiny = np.abs(d) < 1e-14
    out[tiny] = 1.0
    dd = d[~tiny]
    out[~tiny] = (np.sin(N * dd / 2.0) / (N * np.sin(dd / 2.0))) ** 2
    return out


def signed_phase(y: int, t: int) -> float:
    """Map a grid outcome to its signed phase estimate in (-pi, pi]."""
    N = 1 << t
    if not 0 <= y < N:
        raise ValueError(f"outcome {y} outside grid of size {N}")
    val = 2.0 * np.pi * y / N
    return val if val <= np.pi else val - 2.0 * np.pi


def _majority_negative_prob(q_neg: float, r: int) -> float:
    """Probability that more than half of r estimates come out negative."""
    need = r // 2 + 1
    return float(sum(math.comb(r, k) * q_neg**k * (1.0 - q_neg) ** (r - k)
                     for k in range(need, r + 1)))


def _components(M: np.ndarray, psi: np.ndarray):
    """Eigencomponents (phase, coefficient, vector) carrying mass of psi."""
    spec = orthogonal_spectrum(M)
    comps = []
    for phase, vec in spec.eigenpairs():
        c = np.vdot(vec, psi)
        if abs(c) ** 2 > MASS_CUT:
            comps.append((phase, c, vec))
    return comps


def _as_matrix(U) -> np.ndarray:
    return U.M if isinstance(U, EdgeOperator) else np.asarray(U, dtype=float)


@dataclass(frozen=True)
class DetectResult:
    accept_prob: float
    accepted: bool | None
    config: PEConfig


def detect(U, delta: float, eps: float, psi: np.ndarray,
           seed: int | None = None, config: PEConfig | None = None) -> DetectResult:
    """Accept when any of r phase estimates on psi is a nonzero outcome.

    The acceptance probability is exact: each eigencomponent at phase
    alpha contributes mass * (1 - q^r) with q the probability of outcome
    zero.  Components in the 1-eigenspace have q = 1 and never accept.
    """
    cfg = config or PEConfig.from_targets(delta, eps)
    M = _as_matrix(U)
    accept = 0.0
    for phase, c, _ in _components(M, psi):
        q0 = float(pe_pmf(phase, cfg.t)[0])
        accept += abs(c) ** 2 * (1.0 - q0**cfg.r)
    accepted = None
    if seed is not None:
        accepted = bool(np.random.default_rng(seed).random() < accept)
    return DetectResult(accept_prob=accept, accepted=accepted, config=cfg)


def main_detect(U2, mu: np.ndarray, delta: float, eps: float, psi: np.ndarray,
                seed: int | None = None, config: PEConfig | None = None) -> float:
    """Measure against (mu, mu-perp); accept on mu, otherwise run detect."""
    M2 = _as_matrix(U2)
    U = M2 @ (np.eye(len(mu)) - 2.0 * np.outer(mu, mu))
    overlap = complex(np.vdot(mu, psi))
    residual = psi - overlap * mu
    result = detect(U, delta, eps, residual, seed=seed, config=config)
    return abs(overlap) ** 2 + result.accept_prob


@dataclass(frozen=True)
class RotateReport:
    output: np.ndarray
    garbage_norm: float
    distance_to_ideal: float
    config: PEConfig


def rotate(U, delta: float, eps: float, psi: np.ndarray,
           config: PEConfig | None = None,
           phase_cap: float | None = np.pi / 2) -> RotateReport:
    """Majority-vote sign flip of negative-eigenphase components of psi.

    Each component at phase alpha keeps amplitude factor 1 - 2 p(alpha)
    on the ancilla-zero branch, where p is the probability that the
    majority of r signed estimates are negative; the rest of the norm is
    accounted as garbage.  ``phase_cap`` guards the hypothesis that the
    processed components stay clear of the wrap-around at +-pi; pass None
    to run on states with benign small-mass components beyond pi/2.
    """
    cfg = config or PEConfig.from_targets(delta, eps)
    M = _as_matrix(U)
    comps = _components(M, psi)
    if phase_cap is not None:
        worst = max((abs(p) for p, _, _ in comps), default=0.0)
        if worst > phase_cap + 1e-9:
            raise PhaseRangeViolation(
                f"component at phase {worst:.6f} exceeds cap {phase_cap:.6f}")

    N = cfg.grid
    neg = np.array([signed_phase(y, cfg.t) < 0 for y in range(N)])
    output = psi.astype(complex).copy()
    correction_ideal = np.zeros(len(psi), dtype=complex)
    garbage_sq = 0.0
    for phase, c, vec in comps:
        q_neg = float(pe_pmf(phase, cfg.t)[neg].sum())
        p_maj = _majority_negative_prob(q_neg, cfg.r)
        factor = 1.0 - 2.0 * p_maj
        ideal = -1.0 if phase < 0 else 1.0
        output += (factor - 1.0) * c * vec
        correction_ideal += (factor - ideal) * c * vec
        garbage_sq += abs(c) ** 2 * (1.0 - factor**2)
    return RotateReport(output=output,
                        garbage_norm=float(np.sqrt(max(0.0, garbage_sq))),
                        distance_to_ideal=float(np.linalg.norm(correction_ideal)),
                        config=cfg)


def control_test_prob(V, psi: np.ndarray) -> float:
    """Outcome-1 probability of the controlled deviation test: |psi - V psi|^2 / 4."""
    M = _as_matrix(V)
    return float(np.linalg.norm(psi - M @ psi) ** 2 / 4.0)


@dataclass(frozen=True)
class DenseOracleResult:
    detect_accept_prob: float
    rotate_output: np.ndarray
    rotate_garbage_norm: float


def _apply_to_axis(mat: np.ndarray, state: np.ndarray, axis: int) -> np.ndarray:
    moved = np.tensordot(mat, state, axes=([1], [axis]))
    return np.moveaxis(moved, 0, axis)


def dense_oracle(U, config: PEConfig, psi: np.ndarray) -> DenseOracleResult:
    """Joint-state simulation of Detect and Rotate with explicit ancillas.

    Builds the full r-register estimation circuit (Hadamards, controlled
    powers, inverse Fourier transform), measures the all-zero reject
    branch for Detect, and applies flip-then-uncompute for Rotate.
    """
    M = _as_matrix(U)
    d = M.shape[0]
    N = config.grid
    r = config.r
    if d * N**r > 2**22:
        raise TooLarge(f"joint dimension {d * N**r} exceeds 2^22")

    # register transforms
    j, k = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    had = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    H = had.copy()
    for _ in range(config.t - 1):
        H = np.kron(H, had)
    iqft = np.exp(-2j * np.pi * j * k / N) / np.sqrt(N)

    powers = [np.eye(d)]
    for _ in range(N - 1):
        powers.append(powers[-1] @ M)

    def controlled_powers(state: np.ndarray, axis: int, inverse: bool) -> np.ndarray:
        moved = np.moveaxis(state, axis, 0)
        out = np.empty_like(moved)
        for kk in range(N):
            P = powers[kk].T if inverse else powers[kk]
            out[kk] = moved[kk] @ P.T
        return np.moveaxis(out, 0, axis)

    def qpe_forward(state: np.ndarray, axis: int) -> np.ndarray:
        state = _apply_to_axis(H, state, axis)
        state = controlled_powers(state, axis, inverse=False)
        return _apply_to_axis(iqft, state, axis)

    def qpe_backward(state: np.ndarray, axis: int) -> np.ndarray:
        state = _apply_to_axis(iqft.conj().T, state, axis)
        state = controlled_powers(state, axis, inverse=True)
        return _apply_to_axis(H, state, axis)

    state = np.zeros((N,) * r + (d,), dtype=complex)
    state[(0,) * r] = psi
    for reg in range(r):
        state = qpe_forward(state, reg)

    zero_slab = state[(0,) * r]
    norm_sq = float(np.real(np.vdot(psi, psi)))
    detect_accept = norm_sq - float(np.real(np.vdot(zero_slab, zero_slab)))

    # majority phase flip, then uncompute every register
    neg = np.array([signed_phase(y, config.t) < 0 for y in range(N)])
    counts = np.zeros((N,) * r)
    for reg in range(r):
        shape = [1] * r
        shape[reg] = N
        counts = counts + neg.astype(float).reshape(shape)
    flip = np.where(counts > r / 2.0, -1.0, 1.0)
    state = state * flip[..., None]
    for reg in reversed(range(r)):
        state = qpe_backward(state, reg)

    rotate_output = state[(0,) * r].copy()
    garbage = float(np.sqrt(max(0.0, norm_sq
                                - float(np.real(np.vdot(rotate_output,
                                                        rotate_output))))))
    return DenseOracleResult(detect_accept_prob=detect_accept,
                             rotate_output=rotate_output,
                             rotate_garbage_norm=garbage)
