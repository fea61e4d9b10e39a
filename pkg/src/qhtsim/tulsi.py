"""Ancilla-rotated search operator on the doubled edge space.

A one-qubit register rotated by theta is prepended to the search space;
the modified operator keeps the original secular structure with target
coefficients scaled by cos(theta) and a fresh -1 component of weight
sin(theta).  The rotation angle is chosen so the principal eigenphase
drops by at most a constant factor while the principal eigenvector norm
stays comparable, which boosts the rotated output's overlap with the
target to a constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chains import MarkovChain
from .errors import MinusOnePresent, NonPositiveEigenvalue
from .phase_estimation import PEConfig, rotate
from .quantum import qht_eps
from .search import (TargetDecomposition, decompose_target, eigvec_w,
                     initial_coefficients, secular_phases, u_rotation)
from .szegedy import EdgeOperator, search_operator

MINUS_ONE_TOL = 1e-8


def _extend(dec: TargetDecomposition, theta: float) -> TargetDecomposition:
    """Target decomposition of |1>|mu> against the ancilla-rotated walk."""
    if dec.a_minus1 > MINUS_ONE_TOL:
        raise MinusOnePresent(
            f"target has -1 weight {dec.a_minus1:.3e}; lazify the chain")
    d = len(dec.mu)
    c, s = math.cos(theta), math.sin(theta)
    ket_theta = np.array([c, -s])
    ket_perp = np.array([s, c])
    mu_ext = np.concatenate([np.zeros(d), dec.mu])
    phi0_ext = np.kron(ket_perp, dec.phi0) if dec.phi0 is not None else None
    phis = tuple(np.kron(ket_perp, p) for p in dec.phi_plus)
    pairs = tuple((t, a * c) for t, a in dec.pairs)
    if s > 0.0:
        a_minus1 = s
        phi_minus1 = -np.kron(ket_theta, dec.mu)
    else:
        a_minus1 = 0.0
        phi_minus1 = None
    return TargetDecomposition(mu=mu_ext, a0=dec.a0 * c, pairs=pairs,
                               a_minus1=a_minus1, phi0=phi0_ext,
                               phi_plus=phis, phi_minus1=phi_minus1,
                               multiplicities=dec.multiplicities)


@dataclass(frozen=True)
class TulsiOperator:
    """The doubled-space search operator and its analytic decomposition."""

    theta: float
    T: np.ndarray
    U1_ext: np.ndarray
    U2_ext: np.ndarray
    mu_ext: np.ndarray
    start_ext: np.ndarray
    dec_ext: TargetDecomposition
    dec_base: TargetDecomposition

    @property
    def dim(self) -> int:
        return self.T.shape[0]


def _recover_target(U1: np.ndarray) -> np.ndarray:
    R = 0.5 * (np.eye(U1.shape[0]) - U1)
    idx = int(np.argmax(np.diag(R)))
    if R[idx, idx] <= 0:
        raise ValueError("U1 is not a rank-one reflection")
    mu = R[:, idx] / np.sqrt(R[idx, idx])
    assert np.max(np.abs(R - np.outer(mu, mu))) <= 1e-10, \
        "U1 is not of the form I - 2|mu><mu|"
    return mu


def build_T(U1, U2, theta: float) -> TulsiOperator:
    """Assemble the rotated operator T = U2_theta U1_theta.

    The target must not overlap any -1 eigenvector of U2; inert -1
    junk orthogonal to the target space is harmless and ignored.
    """
    if not 0.0 <= theta < np.pi / 2:
        raise ValueError(f"theta must lie in [0, pi/2), got {theta}")
    M1 = U1.M if isinstance(U1, EdgeOperator) else np.asarray(U1, dtype=float)
    M2 = U2.M if isinstance(U2, EdgeOperator) else np.asarray(U2, dtype=float)
    mu = _recover_target(M1)
    dec = decompose_target(M2, mu)
    dec_ext = _extend(dec, theta)

    d = M2.shape[0]
    c, s = math.cos(theta), math.sin(theta)
    ket_theta = np.array([c, -s])
    ket_perp = np.array([s, c])
    U1_ext = np.kron(np.diag([1.0, 0.0]), np.eye(d)) + np.kron(np.diag([0.0, 1.0]), M1)
    U2_ext = (np.kron(np.outer(ket_theta, ket_theta), -np.eye(d))
              + np.kron(np.outer(ket_perp, ket_perp), M2))
    T = U2_ext @ U1_ext

    start = dec.start_state if dec.a0 > 0 else dec.phi0
    start_ext = np.kron(ket_perp, start)
    return TulsiOperator(theta=theta, T=T, U1_ext=U1_ext, U2_ext=U2_ext,
                         mu_ext=dec_ext.mu, start_ext=start_ext,
                         dec_ext=dec_ext, dec_base=dec)


def theta_star(a0: float, alpha1: float) -> float:
    """Rotation angle with tan(theta) = a0 cot(alpha1 / 2) / 10."""
    return math.atan(a0 / math.tan(alpha1 / 2.0) / 10.0)


def tulsi_roots(dec: TargetDecomposition, theta: float) -> np.ndarray:
    """All positive eigenphases of the rotated operator carrying target mass."""
    return secular_phases(_extend(dec, theta))


def tulsi_secular(dec: TargetDecomposition, theta: float) -> float:
    """Smallest positive eigenphase of the rotated operator.

    The root is unique in (0, alpha_1]; when theta respects the design
    bound tan(theta) <= a0 cot(alpha1/2)/10 the principal cotangent grows
    by at most 1%, and for alpha_1 <= pi/4 the phase drops by at most the
    factor 0.78.
    """
    alpha1 = float(secular_phases(dec)[0])
    root = float(tulsi_roots(dec, theta)[0])
    assert root <= alpha1 + 1e-12, "rotated principal phase exceeded alpha1"
    if math.tan(theta) <= dec.a0 / math.tan(alpha1 / 2.0) / 10.0 + 1e-12:
        cot_ratio = (1.0 / math.tan(root / 2.0)) / (1.0 / math.tan(alpha1 / 2.0))
        assert cot_ratio <= 1.01 + 1e-9, f"cot growth {cot_ratio} above 1.01"
        if alpha1 <= np.pi / 4:
            assert root >= 0.78 * alpha1 - 1e-9, \
                f"principal phase {root} below 0.78 * {alpha1}"
    return root


def tulsi_eigvec(dec: TargetDecomposition, theta: float, alpha: float) -> np.ndarray:
    """Unnormalized eigenvector of the rotated operator at a secular root."""
    return eigvec_w(_extend(dec, theta), alpha)


@dataclass(frozen=True)
class FindReport:
    chain_id: str
    z: int
    eps: float
    theta: float
    alpha1: float
    alpha1_theta: float
    t_steps: float
    overlap_closed_form: float
    overlap_simulated: float
    overlap_exact_rotation: float
    rotate_distance: float
    in_hypothesis: bool

    def as_dict(self) -> dict:
        return {
            "chain": self.chain_id, "z": self.z, "eps": self.eps,
            "theta": self.theta, "alpha1": self.alpha1,
            "alpha1_theta": self.alpha1_theta, "t_steps": self.t_steps,
            "overlap_closed_form": self.overlap_closed_form,
            "overlap_simulated": self.overlap_simulated,
            "overlap_exact_rotation": self.overlap_exact_rotation,
            "rotate_distance": self.rotate_distance,
            "in_hypothesis": self.in_hypothesis,
        }


def find_experiment(chain: MarkovChain, z: int, eps: float,
                    force_theta: float | None = None) -> FindReport:
    """Run the rotated finding procedure end to end on one marked state.

    Prepares the ancilla-rotated start state, applies the majority-vote
    rotation with precision 1/T for T = max(1, QHT_eps / 0.78) and error
    budget 1/4, and reports the output's overlap with the extended target
    next to the closed-form and exact-rotation values.
    """
    if not 0.0 < eps <= 0.5:
        raise ValueError(f"eps must lie in (0, 1/2], got {eps}")
    low = chain.eigenvalues()[0]
    if low < -1e-9:
        raise NonPositiveEigenvalue(
            f"chain eigenvalue {low:.3e} below zero; lazify first")

    U2, U1, _, mu = search_operator(chain, z)
    dec = decompose_target(U2, mu)
    roots = secular_phases(dec)
    alpha1 = float(roots[0])
    theta = theta_star(dec.a0, alpha1) if force_theta is None else force_theta
    top = build_T(U1, U2, theta)

    ext_roots = tulsi_roots(dec, theta)
    alpha1_theta = float(ext_roots[0])

    qeps = qht_eps(U2, mu, eps)
    t_steps = max(1.0, qeps / 0.78)
    cfg = PEConfig.from_targets(1.0 / t_steps, 0.25)
    report = rotate(top.T, 1.0 / t_steps, 0.25, top.start_ext,
                    config=cfg, phase_cap=None)
    overlap_sim = float(abs(np.vdot(top.mu_ext, report.output)))

    closed = 0.0
    for alpha in ext_roots:
        if abs(alpha - np.pi) <= 1e-12:
            continue
        w = tulsi_eigvec(dec, theta, alpha)
        closed += (1.0 / math.tan(alpha / 2.0)) / float(np.linalg.norm(w) ** 2)
    closed *= 2.0 * dec.a0 * math.cos(theta)

    exact = float(abs(np.vdot(top.mu_ext, u_rotation(top.T, top.start_ext))))

    system = initial_coefficients(dec, roots)
    proj_sq = 2.0 * float(system.deltas[0]) ** 2
    in_hyp = proj_sq >= 1.0 - eps - 1e-9

    return FindReport(chain_id=chain.chain_id(), z=z, eps=eps, theta=theta,
                      alpha1=alpha1, alpha1_theta=alpha1_theta,
                      t_steps=t_steps, overlap_closed_form=closed,
                      overlap_simulated=overlap_sim,
                      overlap_exact_rotation=exact,
                      rotate_distance=report.distance_to_ideal,
                      in_hypothesis=in_hyp)
