"""Spectral analysis of the abstract search operator U = U2 (I - 2|mu><mu|).

The eigenphases of U that carry weight of the target state solve a
transcendental secular equation whose poles are the eigenphases of U2.
The function is strictly decreasing between consecutive poles, so plain
bisection brackets exactly one root per interval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._spectral import orthogonal_spectrum
from .errors import BracketFailure, DegeneratePlusOneSpace, SpanViolation
from .szegedy import EdgeOperator

MASS_FLOOR = 1e-12
BRACKET_PAD = 1e-11
BISECT_WIDTH = 1e-13


@dataclass(frozen=True)
class TargetDecomposition:
    """Coefficients of the target state in the eigenbasis of U2.

    Each pair (theta_j, a_j) aggregates one distinct rotation phase of U2;
    the eigenvector basis inside a degenerate phase is rotated so a single
    pair carries the target's full projection and a_j is real positive.
    ``multiplicities`` records how many Schur blocks were merged per pair,
    flagging collisions rather than resolving them.
    """

    mu: np.ndarray
    a0: float
    pairs: tuple[tuple[float, float], ...]
    a_minus1: float
    phi0: np.ndarray | None
    phi_plus: tuple[np.ndarray, ...]
    phi_minus1: np.ndarray | None
    multiplicities: tuple[int, ...]

    @property
    def thetas(self) -> np.ndarray:
        return np.array([t for t, _ in self.pairs])

    @property
    def start_state(self) -> np.ndarray:
        """The unnormalized initial state phi0 - a0 mu."""
        if self.phi0 is None:
            raise DegeneratePlusOneSpace("no fixed vector available")
        return self.phi0 - self.a0 * self.mu


def decompose_target(U2: EdgeOperator | np.ndarray, mu: np.ndarray
                     ) -> TargetDecomposition:
    """Project mu onto the eigenspaces of a real orthogonal operator.

    Within each degenerate eigenspace only the direction of mu's projection
    matters for the search dynamics; the orthogonal remainder never couples
    and is excluded.  For the +1 space, mu's projection singles out the
    walk's fixed vector because the inert part of that space is orthogonal
    to every target.
    """
    M = U2.M if isinstance(U2, EdgeOperator) else np.asarray(U2, dtype=float)
    mu = np.asarray(mu, dtype=float)
    spec = orthogonal_spectrum(M)

    proj_plus = np.zeros_like(mu)
    for q in spec.plus_vectors:
        proj_plus += (q @ mu) * q
    a0 = float(np.linalg.norm(proj_plus))
    if a0 >= MASS_FLOOR:
        phi0 = proj_plus / a0
    elif len(spec.plus_vectors) == 1:
        a0 = 0.0
        phi0 = spec.plus_vectors[0]
    else:
        a0 = 0.0
        phi0 = None

    proj_minus = np.zeros_like(mu)
    for q in spec.minus_vectors:
        proj_minus += (q @ mu) * q
    a_minus1 = float(np.linalg.norm(proj_minus))
    phi_minus1 = proj_minus / a_minus1 if a_minus1 >= MASS_FLOOR else None
    if phi_minus1 is None:
        a_minus1 = 0.0

    pairs: list[tuple[float, float]] = []
    phis: list[np.ndarray] = []
    mults: list[int] = []
    total_pair_mass = 0.0
    for theta, vecs in spec.pairs:
        comp = np.zeros(len(mu), dtype=complex)
        for u in vecs:
            comp += np.vdot(u, mu) * u
        a = float(np.linalg.norm(comp))
        total_pair_mass += a * a
        if a * a >= MASS_FLOOR:
            pairs.append((float(theta), a))
            phis.append(comp / a)
            mults.append(len(vecs))

    total = a0**2 + 2.0 * total_pair_mass + a_minus1**2
    assert abs(total - float(mu @ mu)) <= 1e-10, \
        f"target mass {total} does not match |mu|^2 = {mu @ mu}"

    return TargetDecomposition(mu=mu, a0=a0, pairs=tuple(pairs),
                               a_minus1=a_minus1, phi0=phi0,
                               phi_plus=tuple(phis), phi_minus1=phi_minus1,
                               multiplicities=tuple(mults))


def secular_function(dec: TargetDecomposition, alpha: float) -> float:
    val = dec.a0**2 / np.tan(alpha / 2.0)
    for theta, a in dec.pairs:
        val += a * a * (1.0 / np.tan((alpha + theta) / 2.0)
                        + 1.0 / np.tan((alpha - theta) / 2.0))
    if dec.a_minus1 > 0.0:
        val -= dec.a_minus1**2 * np.tan(alpha / 2.0)
    return float(val)


def _bisect(dec: TargetDecomposition, lo: float, hi: float) -> float:
    flo = secular_function(dec, lo)
    fhi = secular_function(dec, hi)
    if not (flo > 0.0 > fhi):
        raise BracketFailure(
            f"no sign change on [{lo}, {hi}]: f={flo:.3e}, {fhi:.3e}")
    while hi - lo > BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        if secular_function(dec, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def secular_phases(dec: TargetDecomposition) -> np.ndarray:
    """All positive eigenphases of U carrying target weight, ascending.

    One root lies strictly inside each interval between consecutive poles
    (0, theta_1), ..., (theta_J, pi]; when the -1 coefficient vanishes the
    last root is exactly pi.
    """
    if dec.a0 == 0.0:
        return np.array([])
    poles = [t for t, _ in dec.pairs]
    roots = []
    edges = [0.0] + poles
    for i in range(len(edges) - 1):
        roots.append(_bisect(dec, edges[i] + BRACKET_PAD,
                             edges[i + 1] - BRACKET_PAD))
    if dec.a_minus1 > 0.0:
        roots.append(_bisect(dec, edges[-1] + BRACKET_PAD,
                             np.pi - BRACKET_PAD))
    else:
        # pair cotangents cancel at pi and the a0 term vanishes there
        roots.append(np.pi)
    return np.array(roots)


def eigvec_w(dec: TargetDecomposition, alpha: float) -> np.ndarray:
    """Unnormalized eigenvector mu + i w' of U at a secular root alpha."""
    w = np.zeros(len(dec.mu), dtype=complex)
    if dec.a0 > 0.0 and abs(abs(alpha) - np.pi) > 1e-12:
        w += dec.a0 / np.tan(alpha / 2.0) * dec.phi0
    for (theta, a), phi in zip(dec.pairs, dec.phi_plus):
        w += a * (phi / np.tan((alpha - theta) / 2.0)
                  + np.conj(phi) / np.tan((alpha + theta) / 2.0))
    if dec.a_minus1 > 0.0:
        w -= dec.a_minus1 * np.tan(alpha / 2.0) * dec.phi_minus1
    return dec.mu + 1j * w


@dataclass(frozen=True)
class SearchEigensystem:
    """Secular roots with eigenvectors and start-state coefficients.

    ``deltas[k]`` is the coefficient magnitude of the start state on each
    unit eigenvector of the conjugate pair at ``alphas[k]``; the root at pi
    (present when the -1 coefficient vanishes) carries none of it.
    """

    alphas: np.ndarray
    w_vectors: tuple[np.ndarray, ...]
    w_norms: np.ndarray
    deltas: np.ndarray
    delta0: float
    delta_minus1: float

    @property
    def alpha1(self) -> float:
        return float(self.alphas[0])


def initial_coefficients(dec: TargetDecomposition,
                         roots: np.ndarray) -> SearchEigensystem:
    """Expand the start state phi0 - a0 mu over the secular eigenbasis.

    Verifies the two closed-form expansions: the target is the sum of
    w_alpha / |w_alpha|^2, and the start state weights each w_alpha by
    -i a0 cot(alpha/2) / |w_alpha|^2.
    """
    assert dec.a0 > 0.0, "start-state expansion needs a0 != 0"
    ws = [eigvec_w(dec, a) for a in roots]
    norms = np.array([np.linalg.norm(w) for w in ws])

    deltas = np.zeros(len(roots))
    for k, alpha in enumerate(roots):
        if abs(alpha - np.pi) > 1e-12:
            deltas[k] = abs(dec.a0 / np.tan(alpha / 2.0)) / norms[k]

    mu_rec = np.zeros(len(dec.mu), dtype=complex)
    start_rec = np.zeros(len(dec.mu), dtype=complex)
    for alpha, w, nrm in zip(roots, ws, norms):
        if abs(alpha - np.pi) <= 1e-12:
            mu_rec += w / nrm**2
            continue
        wm = np.conj(w)
        mu_rec += w / nrm**2 + wm / nrm**2
        cot = 1.0 / np.tan(alpha / 2.0)
        start_rec += -1j * dec.a0 * cot / nrm**2 * w
        start_rec += 1j * dec.a0 * cot / nrm**2 * wm

    start = dec.start_state
    assert np.linalg.norm(mu_rec - dec.mu) <= 1e-8, "target reconstruction failed"
    assert np.linalg.norm(start_rec - start) <= 1e-8, \
        "start-state reconstruction failed"

    mass = 2.0 * float(deltas @ deltas)
    assert abs(mass - float(start @ start)) <= 1e-8, \
        f"delta mass {mass} does not match |start|^2 = {start @ start}"

    return SearchEigensystem(alphas=np.asarray(roots, dtype=float),
                             w_vectors=tuple(ws), w_norms=norms,
                             deltas=deltas, delta0=0.0, delta_minus1=0.0)


def u_rotation(U: EdgeOperator | np.ndarray, psi: np.ndarray) -> np.ndarray:
    """Flip the sign of every negative-eigenphase component of psi."""
    M = U.M if isinstance(U, EdgeOperator) else np.asarray(U, dtype=float)
    spec = orthogonal_spectrum(M)
    out = psi.astype(complex)
    for _, vecs in spec.pairs:
        for u in vecs:
            um = np.conj(u)  # the e^{-i theta} partner
            out -= 2.0 * np.vdot(um, psi) * um
    return out


@dataclass(frozen=True)
class ProjectionEntry:
    z: int
    a0: float
    alpha1: float
    projection: float


def principal_projection(U2: EdgeOperator | np.ndarray,
                         targets: np.ndarray) -> dict[int, ProjectionEntry]:
    """Projection length of each start state onto its principal eigenpair.

    ``targets`` holds orthonormal real target vectors as rows; their span
    must contain the walk's fixed vector.  Entries with a0 = 1 (start state
    vanishes) are omitted.  The maximum projection over z is guaranteed to
    reach 1/sqrt(2).
    """
    M = U2.M if isinstance(U2, EdgeOperator) else np.asarray(U2, dtype=float)
    targets = np.asarray(targets, dtype=float)
    gram = targets @ targets.T
    if np.max(np.abs(gram - np.eye(targets.shape[0]))) > 1e-10:
        raise SpanViolation("targets are not orthonormal")

    spec = orthogonal_spectrum(M)
    if not spec.plus_vectors:
        raise SpanViolation("operator has no fixed vector")
    # some fixed direction must lie inside the target span
    Q = np.column_stack(spec.plus_vectors)
    outside = Q - targets.T @ (targets @ Q)
    sv = np.linalg.svd(outside, compute_uv=False)
    inside_dim = int(np.sum(sv <= 1e-8))
    if inside_dim == 0:
        raise SpanViolation("fixed vector is not in the span of the targets")

    out: dict[int, ProjectionEntry] = {}
    for z in range(targets.shape[0]):
        dec = decompose_target(M, targets[z])
        if dec.a0 >= 1.0 - 1e-12 or dec.a0 == 0.0:
            continue
        roots = secular_phases(dec)
        system = initial_coefficients(dec, roots)
        out[z] = ProjectionEntry(z=z, a0=dec.a0, alpha1=system.alpha1,
                                 projection=float(np.sqrt(2.0) * system.deltas[0]))
    return out
