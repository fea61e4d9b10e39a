"""Shared spectral helpers for real orthogonal operators.

Everything here goes through the real Schur form: for a normal real matrix
the Schur factor is block diagonal with 1x1 blocks (eigenvalues +-1) and
2x2 rotation blocks, which yields an exactly orthonormal real basis per
block.  ``numpy.linalg.eig`` is avoided because it does not return an
orthonormal set inside degenerate eigenspaces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

PHASE_TOL = 1e-9


@dataclass
class OrthogonalSpectrum:
    """Eigenstructure of a real orthogonal matrix, grouped by eigenphase.

    ``plus_vectors`` and ``minus_vectors`` are real orthonormal bases of the
    +1 and -1 eigenspaces.  ``pairs`` maps each distinct phase theta in
    (0, pi) to the complex orthonormal e^{+i theta} eigenvectors; the
    e^{-i theta} partners are their entrywise conjugates.
    """

    dim: int
    plus_vectors: list[np.ndarray] = field(default_factory=list)
    minus_vectors: list[np.ndarray] = field(default_factory=list)
    pairs: list[tuple[float, list[np.ndarray]]] = field(default_factory=list)

    def eigenpairs(self) -> list[tuple[float, np.ndarray]]:
        """Flat list of (signed phase, complex unit eigenvector) spanning C^dim."""
        out: list[tuple[float, np.ndarray]] = []
        for v in self.plus_vectors:
            out.append((0.0, v.astype(complex)))
        for theta, vecs in self.pairs:
            for u in vecs:
                out.append((theta, u))
                out.append((-theta, np.conj(u)))
        for v in self.minus_vectors:
            out.append((np.pi, v.astype(complex)))
        return out


def check_orthogonal(M: np.ndarray, tol: float = 1e-10) -> bool:
    d = M.shape[0]
    return bool(np.max(np.abs(M.T @ M - np.eye(d))) <= tol)


def orthogonal_spectrum(M: np.ndarray, tol: float = PHASE_TOL) -> OrthogonalSpectrum:
    """Decompose a real orthogonal matrix via its real Schur form.

    Phases within ``tol`` of 0 or pi are classified as +1 / -1 eigenvectors;
    the remaining rotation blocks are grouped by phase within ``tol``.
    """

    d = M.shape[0]
    T, Q = sla.schur(np.asarray(M, dtype=float), output="real")

    plus: list[np.ndarray] = []
    minus: list[np.ndarray] = []
    raw_pairs: list[tuple[float, np.ndarray]] = []

    k = 0
    while k < d:
        if k + 1 < d and abs(T[k + 1, k]) > 1e-12:
            c = 0.5 * (T[k, k] + T[k + 1, k + 1])
            s = 0.5 * (T[k + 1, k] - T[k, k + 1])
            theta = float(np.arctan2(s, c))
            q1 = Q[:, k]
            q2 = Q[:, k + 1]
            if theta < 0:
                theta = -theta
                q2 = -q2
            if theta <= tol:
                plus.extend([q1, q2])
            elif theta >= np.pi - tol:
                minus.extend([q1, q2])
            else:
                # (q1 - i q2)/sqrt2 carries eigenvalue e^{+i theta}
                raw_pairs.append((theta, (q1 - 1j * q2) / np.sqrt(2.0)))
            k += 2
        else:
            if T[k, k] > 0:
                plus.append(Q[:, k].copy())
            else:
                minus.append(Q[:, k].copy())
            k += 1

    raw_pairs.sort(key=lambda item: item[0])
    pairs: list[tuple[float, list[np.ndarray]]] = []
    for theta, vec in raw_pairs:
        if pairs and theta - pairs[-1][0] <= tol:
            pairs[-1][1].append(vec)
        else:
            pairs.append((theta, [vec]))

    return OrthogonalSpectrum(dim=d, plus_vectors=plus, minus_vectors=minus, pairs=pairs)


def eigenphases(M: np.ndarray, tol: float = PHASE_TOL) -> np.ndarray:
    """All eigenphases of a real orthogonal matrix, ascending in (-pi, pi]."""
    spec = orthogonal_spectrum(M, tol)
    phases = [p for p, _ in spec.eigenpairs()]
    return np.sort(np.array(phases))


def positive_pair_phases(M: np.ndarray, tol: float = PHASE_TOL) -> np.ndarray:
    """Phases in (0, pi) counted once per conjugate pair, with multiplicity."""
    spec = orthogonal_spectrum(M, tol)
    out: list[float] = []
    for theta, vecs in spec.pairs:
        out.extend([theta] * len(vecs))
    return np.array(sorted(out))


def tail_quantile(values: np.ndarray, masses: np.ndarray, eps: float,
                  tie_tol: float = 1e-12) -> float:
    """Smallest y with Pr[X > y] <= eps for an atomic distribution.

    The minimizer is always an atom value or 0.  Tail comparisons use a
    small additive slack so that two routes computing the same masses with
    independent eigensolvers select the same atom at exact ties.
    """

    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    v = np.asarray(values, dtype=float)
    m = np.asarray(masses, dtype=float)
    keep = v > 0
    v, m = v[keep], m[keep]
    order = np.argsort(v)
    v, m = v[order], m[order]
    # candidates are 0 and the positive atom values; tail is strictly above
    running = float(m.sum())
    if running <= eps + tie_tol:
        return 0.0
    for k in range(len(v)):
        running -= m[k]
        if running <= eps + tie_tol:
            return float(v[k])
    return float(v[-1])
