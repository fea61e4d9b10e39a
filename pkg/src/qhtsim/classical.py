"""Classical hitting times through the deleted-matrix spectral decomposition.

The Las Vegas hitting time is computed two independent ways (a linear solve
and a spectral sum) and the results are required to agree.  Monte Carlo
variants come from the atomic distribution built on the eigenphases of the
symmetrized deleted matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._spectral import tail_quantile
from .chains import MarkovChain
from .errors import (NegativeEigenvalue, NoConvergence, NonReversible,
                     SingularSystem)

GROUP_TOL = 1e-9
MASS_FLOOR = 1e-12
MAX_SURVIVAL_STEPS = 10**6


@dataclass(frozen=True)
class DeletedSpectrum:
    """Eigenphases and overlaps of the symmetrized deleted matrix.

    ``thetas`` are arccos of the deleted eigenvalues, ascending, one entry
    per eigenvector; ``nus`` are the overlaps of sqrt(pi_{-z}) with the
    corresponding eigenvectors.  ``groups`` merges phases equal within
    1e-9 and drops aggregated masses below 1e-12.
    """

    z: int
    thetas: np.ndarray
    nus: np.ndarray
    pi_z: float
    groups: tuple[tuple[float, float], ...]

    @property
    def lambdas(self) -> np.ndarray:
        return np.cos(self.thetas)


@dataclass(frozen=True)
class HzDistribution:
    """Atomic law of the spectral hitting-time variable.

    Atoms sit at 1/theta^2 with the grouped overlap masses, plus the
    residual mass at zero.
    """

    values: np.ndarray
    masses: np.ndarray

    def mean(self) -> float:
        return float(self.values @ self.masses)

    def quantile(self, eps: float) -> float:
        return tail_quantile(self.values, self.masses, eps)


def _group_atoms(thetas: np.ndarray, weights: np.ndarray,
                 tol: float = GROUP_TOL,
                 floor: float = MASS_FLOOR) -> tuple[tuple[float, float], ...]:
    groups: list[list[float]] = []
    for theta, w in zip(thetas, weights):
        if groups and theta - groups[-1][0] <= tol:
            groups[-1][1] += w
        else:
            groups.append([float(theta), float(w)])
    return tuple((t, m) for t, m in groups if m >= floor)


def deleted_spectrum(chain: MarkovChain, z: int) -> DeletedSpectrum:
    """Eigendecomposition of S_{-z} with overlaps against sqrt(pi_{-z}).

    Requires a reversible chain whose eigenvalues are nonnegative, so all
    phases land in (0, pi/2].
    """
    if not chain.is_reversible():
        raise NonReversible("deleted spectrum requires a reversible chain")
    eigs = chain.eigenvalues()
    if eigs[0] < -1e-10:
        raise NegativeEigenvalue(
            f"minimum eigenvalue {eigs[0]:.3e} < 0; lazify the chain first")

    keep = [x for x in range(chain.n) if x != z]
    Pz = chain.P[np.ix_(keep, keep)]
    piz = chain.pi[keep]
    d = np.sqrt(piz)
    S = (d[:, None] * Pz) / d[None, :]
    S = 0.5 * (S + S.T)
    lam, vecs = np.linalg.eigh(S)

    resid = np.max(np.abs(S @ vecs - vecs * lam[None, :]))
    assert resid <= 1e-10, f"eigensolver residual {resid:.3e}"

    lam = np.clip(lam, 0.0, 1.0)
    thetas = np.arccos(lam)
    nus = vecs.T @ d
    order = np.argsort(thetas)
    thetas = thetas[order]
    nus = nus[order]
    groups = _group_atoms(thetas, nus**2)
    return DeletedSpectrum(z=z, thetas=thetas, nus=nus,
                           pi_z=float(chain.pi[z]), groups=groups)


def hz_distribution(spectrum: DeletedSpectrum) -> HzDistribution:
    values = [1.0 / t**2 for t, _ in spectrum.groups]
    masses = [m for _, m in spectrum.groups]
    tail = sum(masses)
    values.append(0.0)
    masses.append(max(0.0, 1.0 - tail))
    return HzDistribution(values=np.array(values), masses=np.array(masses))


def hitting_time(chain: MarkovChain, z: int) -> float:
    """Expected steps from the stationary distribution to z.

    Solved as pi_{-z}^T (I - P_{-z})^{-1} 1 and cross-checked against the
    spectral sum over the deleted eigenvalues.
    """
    spec = deleted_spectrum(chain, z)
    keep = [x for x in range(chain.n) if x != z]
    Pz = chain.P[np.ix_(keep, keep)]
    piz = chain.pi[keep]
    try:
        sol = np.linalg.solve(np.eye(len(keep)) - Pz, np.ones(len(keep)))
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    ht_solve = float(piz @ sol)
    ht_spectral = float(np.sum(spec.nus**2 / (1.0 - np.cos(spec.thetas))))
    assert abs(ht_solve - ht_spectral) <= 1e-8 * max(1.0, abs(ht_solve)), \
        f"hitting time routes disagree: {ht_solve} vs {ht_spectral}"
    assert ht_solve > 0
    return ht_solve


def hz_mean(spectrum: DeletedSpectrum) -> float:
    """Expectation of the spectral variable; sandwiched by HT/4 and HT/2."""
    mean = hz_distribution(spectrum).mean()
    ht = float(np.sum(spectrum.nus**2 / (1.0 - np.cos(spectrum.thetas))))
    assert 2.0 * mean <= ht * (1 + 1e-12) and ht <= 4.0 * mean * (1 + 1e-12), \
        f"sandwich violated: 2E={2 * mean}, HT={ht}, 4E={4 * mean}"
    return mean


def ht_eps(spectrum: DeletedSpectrum, eps: float) -> float:
    """Monte Carlo hitting time: smallest y with Pr[H_z > y] <= eps."""
    return hz_distribution(spectrum).quantile(eps)


def survival(chain: MarkovChain, z: int, k: int) -> float:
    """Probability that the chain started from pi avoids z for k steps."""
    if k < 0:
        raise ValueError("step count must be nonnegative")
    keep = [x for x in range(chain.n) if x != z]
    Pz = chain.P[np.ix_(keep, keep)]
    v = np.ones(len(keep))
    for _ in range(k):
        v = Pz @ v
    return float(chain.pi[keep] @ v)


def h_eps(chain: MarkovChain, z: int, eps: float) -> int:
    """Smallest k such that the k-step survival probability is at most eps."""
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    keep = [x for x in range(chain.n) if x != z]
    Pz = chain.P[np.ix_(keep, keep)]
    piz = chain.pi[keep]
    v = np.ones(len(keep))
    k = 0
    while piz @ v > eps:
        v = Pz @ v
        k += 1
        if k > MAX_SURVIVAL_STEPS:
            raise NoConvergence("survival probability did not drop below eps")
    return k
