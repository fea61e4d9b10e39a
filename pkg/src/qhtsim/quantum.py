"""Quantum hitting times and the classical-quantum comparison machinery.

The quantum hitting variable places mass 2 delta_j^2 at 1/alpha_j for each
secular eigenphase and delta_-1^2 at 1/pi; for walks quantized from a
reversible chain its atoms coincide with the square roots of the classical
spectral variable, which makes the epsilon-quantile identity exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._spectral import tail_quantile
from .chains import MarkovChain
from .classical import deleted_spectrum
from .errors import NonPositiveEigenvalue
from .search import decompose_target, initial_coefficients, secular_phases
from .szegedy import EdgeOperator, search_operator, quantum_analogue


@dataclass(frozen=True)
class QHDistribution:
    """Atomic law of the quantum hitting variable, total mass |psi|^2."""

    values: np.ndarray
    masses: np.ndarray

    def mean(self) -> float:
        return float(self.values @ self.masses)

    def quantile(self, eps: float) -> float:
        return tail_quantile(self.values, self.masses, eps)

    def total_mass(self) -> float:
        return float(self.masses.sum())


def qh_distribution(U2: EdgeOperator | np.ndarray, mu: np.ndarray) -> QHDistribution:
    """Hitting-variable atoms for the search operator built on (U2, mu).

    A target orthogonal to the fixed vector makes the problem trivial: the
    distribution is identically zero.
    """
    dec = decompose_target(U2, mu)
    if dec.a0 == 0.0:
        return QHDistribution(values=np.array([0.0]), masses=np.array([0.0]))
    roots = secular_phases(dec)
    system = initial_coefficients(dec, roots)
    values = [1.0 / a for a in system.alphas]
    masses = [2.0 * d * d for d in system.deltas]
    values.append(0.0)
    masses.append(system.delta0**2)
    return QHDistribution(values=np.array(values), masses=np.array(masses))


def qht(U2: EdgeOperator | np.ndarray, mu: np.ndarray) -> float:
    return qh_distribution(U2, mu).mean()


def qht_eps(U2: EdgeOperator | np.ndarray, mu: np.ndarray, eps: float) -> float:
    return qh_distribution(U2, mu).quantile(eps)


def _require_nonneg(chain: MarkovChain) -> None:
    low = chain.eigenvalues()[0]
    if low < -1e-9:
        raise NonPositiveEigenvalue(
            f"chain eigenvalue {low:.3e} below zero; lazify first")


def qht_chain(chain: MarkovChain, z: int) -> float:
    """Quantum hitting time of the chain's walk with target |z>|p_z>.

    Computed from the hitting distribution and cross-checked against the
    deleted-spectrum sum of nu_j^2 / theta_j.
    """
    _require_nonneg(chain)
    U2, _, _, mu = search_operator(chain, z)
    value = qht(U2, mu)
    spec = deleted_spectrum(chain, z)
    direct = float(np.sum(spec.nus**2 / spec.thetas))
    assert abs(value - direct) <= 1e-8 * max(1.0, direct), \
        f"qht routes disagree: {value} vs {direct}"
    return value


def qht_eps_chain(chain: MarkovChain, z: int, eps: float) -> float:
    _require_nonneg(chain)
    U2, _, _, mu = search_operator(chain, z)
    return qht_eps(U2, mu, eps)


@dataclass(frozen=True)
class DeviationReport:
    mean_deviation: float
    phi_norm: float
    steps: int

    @property
    def ratio(self) -> float:
        return self.mean_deviation / self.phi_norm if self.phi_norm > 0 else 0.0


def deviation_experiment(chain: MarkovChain, z: int,
                         trials: int | None = None,
                         seed: int | None = None) -> DeviationReport:
    """Mean deviation |W(P,z)^t phi - phi| for t uniform in {1..ceil(QHT)}.

    The expectation is an exact average over all t; passing ``trials``
    switches to seeded sampling of t instead.
    """
    _require_nonneg(chain)
    U2, _, _, mu = search_operator(chain, z)
    dec = decompose_target(U2, mu)
    phi_start = dec.phi0 - dec.a0 * mu if dec.a0 > 0 else dec.phi0
    phi_norm = float(np.linalg.norm(phi_start))

    steps = max(1, math.ceil(qht(U2, mu))) if dec.a0 > 0 else 1
    W = quantum_analogue(chain, marked=z)

    deviations = []
    v = phi_start.copy()
    for _ in range(steps):
        v = W.M @ v
        deviations.append(float(np.linalg.norm(v - phi_start)))

    if trials is None:
        mean = float(np.mean(deviations))
    else:
        rng = np.random.default_rng(seed)
        picks = rng.integers(0, steps, size=trials)
        mean = float(np.mean([deviations[t] for t in picks]))
    return DeviationReport(mean_deviation=mean, phi_norm=phi_norm, steps=steps)
