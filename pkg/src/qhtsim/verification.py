"""Numerical verification sweeps over the built-in chain families.

Each check covers one proved statement and returns a tagged outcome; the
CLI ``verify`` subcommand runs all of them and fails on any violation.
The acceptance test suite drives the same functions with its own grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import classical, search, szegedy, tulsi
from . import quantum as qht
from ._spectral import positive_pair_phases
from .chains import MarkovChain, family, lazify
from .phase_estimation import PEConfig, dense_oracle, detect, rotate
from .szegedy import phi_zero

DEFAULT_EPS = (0.1, 0.25, 0.5)
CLASSICAL_EPS = (0.05, 0.1, 0.2, 0.3)


@dataclass
class CheckOutcome:
    tag: str
    passed: bool
    detail: str = ""


def family_grid(families: tuple[str, ...], nmax: int,
                seeds: tuple[int, ...] = (11, 12, 13, 14, 15)
                ) -> list[tuple[str, MarkovChain]]:
    """Representative chains per family, capped at nmax states."""
    grid: list[tuple[str, MarkovChain]] = []
    small = tuple(n for n in (3, 4, 5) if n <= nmax)
    if "cycle" in families:
        for n in sorted(set(small + ((nmax,) if nmax > 5 else ()))):
            grid.append((f"cycle-{n}", family("cycle", n=n)))
    if "complete" in families:
        for n in sorted(set(small + ((nmax,) if nmax > 5 else ()))):
            grid.append((f"complete-{n}", family("complete", n=n)))
    if "torus2d" in families:
        for side in (2, 3):
            if side * side <= nmax:
                grid.append((f"torus2d-{side}", family("torus2d", side=side)))
    if "hypercube" in families:
        for d in (2, 3):
            if 2**d <= nmax:
                grid.append((f"hypercube-{d}", family("hypercube", d=d)))
    if "random" in families:
        sizes = [n for n in (5, 6, 7, 8, 9) if n <= nmax] or [nmax]
        for k, seed in enumerate(seeds):
            n = sizes[k % len(sizes)]
            grid.append((f"random-{n}-s{seed}", family("random", n=n, seed=seed)))
    return grid


def _states(chain: MarkovChain, all_z: bool) -> list[int]:
    if all_z or chain.n <= 4:
        return list(range(chain.n))
    return sorted({0, chain.n // 2, chain.n - 1})


def check_chain_invariants(grid, tol=1e-10) -> CheckOutcome:
    """Row sums, stationarity, detailed balance, and lazify spectrum floors."""
    for label, chain in grid:
        if abs(chain.P.sum(axis=1) - 1.0).max() > 1e-12:
            return CheckOutcome("chain-invariants", False, f"{label}: row sums")
        if np.max(np.abs(chain.pi @ chain.P - chain.pi)) > tol:
            return CheckOutcome("chain-invariants", False, f"{label}: stationarity")
        if not chain.is_reversible(tol):
            return CheckOutcome("chain-invariants", False, f"{label}: detailed balance")
        for alpha in (0.0, 0.1, 0.3):
            low = lazify(chain, alpha).eigenvalues()[0]
            if low < alpha - 1e-10:
                return CheckOutcome("chain-invariants", False,
                                    f"{label}: lazify({alpha}) min eig {low}")
    return CheckOutcome("chain-invariants", True)


def check_deleted_interval(grid) -> CheckOutcome:
    """Deleted-matrix eigenvalues stay inside [min eig P, 1)."""
    for label, chain in grid:
        kappa = chain.eigenvalues()[0]
        for z in range(chain.n):
            keep = [x for x in range(chain.n) if x != z]
            d = np.sqrt(chain.pi[keep])
            S = (d[:, None] * chain.P[np.ix_(keep, keep)]) / d[None, :]
            lam = np.linalg.eigvalsh(0.5 * (S + S.T))
            if lam[0] < kappa - 1e-9 or lam[-1] >= 1.0 - 1e-9:
                return CheckOutcome("deleted-interval", False,
                                    f"{label} z={z}: [{lam[0]}, {lam[-1]}]")
    return CheckOutcome("deleted-interval", True)


def check_ht_sandwich(grid) -> CheckOutcome:
    """2 E[H_z] <= HT <= 4 E[H_z] on lazified chains."""
    for label, chain in grid:
        lz = lazify(chain, 0.0)
        for z in range(lz.n):
            spec = classical.deleted_spectrum(lz, z)
            mean = classical.hz_mean(spec)  # asserts the sandwich itself
            ht = classical.hitting_time(lz, z)
            if not (2 * mean <= ht + 1e-9 and ht <= 4 * mean + 1e-9):
                return CheckOutcome("ht-sandwich", False, f"{label} z={z}")
    return CheckOutcome("ht-sandwich", True)


def check_mc_ht_bounds(grid, eps_list=CLASSICAL_EPS) -> CheckOutcome:
    """Step-count vs quantile hitting times: h_eps and HT_eps bound each other."""
    for label, chain in grid:
        lz = lazify(chain, 0.0)
        for z in range(lz.n):
            spec = classical.deleted_spectrum(lz, z)
            for eps in eps_list:
                h = classical.h_eps(lz, z, eps)
                bound = 4.0 * math.log(2.0 / eps) * classical.ht_eps(spec, eps / 2)
                if h > bound + 1e-9:
                    return CheckOutcome("mc-ht-bounds", False,
                                        f"{label} z={z} eps={eps}: h={h} > {bound}")
                ht_e = classical.ht_eps(spec, eps)
                if ht_e > 0.5 * classical.h_eps(lz, z, eps / 3) + 1e-9:
                    return CheckOutcome("mc-ht-bounds", False,
                                        f"{label} z={z} eps={eps}: quantile bound")
    return CheckOutcome("mc-ht-bounds", True)


def check_ht_comparison(grid, eps_list=CLASSICAL_EPS) -> CheckOutcome:
    """HT_eps <= HT/(2 eps) everywhere; some z has HT <= 4 HT_eps and nu1^2 >= 1/2."""
    for label, chain in grid:
        lz = lazify(chain, 0.0)
        best_z, best_nu1 = 0, -1.0
        for z in range(lz.n):
            spec = classical.deleted_spectrum(lz, z)
            ht = classical.hitting_time(lz, z)
            for eps in eps_list:
                if classical.ht_eps(spec, eps) > ht / (2 * eps) + 1e-9:
                    return CheckOutcome("ht-comparison", False,
                                        f"{label} z={z} eps={eps}: Markov bound")
            nu1 = spec.nus[0] ** 2
            if nu1 > best_nu1:
                best_z, best_nu1 = z, nu1
        if best_nu1 < 0.5 - 1e-9:
            return CheckOutcome("ht-comparison", False,
                                f"{label}: max nu1^2 = {best_nu1} < 1/2")
        spec = classical.deleted_spectrum(lz, best_z)
        ht = classical.hitting_time(lz, best_z)
        for eps in eps_list:
            if eps < 0.5 and ht > 4 * classical.ht_eps(spec, eps) + 1e-9:
                return CheckOutcome("ht-comparison", False,
                                    f"{label} witness z={best_z} eps={eps}")
    return CheckOutcome("ht-comparison", True)


def check_squared_walk(grid, tol=1e-10) -> CheckOutcome:
    """(U2 U1)^2 equals the marked walk ref(B_-z) ref(A_-z) in operator norm."""
    for label, chain in grid:
        for z in _states(chain, all_z=False):
            U2, U1, U, _ = szegedy.search_operator(chain, z)
            W = szegedy.quantum_analogue(chain, marked=z)
            gap = np.linalg.norm(U.M @ U.M - W.M, 2)
            if gap > tol:
                return CheckOutcome("squared-walk", False,
                                    f"{label} z={z}: |(U2U1)^2 - W| = {gap:.2e}")
    return CheckOutcome("squared-walk", True)


def check_secular_vs_dense(grid, tol=1e-8, all_z=False) -> CheckOutcome:
    """Secular roots, eigenvector residuals, and basis reconstructions."""
    for label, chain in grid:
        lz = lazify(chain, 0.0)
        for z in _states(lz, all_z):
            U2, _, U, mu = szegedy.search_operator(lz, z)
            dec = search.decompose_target(U2, mu)
            roots = search.secular_phases(dec)
            dense = positive_pair_phases(U.M)
            dense = np.concatenate([dense, [np.pi]])  # -1 always possible
            for alpha in roots:
                if np.min(np.abs(dense - alpha)) > tol:
                    return CheckOutcome("secular-vs-dense", False,
                                        f"{label} z={z}: root {alpha} missing")
                w = search.eigvec_w(dec, alpha)
                resid = np.linalg.norm(U.M @ w - np.exp(1j * alpha) * w)
                if resid > tol * np.linalg.norm(w):
                    return CheckOutcome("secular-vs-dense", False,
                                        f"{label} z={z}: residual {resid:.2e}")
            # reconstruction identities are asserted inside
            search.initial_coefficients(dec, roots)
    return CheckOutcome("secular-vs-dense", True)


def check_phase_doubling(grid, tol=1e-8) -> CheckOutcome:
    """U = SWAP ref(A_-z) carries the deleted phases; its square doubles them."""
    for label, chain in grid:
        lz = lazify(chain, 0.0)
        for z in _states(lz, all_z=False):
            spec = classical.deleted_spectrum(lz, z)
            _, _, U, _ = szegedy.search_operator(lz, z)
            got = positive_pair_phases(U.M)
            want = np.sort(spec.thetas[spec.thetas < np.pi - 1e-9])
            if len(got) != len(want) or np.max(np.abs(got - want)) > tol:
                return CheckOutcome("phase-doubling", False,
                                    f"{label} z={z}: U phases mismatch")
            W = szegedy.quantum_analogue(lz, marked=z)
            gotW = positive_pair_phases(W.M)
            wantW = np.sort(2.0 * spec.thetas[spec.thetas < np.pi / 2 - 1e-9])
            if len(gotW) != len(wantW) or (len(wantW) and
                                           np.max(np.abs(gotW - wantW)) > tol):
                return CheckOutcome("phase-doubling", False,
                                    f"{label} z={z}: walk phases mismatch")
    return CheckOutcome("phase-doubling", True)


def check_qht_quadratic(grid, eps_list=DEFAULT_EPS, all_z=True) -> CheckOutcome:
    """QHT_eps^2 = HT_eps exactly, QHT <= sqrt(HT/2), QHT_eps <= QHT/eps."""
    for label, chain in grid:
        lz = lazify(chain, 0.0)
        for z in _states(lz, all_z):
            spec = classical.deleted_spectrum(lz, z)
            hdist = classical.hz_distribution(spec)
            U2, _, _, mu = szegedy.search_operator(lz, z)
            qdist = qht.qh_distribution(U2, mu)
            qexp = qdist.mean()
            ht = classical.hitting_time(lz, z)
            if qexp > math.sqrt(ht / 2.0) + 1e-9:
                return CheckOutcome("qht-quadratic", False,
                                    f"{label} z={z}: QHT > sqrt(HT/2)")
            for eps in eps_list:
                q_eps = qdist.quantile(eps)
                h_eps = hdist.quantile(eps)
                if q_eps > qexp / eps + 1e-9:
                    return CheckOutcome("qht-quadratic", False,
                                        f"{label} z={z} eps={eps}: Markov bound")
                if h_eps == 0.0:
                    if q_eps != 0.0:
                        return CheckOutcome("qht-quadratic", False,
                                            f"{label} z={z} eps={eps}: 0 mismatch")
                elif abs(q_eps**2 - h_eps) > 1e-8 * h_eps:
                    return CheckOutcome(
                        "qht-quadratic", False,
                        f"{label} z={z} eps={eps}: {q_eps**2} vs {h_eps}")
    return CheckOutcome("qht-quadratic", True)


def check_principal_projection(grid, eps_list=DEFAULT_EPS) -> CheckOutcome:
    """Some target projects onto its principal pair with length >= 1/sqrt 2;
    that witness has QHT_eps = 1/alpha and QHT <= QHT_eps for eps <= 1/2."""
    for label, chain in grid:
        lz = lazify(chain, 0.0)
        A, _ = szegedy.star_states(lz)
        U2, _, _, _ = szegedy.search_operator(lz, 0)
        entries = search.principal_projection(U2, A)
        best = max(entries.values(), key=lambda e: e.projection)
        if best.projection < 1.0 / math.sqrt(2.0) - 1e-9:
            return CheckOutcome("principal-projection", False,
                                f"{label}: max projection {best.projection}")
        qdist = qht.qh_distribution(U2, A[best.z])
        qexp = qdist.mean()
        for eps in eps_list:
            if eps > 0.5 + 1e-12:
                continue
            q_eps = qdist.quantile(eps)
            if abs(q_eps - 1.0 / best.alpha1) > 1e-8 / best.alpha1:
                return CheckOutcome("principal-projection", False,
                                    f"{label} witness eps={eps}: quantile")
            if qexp > q_eps + 1e-9:
                return CheckOutcome("principal-projection", False,
                                    f"{label} witness eps={eps}: QHT > QHT_eps")
    return CheckOutcome("principal-projection", True)


def check_detect_rotate(eps_list=(0.1, 0.25)) -> CheckOutcome:
    """Analytic detect/rotate agree with the dense circuit oracle at n=2."""
    lz = lazify(family("cycle", n=2), 0.0)
    U2, _, U, mu = szegedy.search_operator(lz, 1)
    dec = search.decompose_target(U2, mu)
    start = dec.start_state
    cfg = PEConfig(t=4, r=3)
    oracle = dense_oracle(U, cfg, start)
    res = detect(U, 0.3, 0.25, start, config=cfg)
    if abs(res.accept_prob - oracle.detect_accept_prob) > 1e-10:
        return CheckOutcome("detect-rotate", False, "detect vs oracle")
    rep = rotate(U, 0.3, 0.25, start, config=cfg)
    if np.linalg.norm(rep.output - oracle.rotate_output) > 1e-10:
        return CheckOutcome("detect-rotate", False, "rotate vs oracle")
    for eps in eps_list:
        qd = qht.qh_distribution(U2, mu)
        T = max(1.0, qd.quantile(eps))
        rep = rotate(U, 1.0 / T, eps, start)
        c = rep.distance_to_ideal / math.sqrt(eps)
        if c >= 10.0:
            return CheckOutcome("detect-rotate", False,
                                f"rotate constant c={c:.2f} at eps={eps}")
    return CheckOutcome("detect-rotate", True)


def check_analogue_roundtrip(grid, eps_list=DEFAULT_EPS) -> CheckOutcome:
    """Chain -> reflection walk -> classical analogue is the identity, and the
    walk's quantile hitting time squares to the classical one."""
    for label, chain in grid:
        lz = lazify(chain, 0.0)
        walk = szegedy.reflection_walk(np.sqrt(lz.P))
        back = szegedy.classical_analogue(walk)
        if np.max(np.abs(back.P - lz.P)) > 1e-10:
            return CheckOutcome("analogue-roundtrip", False, f"{label}: round trip")
        if not back.is_reversible(1e-9):
            return CheckOutcome("analogue-roundtrip", False, f"{label}: reversibility")
        dec = szegedy.walk_decomposition(walk)
        for z in _states(lz, all_z=False):
            mu = np.zeros(lz.n * lz.n)
            mu[z * lz.n:(z + 1) * lz.n] = dec.phi_x[z]
            spec = classical.deleted_spectrum(back, z)
            qdist = qht.qh_distribution(walk, mu)
            hdist = classical.hz_distribution(spec)
            for eps in eps_list:
                q_eps = qdist.quantile(eps)
                h_eps = hdist.quantile(eps)
                if h_eps == 0.0:
                    ok = q_eps == 0.0
                else:
                    ok = abs(q_eps**2 - h_eps) <= 1e-8 * h_eps
                if not ok:
                    return CheckOutcome("analogue-roundtrip", False,
                                        f"{label} z={z} eps={eps}: lower bound")
    return CheckOutcome("analogue-roundtrip", True)


def check_tulsi_bounds(grid) -> CheckOutcome:
    """Rotated-operator root location, cotangent growth, and eigenvector norms."""
    for label, chain in grid:
        lz = lazify(chain, 0.0)
        for z in _states(lz, all_z=False):
            U2, U1, _, mu = szegedy.search_operator(lz, z)
            dec = search.decompose_target(U2, mu)
            roots = search.secular_phases(dec)
            alpha1 = float(roots[0])
            theta = tulsi.theta_star(dec.a0, alpha1)
            root = tulsi.tulsi_secular(dec, theta)  # asserts the lemma bounds
            top = tulsi.build_T(U1, U2, theta)
            dense = positive_pair_phases(top.T)
            if np.min(np.abs(dense - root)) > 1e-8:
                return CheckOutcome("tulsi-bounds", False,
                                    f"{label} z={z}: dense root mismatch")
            for sign in (1.0, -1.0):
                w_t = tulsi.tulsi_eigvec(dec, theta, sign * root)
                w_b = search.eigvec_w(dec, sign * alpha1)
                lhs = np.linalg.norm(w_t)
                rhs = 3.0 * math.cos(theta) * np.linalg.norm(w_b)
                if lhs > rhs + 1e-9:
                    return CheckOutcome("tulsi-bounds", False,
                                        f"{label} z={z}: norm bound {lhs} > {rhs}")
                resid = np.linalg.norm(top.T @ w_t - np.exp(1j * sign * root) * w_t)
                if resid > 1e-8 * lhs:
                    return CheckOutcome("tulsi-bounds", False,
                                        f"{label} z={z}: residual {resid:.2e}")
    return CheckOutcome("tulsi-bounds", True)


def check_finding(grid, threshold=0.1) -> CheckOutcome:
    """Rotated finding overlap on state-transitive chains stays constant."""
    for label, chain in grid:
        if not chain.known_transitive:
            continue
        lz = lazify(chain, 0.0)
        rep = tulsi.find_experiment(lz, 0, 0.25)
        if rep.overlap_simulated < threshold:
            return CheckOutcome("finding-overlap", False,
                                f"{label}: overlap {rep.overlap_simulated:.4f}")
        budget = rep.rotate_distance + 10.0 * math.sqrt(0.25)
        if abs(rep.overlap_closed_form - rep.overlap_simulated) > budget:
            return CheckOutcome("finding-overlap", False,
                                f"{label}: closed form off budget")
        if abs(rep.overlap_simulated - rep.overlap_exact_rotation) > \
                rep.rotate_distance + 1e-9:
            return CheckOutcome("finding-overlap", False,
                                f"{label}: simulation beyond rotate distance")
    return CheckOutcome("finding-overlap", True)


def check_deviation(grid, threshold=0.1) -> CheckOutcome:
    """Mean walk deviation over t <= ceil(QHT) is a constant fraction of |start|."""
    for label, chain in grid:
        lz = lazify(chain, 0.0)
        rep = qht.deviation_experiment(lz, 0)
        if rep.ratio < threshold:
            return CheckOutcome("deviation", False,
                                f"{label}: ratio {rep.ratio:.4f}")
    return CheckOutcome("deviation", True)


def check_walk_fixed_vector(grid, tol=1e-10) -> CheckOutcome:
    """The walk fixes phi0 and stays inside the edge span of the graph."""
    for label, chain in grid:
        W = szegedy.quantum_analogue(chain)
        phi = phi_zero(chain)
        if np.linalg.norm(W.M @ phi - phi) > tol:
            return CheckOutcome("walk-fixed-vector", False, f"{label}: W phi0")
        support = (chain.P > 0).reshape(-1)
        leak = np.max(np.abs(W.M[~support][:, support])) if (~support).any() else 0.0
        if leak > 1e-10:
            return CheckOutcome("walk-fixed-vector", False, f"{label}: edge leak")
    return CheckOutcome("walk-fixed-vector", True)


def run_verify(families: tuple[str, ...], nmax: int,
               eps_list: tuple[float, ...], seed: int,
               tol: float | None = None) -> list[CheckOutcome]:
    op_tol = tol if tol is not None else 1e-10
    sec_tol = tol if tol is not None else 1e-8
    seeds = tuple(seed + k for k in range(5))
    grid = family_grid(families, nmax, seeds)
    small = [(lbl, ch) for lbl, ch in grid if ch.n <= min(nmax, 9)]
    outcomes = [
        check_chain_invariants(grid),
        check_deleted_interval(grid),
        check_ht_sandwich(grid),
        check_mc_ht_bounds(grid),
        check_ht_comparison(grid),
        check_walk_fixed_vector(small),
        check_squared_walk(small, tol=op_tol),
        check_secular_vs_dense(small, tol=sec_tol),
        check_phase_doubling(small),
        check_qht_quadratic(grid, eps_list, all_z=False),
        check_principal_projection(small, eps_list),
        check_detect_rotate(),
        check_analogue_roundtrip(small, eps_list),
        check_tulsi_bounds(small),
        check_finding(small),
        check_deviation(small),
    ]
    return outcomes
