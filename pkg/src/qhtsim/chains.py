"""Construction and transformation of ergodic reversible Markov chains.

Chains are immutable row-stochastic matrices together with their stationary
distribution.  Stationary vectors are obtained from the null space of
(P^T - I), never by power iteration, so the values are exact at the dense
sizes handled here.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import Disconnected, NotErgodic, NotStochastic

ROW_SUM_TOL = 1e-9
TRANSITIVE_FAMILIES = ("cycle", "complete", "torus2d", "hypercube")
FAMILY_NAMES = TRANSITIVE_FAMILIES + ("random",)


@dataclass(frozen=True)
class MarkovChain:
    """Irreducible row-stochastic matrix with its stationary distribution.

    ``period`` is the gcd of cycle lengths of the transition graph; the
    chain is ergodic exactly when it equals 1.  ``known_transitive`` is set
    by the named family constructors only, never computed.
    """

    n: int
    P: np.ndarray
    pi: np.ndarray
    period: int = 1
    known_transitive: bool = False

    def __post_init__(self):
        self.P.setflags(write=False)
        self.pi.setflags(write=False)

    @property
    def is_ergodic(self) -> bool:
        return self.period == 1

    @property
    def edges(self) -> set[tuple[int, int]]:
        xs, ys = np.nonzero(self.P > 0)
        return set(zip(xs.tolist(), ys.tolist()))

    def is_reversible(self, tol: float = 1e-10) -> bool:
        flow = self.pi[:, None] * self.P
        return bool(np.max(np.abs(flow - flow.T)) <= tol)

    def eigenvalues(self) -> np.ndarray:
        """Spectrum of P, ascending; uses the symmetrized form when reversible."""
        if self.is_reversible():
            d = np.sqrt(self.pi)
            S = (d[:, None] * self.P) / d[None, :]
            return np.linalg.eigvalsh(0.5 * (S + S.T))
        return np.sort(np.linalg.eigvals(self.P).real)

    def chain_id(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self.P).tobytes()).hexdigest()[:12]


def _strongly_connected(mask: np.ndarray) -> bool:
    n = mask.shape[0]

    def reach(adj):
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            x = stack.pop()
            for y in np.nonzero(adj[x])[0]:
                if not seen[y]:
                    seen[y] = True
                    stack.append(int(y))
        return seen.all()

    return reach(mask) and reach(mask.T)


def _period(mask: np.ndarray) -> int:
    """gcd of cycle lengths through state 0 of a strongly connected graph."""
    n = mask.shape[0]
    level = np.full(n, -1)
    level[0] = 0
    queue = [0]
    g = 0
    while queue:
        x = queue.pop(0)
        for y in np.nonzero(mask[x])[0]:
            y = int(y)
            if level[y] < 0:
                level[y] = level[x] + 1
                queue.append(y)
            else:
                g = math.gcd(g, level[x] + 1 - level[y])
    return abs(g) if g else 0


def _stationary(P: np.ndarray) -> np.ndarray:
    n = P.shape[0]
    ns = sla.null_space(P.T - np.eye(n))
    if ns.shape[1] != 1:
        raise NotErgodic(f"stationary space has dimension {ns.shape[1]}")
    pi = ns[:, 0]
    pi = pi / pi.sum()
    if np.any(pi <= 0):
        raise NotErgodic("stationary distribution has non-positive entries")
    return pi


def _build(P: np.ndarray, *, require_aperiodic: bool,
           known_transitive: bool = False) -> MarkovChain:
    P = np.array(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise NotStochastic("transition matrix must be square")
    n = P.shape[0]
    if np.any(P < 0):
        raise NotStochastic("negative transition probability")
    rows = P.sum(axis=1)
    if np.max(np.abs(rows - 1.0)) > ROW_SUM_TOL:
        raise NotStochastic(f"row sums deviate by {np.max(np.abs(rows - 1.0)):.3e}")
    P = P / rows[:, None]

    mask = P > 0
    if not _strongly_connected(mask):
        raise NotErgodic("transition graph is not strongly connected")
    period = _period(mask)
    if require_aperiodic and period != 1:
        raise NotErgodic(f"chain is periodic with period {period}")

    pi = _stationary(P)
    return MarkovChain(n=n, P=P, pi=pi, period=period,
                       known_transitive=known_transitive)


def from_transition(P: np.ndarray) -> MarkovChain:
    """Validate a transition matrix and solve for its stationary distribution."""
    return _build(P, require_aperiodic=True)


def from_weights(W: np.ndarray) -> MarkovChain:
    """Reversible chain from a symmetric nonnegative weight matrix.

    p_xy = W_xy / deg(x) and pi_x is proportional to deg(x), so detailed
    balance holds by construction.  Bipartite supports are allowed; the
    resulting chain is periodic and callers must lazify before any
    spectral work that assumes aperiodicity.
    """
    W = np.array(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise Disconnected("weight matrix must be square")
    if np.any(W < 0):
        raise Disconnected("negative weight")
    if np.max(np.abs(W - W.T)) > 1e-12:
        raise Disconnected("weight matrix must be symmetric")
    deg = W.sum(axis=1)
    if np.any(deg <= 0):
        raise Disconnected("isolated state: zero weight row")
    if not _strongly_connected(W > 0):
        raise Disconnected("weight support is not connected")
    P = W / deg[:, None]
    pi = deg / deg.sum()
    mask = P > 0
    return MarkovChain(n=W.shape[0], P=P, pi=pi, period=_period(mask))


def family(name: str, **params) -> MarkovChain:
    """Named chain families: cycle(n), complete(n), torus2d(side),
    hypercube(d), random(n, seed)."""
    if name == "cycle":
        n = _positive_size(params, "n")
        if n == 2:
            # the 2-cycle degenerates to the uniform two-state chain
            return family("complete", n=2)
        P = np.zeros((n, n))
        for x in range(n):
            P[x, (x + 1) % n] += 0.5
            P[x, (x - 1) % n] += 0.5
        return _family_chain(P, transitive=True)
    if name == "complete":
        n = _positive_size(params, "n")
        P = np.full((n, n), 1.0 / n)
        return _family_chain(P, transitive=True)
    if name == "torus2d":
        side = _positive_size(params, "side")
        n = side * side
        P = np.zeros((n, n))
        for i in range(side):
            for j in range(side):
                x = i * side + j
                for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                    y = ((i + di) % side) * side + (j + dj) % side
                    P[x, y] += 0.25
        return _family_chain(P, transitive=True)
    if name == "hypercube":
        d = params.get("d")
        if d is None or d < 1:
            raise ValueError("hypercube requires d >= 1")
        n = 1 << d
        P = np.zeros((n, n))
        for x in range(n):
            for b in range(d):
                P[x, x ^ (1 << b)] = 1.0 / d
        return _family_chain(P, transitive=True)
    if name == "random":
        n = _positive_size(params, "n")
        seed = params.get("seed", 0)
        return _random_chain(n, seed)
    raise ValueError(f"unknown family {name!r}")


def _positive_size(params: dict, key: str) -> int:
    val = params.get(key)
    if val is None or val < 2:
        raise ValueError(f"family requires {key} >= 2")
    return int(val)


def _family_chain(P: np.ndarray, transitive: bool) -> MarkovChain:
    mask = P > 0
    pi = np.full(P.shape[0], 1.0 / P.shape[0])  # regular graphs: uniform
    return MarkovChain(n=P.shape[0], P=P, pi=pi, period=_period(mask),
                       known_transitive=transitive)


def _random_chain(n: int, seed: int) -> MarkovChain:
    """Random connected weighted graph: a random spanning tree plus extra
    edges with probability 1/2, weights uniform in [0.1, 1]."""
    rng = np.random.default_rng(seed)
    W = np.zeros((n, n))
    order = rng.permutation(n)
    for k in range(1, n):
        a = order[k]
        b = order[rng.integers(0, k)]
        w = rng.uniform(0.1, 1.0)
        W[a, b] = W[b, a] = w
    for x in range(n):
        for y in range(x + 1, n):
            if W[x, y] == 0 and rng.random() < 0.5:
                w = rng.uniform(0.1, 1.0)
                W[x, y] = W[y, x] = w
    return from_weights(W)


def lazify(chain: MarkovChain, alpha: float) -> MarkovChain:
    """Shift the spectrum of P above alpha: P -> ((1-alpha) P + (1+alpha) I)/2."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"laziness parameter must lie in [0, 1), got {alpha}")
    P = 0.5 * ((1.0 - alpha) * chain.P + (1.0 + alpha) * np.eye(chain.n))
    return MarkovChain(n=chain.n, P=P, pi=chain.pi.copy(), period=1,
                       known_transitive=chain.known_transitive)


def time_reversal(chain: MarkovChain) -> MarkovChain:
    """P* defined by pi_y p*_yx = pi_x p_xy; equals P iff the chain is reversible."""
    flow = chain.pi[:, None] * chain.P
    Pstar = flow.T / chain.pi[:, None]
    return MarkovChain(n=chain.n, P=Pstar, pi=chain.pi.copy(),
                       period=chain.period, known_transitive=chain.known_transitive)


def load_chain_spec(spec: dict | str) -> MarkovChain:
    """Build a chain from a JSON spec file or an already-parsed dict.

    Accepted forms: {"transition": [[...]]}, {"weights": [[...]]} or
    {"family": "cycle", "n": 16}; an optional "lazy" key applies lazify.
    """
    if isinstance(spec, str):
        with open(spec) as fh:
            spec = json.load(fh)
    if "transition" in spec:
        chain = from_transition(np.array(spec["transition"], dtype=float))
    elif "weights" in spec:
        chain = from_weights(np.array(spec["weights"], dtype=float))
    elif "family" in spec:
        name = spec["family"]
        keys = {"cycle": ("n",), "complete": ("n",), "torus2d": ("side",),
                "hypercube": ("d",), "random": ("n", "seed")}
        if name not in keys:
            raise ValueError(f"unknown family {name!r}")
        params = {k: spec[k] for k in keys[name] if k in spec}
        chain = family(name, **params)
    else:
        raise ValueError("chain spec needs 'transition', 'weights' or 'family'")
    if "lazy" in spec:
        chain = lazify(chain, float(spec["lazy"]))
    return chain
