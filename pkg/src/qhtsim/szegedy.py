"""Edge-space walk operators: reflections, quantizations, and analogues.

Operators are dense real orthogonal matrices on the n^2-dimensional edge
space with basis |x>|y> at index x*n + y.  On the full edge space a walk
SWAP.F picks up inert +-1 eigenvectors supported on the orthogonal
complement of the star subspaces; fixed-vector extraction therefore always
works relative to that junk space (antisymmetric vectors the dynamics
never reaches) rather than demanding literal spectral uniqueness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from ._spectral import check_orthogonal, orthogonal_spectrum
from .chains import MarkovChain, _build, time_reversal
from .errors import (DegeneratePlusOneSpace, NonReversible,
                     NoUniqueFixedVector, ZeroMass)


@dataclass(frozen=True)
class EdgeOperator:
    """Real orthogonal operator on the edge space of an n-state chain."""

    n: int
    M: np.ndarray
    label: str = ""

    def __post_init__(self):
        assert self.M.shape == (self.n**2, self.n**2), "operator dimension mismatch"
        assert check_orthogonal(self.M), f"{self.label or 'operator'} is not orthogonal"
        self.M.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.n**2

    def __matmul__(self, other):
        if isinstance(other, EdgeOperator):
            return EdgeOperator(self.n, self.M @ other.M,
                                f"{self.label}*{other.label}")
        return self.M @ other

    def as_json_dict(self) -> dict:
        return {"n": self.n, "label": self.label, "matrix": self.M.tolist()}


def swap_operator(n: int) -> EdgeOperator:
    S = np.zeros((n * n, n * n))
    for x in range(n):
        for y in range(n):
            S[y * n + x, x * n + y] = 1.0
    return EdgeOperator(n, S, "SWAP")


def star_states(chain: MarkovChain) -> tuple[np.ndarray, np.ndarray]:
    """Rows x of the first array are |x>|p_x>; rows y of the second are
    |p*_y>|y> built from the time-reversed chain."""
    n = chain.n
    A = np.zeros((n, n * n))
    for x in range(n):
        A[x, x * n:(x + 1) * n] = np.sqrt(chain.P[x])
    Pstar = time_reversal(chain).P
    B = np.zeros((n, n * n))
    for y in range(n):
        B[y, y::n] = np.sqrt(Pstar[y])
    return A, B


def phi_zero(chain: MarkovChain) -> np.ndarray:
    """The walk's fixed vector sum_x sqrt(pi_x) |x>|p_x>."""
    A, _ = star_states(chain)
    return np.sqrt(chain.pi) @ A


def _reflection(states: np.ndarray, n: int, label: str) -> EdgeOperator:
    gram = states @ states.T
    assert np.max(np.abs(gram - np.eye(states.shape[0]))) <= 1e-12, \
        "star states are not orthonormal"
    M = 2.0 * states.T @ states - np.eye(n * n)
    return EdgeOperator(n, M, label)


def reflections(chain: MarkovChain,
                marked: int | None = None) -> tuple[EdgeOperator, EdgeOperator]:
    """Reflections through the star subspaces, optionally with one state
    removed from each span."""
    A, B = star_states(chain)
    if marked is None:
        return (_reflection(A, chain.n, "refA"),
                _reflection(B, chain.n, "refB"))
    keep = [x for x in range(chain.n) if x != marked]
    return (_reflection(A[keep], chain.n, f"refA-{marked}"),
            _reflection(B[keep], chain.n, f"refB-{marked}"))


def quantum_analogue(chain: MarkovChain, marked: int | None = None) -> EdgeOperator:
    """ref(B).ref(A), or the marked version with state z deleted from both spans."""
    refA, refB = reflections(chain, marked)
    label = "W" if marked is None else f"W-{marked}"
    return EdgeOperator(chain.n, refB.M @ refA.M, label)


def search_operator(chain: MarkovChain, z: int
                    ) -> tuple[EdgeOperator, EdgeOperator, EdgeOperator, np.ndarray]:
    """U2 = SWAP.ref(A), U1 = I - 2|mu><mu| with mu = |z>|p_z>, and U = U2 U1."""
    if not chain.is_reversible():
        raise NonReversible("search operator requires a reversible chain")
    A, _ = star_states(chain)
    mu = A[z].copy()
    refA = _reflection(A, chain.n, "refA")
    U2 = EdgeOperator(chain.n, swap_operator(chain.n).M @ refA.M, "U2")
    U1 = EdgeOperator(chain.n, np.eye(chain.n**2) - 2.0 * np.outer(mu, mu), "U1")
    U = EdgeOperator(chain.n, U2.M @ U1.M, "U")
    return U2, U1, U, mu


@dataclass(frozen=True)
class WalkDecomposition:
    """Blocks of the fixed vector phi0 = sum_x sqrt(pi_x)|x>|phi^x>."""

    pi_x: np.ndarray
    phi_x: np.ndarray   # row x is phi^x
    psi_x: np.ndarray   # row x is F^x phi^x


def reflection_walk(phi_blocks: np.ndarray, label: str = "U2") -> EdgeOperator:
    """SWAP.F with F^x the reflection through the given per-state unit vector.

    The +1 eigenspace, after discarding inert antisymmetric vectors
    orthogonal to the block span, must be one-dimensional.
    """
    blocks = np.asarray(phi_blocks, dtype=float)
    n = blocks.shape[0]
    if blocks.shape != (n, n):
        raise ValueError("expected one length-n block per state")
    norms = np.linalg.norm(blocks, axis=1)
    if np.max(np.abs(norms - 1.0)) > 1e-10:
        raise ValueError("reflection blocks must be unit vectors")
    F = np.zeros((n * n, n * n))
    for x in range(n):
        F[x * n:(x + 1) * n, x * n:(x + 1) * n] = \
            2.0 * np.outer(blocks[x], blocks[x]) - np.eye(n)
    U2 = EdgeOperator(n, swap_operator(n).M @ F, label)
    try:
        fixed_vector(U2)
    except NoUniqueFixedVector as exc:
        raise DegeneratePlusOneSpace(str(exc)) from exc
    return U2


def fixed_vector(U2: EdgeOperator, tol: float = 1e-9) -> np.ndarray:
    """The walk's fixed vector, unique modulo inert antisymmetric junk.

    Junk means +1 eigenvectors v with SWAP v = -v; they are orthogonal to
    every product state the walk dynamics can reach.  Raises when the
    remaining +1 space is not one-dimensional.
    """
    spec = orthogonal_spectrum(U2.M)
    if not spec.plus_vectors:
        raise NoUniqueFixedVector("walk has no +1 eigenvector")
    Q = np.column_stack(spec.plus_vectors)
    S = swap_operator(U2.n).M
    ns = sla.null_space(S @ Q + Q, rcond=tol)
    n_eff = Q.shape[1] - ns.shape[1]
    if n_eff != 1:
        raise NoUniqueFixedVector(
            f"+1 space has {Q.shape[1]} dims, {ns.shape[1]} junk")
    if ns.shape[1] == 0:
        phi0 = Q[:, 0]
    else:
        proj = np.eye(Q.shape[1]) - ns @ ns.T
        vals, vecs = np.linalg.eigh(proj)
        phi0 = Q @ vecs[:, -1]
    phi0 = phi0 / np.linalg.norm(phi0)
    if phi0.sum() < 0:
        phi0 = -phi0
    return phi0


def walk_decomposition(U2: EdgeOperator) -> WalkDecomposition:
    """Split the fixed vector into per-state blocks pi_x, phi^x, psi^x."""
    n = U2.n
    phi0 = fixed_vector(U2)
    F = swap_operator(n).M @ U2.M
    off = F.copy()
    for x in range(n):
        off[x * n:(x + 1) * n, x * n:(x + 1) * n] = 0.0
    assert np.max(np.abs(off)) <= 1e-10, "operator is not of the form SWAP.F"

    pi_x = np.zeros(n)
    phi_x = np.zeros((n, n))
    psi_x = np.zeros((n, n))
    for x in range(n):
        block = phi0[x * n:(x + 1) * n]
        w = float(block @ block)
        pi_x[x] = w
        if w < 1e-12:
            raise ZeroMass(f"state {x} carries no weight in the fixed vector")
        phi_x[x] = block / np.sqrt(w)
        psi_x[x] = F[x * n:(x + 1) * n, x * n:(x + 1) * n] @ phi_x[x]
    return WalkDecomposition(pi_x=pi_x, phi_x=phi_x, psi_x=psi_x)


def classical_analogue(U2: EdgeOperator) -> MarkovChain:
    """Markov chain p_xy = <y|phi^x>^2 read off the walk's fixed vector.

    The result keeps the fixed vector's block weights as its stationary
    distribution; it is reversible exactly when SWAP fixes phi0.
    """
    dec = walk_decomposition(U2)
    P = dec.phi_x**2
    P = P / P.sum(axis=1)[:, None]
    chain = _build(P, require_aperiodic=False)
    assert np.max(np.abs(chain.pi - dec.pi_x)) <= 1e-9, \
        "fixed-vector weights are not stationary for the analogue"
    return chain
