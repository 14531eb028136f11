"""Exact reference solver for discrete optimal transport at desk scale.

Every closed-form distance in this package is checked against the
transportation linear program solved here. The solver itself is HiGHS via
``scipy.optimize.linprog``; what makes it an oracle is the certificate: each
solution is verified against recovered dual potentials (dual feasibility
everywhere, complementary slackness on the support), and small instances can
be cross-checked by exhaustive vertex enumeration. Guards are hard errors,
never silent truncation; the oracle must not approximate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog

from .distributions import Distribution1D
from .errors import (
    CapacityError,
    CertificationError,
    ConstructionError,
    DomainError,
)

__all__ = [
    "DiscreteCoupling",
    "TransportInstance",
    "TransportSolution",
    "solve_exact",
    "enumerate_extreme_couplings",
    "marginalize",
    "monotone_plan_1d",
    "transport_cost",
]

# Entries more negative than this are rejected; above it they are rounding
# noise and get clamped to zero.
MASS_CLAMP_TOL = 1e-12

TOTAL_MASS_TOL = 1e-10
DUAL_CERT_TOL = 1e-9

# Remaining ladder mass below this counts as exhausted, so equal cumulative
# weights advance both sides at once and no zero-width cell is emitted.
LADDER_TIE_TOL = 1e-15


def _as_points(points: Sequence | np.ndarray, name: str) -> np.ndarray:
    """Coerce scalars / flat lists / (k, d) arrays into a (k, d) float array."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ConstructionError(f"{name} must be a nonempty list of points")
    if not np.all(np.isfinite(arr)):
        raise ConstructionError(f"{name} must contain only finite coordinates")
    return arr


@dataclass(frozen=True)
class DiscreteCoupling:
    """Nonnegative mass matrix over the product of two finite supports."""

    row_points: np.ndarray
    col_points: np.ndarray
    mass: np.ndarray

    def __post_init__(self) -> None:
        rp = _as_points(self.row_points, "row_points")
        cp = _as_points(self.col_points, "col_points")
        mat = np.asarray(self.mass, dtype=float)
        if mat.shape != (rp.shape[0], cp.shape[0]):
            raise ConstructionError(
                f"mass shape {mat.shape} does not match supports "
                f"({rp.shape[0]}, {cp.shape[0]})"
            )
        if rp.shape[1] != cp.shape[1]:
            raise ConstructionError("row and column supports must share a dimension")
        if np.any(mat < -MASS_CLAMP_TOL):
            raise ConstructionError("coupling mass has a materially negative entry")
        mat = np.where(mat < 0.0, 0.0, mat)
        total = float(mat.sum())
        if abs(total - 1.0) > TOTAL_MASS_TOL:
            raise ConstructionError(f"total mass is {total!r}, expected 1")
        for arr, field in ((rp, "row_points"), (cp, "col_points"), (mat, "mass")):
            arr.flags.writeable = False
            object.__setattr__(self, field, arr)

    @property
    def dim(self) -> int:
        return int(self.row_points.shape[1])

    @property
    def row_weights(self) -> np.ndarray:
        return self.mass.sum(axis=1)

    @property
    def col_weights(self) -> np.ndarray:
        return self.mass.sum(axis=0)

    def support(self, threshold: float = MASS_CLAMP_TOL) -> np.ndarray:
        """Boolean mask of cells carrying more than ``threshold`` mass."""
        return self.mass > threshold


@dataclass(frozen=True)
class TransportInstance:
    """A discrete transport problem with cost ||x - y||_q ** p."""

    mu_points: np.ndarray
    mu_weights: np.ndarray
    nu_points: np.ndarray
    nu_weights: np.ndarray
    p: float = 1.0
    q: float | None = None

    def __post_init__(self) -> None:
        mp = _as_points(self.mu_points, "mu_points")
        npts = _as_points(self.nu_points, "nu_points")
        if mp.shape[1] != npts.shape[1]:
            raise ConstructionError("mu and nu atoms must share a dimension")
        mw = np.asarray(self.mu_weights, dtype=float).ravel()
        nw = np.asarray(self.nu_weights, dtype=float).ravel()
        for pts, w, name in ((mp, mw, "mu"), (npts, nw, "nu")):
            if w.size != pts.shape[0]:
                raise ConstructionError(f"{name} weights do not match its atoms")
            if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
                raise ConstructionError(f"{name} weights must be strictly positive")
            if abs(float(w.sum()) - 1.0) > 1e-12:
                raise ConstructionError(f"{name} weights must sum to 1 within 1e-12")
        if not float(self.p) >= 1.0:
            raise ConstructionError("cost order p must be >= 1")
        q = float(self.p) if self.q is None else float(self.q)
        if not q >= 1.0:
            raise ConstructionError("norm order q must be >= 1")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", q)
        for arr, field in ((mp, "mu_points"), (mw, "mu_weights"), (npts, "nu_points"), (nw, "nu_weights")):
            arr.flags.writeable = False
            object.__setattr__(self, field, arr)

    @classmethod
    def from_distributions(
        cls,
        mu: Distribution1D,
        nu: Distribution1D,
        p: float,
        q: float | None = None,
    ) -> "TransportInstance":
        if not (mu.is_discrete and nu.is_discrete):
            raise DomainError("the oracle only handles discrete measures")
        return cls(mu.atoms, mu.weights, nu.atoms, nu.weights, p=p, q=q)

    @property
    def cost_matrix(self) -> np.ndarray:
        diff = np.abs(self.mu_points[:, None, :] - self.nu_points[None, :, :])
        norms = np.sum(diff**self.q, axis=2) ** (1.0 / self.q)
        return norms**self.p


class TransportSolution(NamedTuple):
    value: float
    plan: DiscreteCoupling
    row_potentials: np.ndarray
    col_potentials: np.ndarray


def transport_cost(coupling: DiscreteCoupling, p: float, q: float | None = None) -> float:
    """Direct plan cost: sum of mass times ||x_i - y_j||_q ** p."""
    p = float(p)
    q = p if q is None else float(q)
    diff = np.abs(coupling.row_points[:, None, :] - coupling.col_points[None, :, :])
    cost = np.sum(diff**q, axis=2) ** (p / q)
    return float(np.sum(coupling.mass * cost))


def solve_exact(
    instance: TransportInstance,
    max_total_atoms: int = 128,
) -> TransportSolution:
    """Solve the transportation LP exactly and certify the optimum.

    The returned plan and value are accepted only if recovered dual
    potentials (u, v) satisfy u_i + v_j <= c_ij everywhere and meet it with
    equality on the support of the plan, both within ``DUAL_CERT_TOL``.
    """
    m = instance.mu_weights.size
    n = instance.nu_weights.size
    if m + n > max_total_atoms:
        raise CapacityError(
            f"instance has {m} + {n} atoms, exceeding the guard of {max_total_atoms}"
        )
    cost = instance.cost_matrix
    a_eq = np.zeros((m + n, m * n))
    for i in range(m):
        a_eq[i, i * n : (i + 1) * n] = 1.0
    for j in range(n):
        a_eq[m + j, j::n] = 1.0
    b_eq = np.concatenate([instance.mu_weights, instance.nu_weights])
    res = linprog(cost.ravel(), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        raise CertificationError(f"LP solver failed with status {res.status}: {res.message}")

    mass = res.x.reshape(m, n)
    mass = np.where(np.abs(mass) < MASS_CLAMP_TOL, 0.0, mass)
    plan = DiscreteCoupling(instance.mu_points, instance.nu_points, mass)
    value = float(np.sum(plan.mass * cost))

    potentials = np.asarray(res.eqlin.marginals, dtype=float)
    u, v = potentials[:m], potentials[m:]
    slack = cost - (u[:, None] + v[None, :])
    if float(slack.min()) < -DUAL_CERT_TOL:
        raise CertificationError("dual infeasibility: u_i + v_j exceeds the cost somewhere")
    support = plan.support()
    if support.any() and float(np.max(np.abs(slack[support]))) > DUAL_CERT_TOL:
        raise CertificationError("complementary slackness fails on the plan support")
    if abs(float(b_eq @ potentials) - value) > max(DUAL_CERT_TOL, DUAL_CERT_TOL * abs(value)):
        raise CertificationError("dual objective does not match the primal value")
    return TransportSolution(value, plan, u, v)


def marginalize(plan: DiscreteCoupling, side: str) -> tuple[np.ndarray, np.ndarray]:
    """Project a coupling onto one side, returning (atoms, weights)."""
    if side == "row":
        return plan.row_points, plan.row_weights
    if side == "col":
        return plan.col_points, plan.col_weights
    raise DomainError(f"side must be 'row' or 'col', got {side!r}")


def monotone_plan_1d(mu: Distribution1D, nu: Distribution1D) -> DiscreteCoupling:
    """Comonotone coupling of two discrete measures on R.

    Pairs cumulative-weight intervals in atom order (a northwest ladder
    merge); ties in the cumulative ladders advance both sides at once so no
    zero-width cell appears. This realizes the joint law of
    (F^{-1}(U), G^{-1}(U)).
    """
    if not (mu.is_discrete and nu.is_discrete):
        raise DomainError("monotone_plan_1d needs discrete measures")
    wf = mu.weights
    wg = nu.weights
    mass = np.zeros((wf.size, wg.size))
    i = j = 0
    remaining_f = float(wf[0])
    remaining_g = float(wg[0])
    while True:
        step = min(remaining_f, remaining_g)
        mass[i, j] += step
        remaining_f -= step
        remaining_g -= step
        advance_f = remaining_f <= LADDER_TIE_TOL
        advance_g = remaining_g <= LADDER_TIE_TOL
        if advance_f:
            i += 1
            if i < wf.size:
                remaining_f = float(wf[i])
        if advance_g:
            j += 1
            if j < wg.size:
                remaining_g = float(wg[j])
        if i >= wf.size or j >= wg.size:
            break
    return DiscreteCoupling(mu.atoms, nu.atoms, mass)


def enumerate_extreme_couplings(
    mu_weights: Sequence[float] | np.ndarray,
    nu_weights: Sequence[float] | np.ndarray,
    row_points: Sequence | np.ndarray | None = None,
    col_points: Sequence | np.ndarray | None = None,
    max_side: int = 4,
) -> list[DiscreteCoupling]:
    """All vertices of the transportation polytope with the given margins.

    A vertex is a feasible plan whose support is a spanning forest of the
    bipartite supply/demand graph. Enumeration walks every spanning tree
    (edge subsets of size m + n - 1 passing a union-find acyclicity check),
    peels leaves to solve for the unique masses, keeps the nonnegative ones,
    and deduplicates. Vertex counts explode combinatorially, hence the hard
    size guard.
    """
    mw = np.asarray(mu_weights, dtype=float).ravel()
    nw = np.asarray(nu_weights, dtype=float).ravel()
    m, n = mw.size, nw.size
    if m > max_side or n > max_side:
        raise CapacityError(f"margins of size {m} x {n} exceed the guard of {max_side}")
    if abs(float(mw.sum()) - float(nw.sum())) > 1e-9:
        raise DomainError("margins must carry equal total mass")
    rp = np.arange(m, dtype=float) if row_points is None else row_points
    cp = np.arange(n, dtype=float) if col_points is None else col_points

    edges = list(itertools.product(range(m), range(n)))
    seen: set[tuple] = set()
    vertices: list[DiscreteCoupling] = []
    for tree in itertools.combinations(edges, m + n - 1):
        if not _is_spanning_tree(tree, m, n):
            continue
        mass = _solve_tree_masses(tree, mw, nw)
        if mass is None or float(mass.min()) < -MASS_CLAMP_TOL:
            continue
        mass = np.where(mass < 0.0, 0.0, mass)
        key = tuple(np.round(mass, 12).ravel())
        if key in seen:
            continue
        seen.add(key)
        vertices.append(DiscreteCoupling(rp, cp, mass))
    return vertices


def _is_spanning_tree(tree: Sequence[tuple[int, int]], m: int, n: int) -> bool:
    parent = list(range(m + n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in tree:
        ra, rb = find(i), find(m + j)
        if ra == rb:
            return False
        parent[ra] = rb
    root = find(0)
    return all(find(k) == root for k in range(m + n))


def _solve_tree_masses(
    tree: Sequence[tuple[int, int]],
    mu_weights: np.ndarray,
    nu_weights: np.ndarray,
) -> np.ndarray | None:
    """Peel tree leaves to recover the unique masses on its edges."""
    m, n = mu_weights.size, nu_weights.size
    supply = np.concatenate([mu_weights, nu_weights]).astype(float)
    adjacency: dict[int, set[int]] = {k: set() for k in range(m + n)}
    edge_of = {}
    for idx, (i, j) in enumerate(tree):
        adjacency[i].add(m + j)
        adjacency[m + j].add(i)
        edge_of[(i, m + j)] = idx
        edge_of[(m + j, i)] = idx
    mass = np.zeros((m, n))
    leaves = [k for k, nbrs in adjacency.items() if len(nbrs) == 1]
    for _ in range(len(tree)):
        if not leaves:
            return None
        leaf = leaves.pop()
        if not adjacency[leaf]:
            return None
        other = next(iter(adjacency[leaf]))
        amount = supply[leaf]
        i, j = (leaf, other - m) if leaf < m else (other, leaf - m)
        mass[i, j] = amount
        supply[leaf] = 0.0
        supply[other] -= amount
        adjacency[leaf].remove(other)
        adjacency[other].remove(leaf)
        if len(adjacency[other]) == 1:
            leaves.append(other)
    return mass
