"""One-dimensional probability measures for transport-distance work.

A measure is exposed through exactly two maps: the right-continuous CDF
``F`` and the left-continuous generalized inverse (quantile function)
``F^{-1}(u) = inf{x : F(x) >= u}``. Discrete and empirical measures store a
merged, strictly increasing atom ladder; parametric measures wrap
caller-supplied CDF and quantile evaluators.

Instances are immutable and all operations are pure, so values can be
shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .errors import ConstructionError, DivergenceError, DomainError

__all__ = [
    "Distribution1D",
    "from_samples",
    "from_atoms",
    "from_quantile",
    "tail_decay_diagnostic",
    "comonotone_pushforward",
    "QUANTILE_TIE_TOL",
    "QUAD_EPS",
]

# Cumulative sums of floating weights drift near exact ladder boundaries;
# without this slack the generalized inverse would skip an atom there.
QUANTILE_TIE_TOL = 1e-12

# Absolute tolerance on the total weight at construction time.
WEIGHT_SUM_TOL = 1e-12

# Endpoint clip for quadrature on (0, 1); quantile integrands of
# heavy-tailed measures blow up at 0 and 1.
QUAD_EPS = 1e-9

DISCRETE = "discrete"
EMPIRICAL = "empirical"
PARAMETRIC = "parametric-quantile"


@dataclass(frozen=True)
class Distribution1D:
    """A probability measure on R seen through CDF and quantile evaluation.

    ``kind`` is a semantic tag (``"discrete"``, ``"empirical"`` or
    ``"parametric-quantile"``), not a storage format: empirical measures are
    stored as merged discrete atoms, since every downstream formula consumes
    only the (CDF, quantile) pair.

    ``p_moment_order`` is the largest order ``p`` for which membership in
    the Wasserstein space of order ``p`` is asserted. Discrete measures get
    ``inf``; parametric constructors must state it explicitly.

    ``tail_moment_bound(p, eps)``, when supplied by a parametric evaluator,
    must bound the quantile integral of ``|F^{-1}(u)|^p`` over
    ``(0, eps) + (1 - eps, 1)``. It feeds error accounting in distance
    computations; no numerical inversion is ever attempted here.
    """

    kind: str
    atoms: np.ndarray | None = None
    weights: np.ndarray | None = None
    cdf_fn: Callable[[float], float] | None = None
    quantile_fn: Callable[[float], float] | None = None
    p_moment_order: float = math.inf
    tail_moment_bound: Callable[[float, float], float] | None = None

    def __post_init__(self) -> None:
        if self.kind in (DISCRETE, EMPIRICAL):
            if self.atoms is None or self.weights is None:
                raise ConstructionError("discrete measure needs atoms and weights")
        elif self.kind == PARAMETRIC:
            if self.cdf_fn is None or self.quantile_fn is None:
                raise ConstructionError(
                    "parametric measure needs both a CDF and a quantile evaluator"
                )
        else:
            raise ConstructionError(f"unknown distribution kind {self.kind!r}")
        if not self.p_moment_order >= 1.0:
            raise ConstructionError("p_moment_order must be >= 1")

    # -- structure ---------------------------------------------------------

    @property
    def is_discrete(self) -> bool:
        return self.atoms is not None

    @property
    def n_atoms(self) -> int:
        if self.atoms is None:
            raise DomainError("parametric measure has no atoms")
        return int(self.atoms.size)

    @cached_property
    def cumulative_weights(self) -> np.ndarray:
        """Cumulative weight ladder; last entry pinned to exactly 1.0."""
        if self.weights is None:
            raise DomainError("parametric measure has no weight ladder")
        cum = np.cumsum(self.weights)
        cum[-1] = 1.0
        cum.flags.writeable = False
        return cum

    @property
    def support_bounds(self) -> tuple[float, float]:
        if self.atoms is None:
            raise DomainError("parametric measure has unbounded support metadata")
        return float(self.atoms[0]), float(self.atoms[-1])

    # -- the two fundamental maps -------------------------------------------

    def cdf(self, x: float) -> float:
        """P(X <= x); right-continuous, 0 below the support and 1 above it."""
        x = float(x)
        if math.isnan(x):
            raise DomainError("cdf requires a real argument")
        if self.atoms is not None:
            idx = int(np.searchsorted(self.atoms, x, side="right"))
            if idx == 0:
                return 0.0
            return float(self.cumulative_weights[idx - 1])
        value = float(self.cdf_fn(x))  # type: ignore[misc]
        return min(1.0, max(0.0, value))

    def quantile(self, u: float) -> float:
        """Generalized inverse inf{x : F(x) >= u} for u in (0, 1].

        On discrete measures this is the smallest atom whose cumulative
        weight reaches ``u`` within ``QUANTILE_TIE_TOL``; it is
        nondecreasing and left-continuous. Parametric evaluators may return
        ``inf`` at u == 1 when the support is unbounded above.
        """
        u = float(u)
        if not 0.0 < u <= 1.0:
            raise DomainError(f"quantile requires u in (0, 1], got {u}")
        if self.atoms is not None:
            idx = int(
                np.searchsorted(self.cumulative_weights, u - QUANTILE_TIE_TOL, side="left")
            )
            return float(self.atoms[idx])
        return float(self.quantile_fn(u))  # type: ignore[misc]

    def quantile_many(self, u: Sequence[float] | np.ndarray) -> np.ndarray:
        """Vectorized :meth:`quantile`; same domain checks per entry."""
        arr = np.asarray(u, dtype=float)
        if arr.size and (np.min(arr) <= 0.0 or np.max(arr) > 1.0):
            raise DomainError("quantile requires u in (0, 1]")
        if self.atoms is not None:
            idx = np.searchsorted(
                self.cumulative_weights, arr - QUANTILE_TIE_TOL, side="left"
            )
            return self.atoms[idx]
        return np.array([float(self.quantile_fn(v)) for v in arr])  # type: ignore[misc]

    # -- moments -------------------------------------------------------------

    def p_moment(self, p: float) -> float:
        """E|X|^p: exact weighted sum for discrete measures, quadrature of
        the quantile representation on (QUAD_EPS, 1 - QUAD_EPS) otherwise.
        """
        p = float(p)
        if p < 1.0:
            raise DomainError("moment order must be >= 1")
        if self.atoms is not None:
            return float(np.sum(self.weights * np.abs(self.atoms) ** p))
        return _quad_checked(
            lambda u: abs(float(self.quantile_fn(u))) ** p,  # type: ignore[misc]
            QUAD_EPS,
            1.0 - QUAD_EPS,
            what=f"moment of order {p}",
        )[0]


def _quad_checked(fn, lo: float, hi: float, *, what: str) -> tuple[float, float]:
    """scipy adaptive quadrature, promoting non-convergence to an error."""
    value, abserr, info, *rest = integrate.quad(fn, lo, hi, limit=200, full_output=1)
    if rest:
        raise DivergenceError(f"quadrature failed for {what}: {rest[0]}")
    return float(value), float(abserr)


# -- constructors -------------------------------------------------------------


def from_samples(samples: Sequence[float] | np.ndarray) -> Distribution1D:
    """Empirical measure: weight 1/n per sample, duplicates merged."""
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size == 0:
        raise ConstructionError("cannot build a distribution from zero samples")
    if not np.all(np.isfinite(arr)):
        raise ConstructionError("samples must all be finite")
    atoms, counts = np.unique(arr, return_counts=True)
    weights = counts / arr.size
    atoms.flags.writeable = False
    weights.flags.writeable = False
    return Distribution1D(kind=EMPIRICAL, atoms=atoms, weights=weights)


def from_atoms(
    atoms: Sequence[float] | np.ndarray,
    weights: Sequence[float] | np.ndarray,
) -> Distribution1D:
    """Discrete measure from (atom, weight) pairs.

    Duplicate atoms are merged by accumulating their weights so the CDF is a
    step function with strictly increasing jump locations. Weights must be
    strictly positive and sum to 1 within ``WEIGHT_SUM_TOL``.
    """
    a = np.asarray(atoms, dtype=float).ravel()
    w = np.asarray(weights, dtype=float).ravel()
    if a.size == 0:
        raise ConstructionError("discrete measure needs at least one atom")
    if a.shape != w.shape:
        raise ConstructionError("atoms and weights must have matching lengths")
    if not np.all(np.isfinite(a)):
        raise ConstructionError("atoms must all be finite")
    if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
        raise ConstructionError("weights must be finite and strictly positive")
    total = float(np.sum(w))
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise ConstructionError(f"weights sum to {total!r}, expected 1 within {WEIGHT_SUM_TOL}")
    uniq, inverse = np.unique(a, return_inverse=True)
    merged = np.bincount(inverse, weights=w) / total
    uniq.flags.writeable = False
    merged.flags.writeable = False
    return Distribution1D(kind=DISCRETE, atoms=uniq, weights=merged)


def from_quantile(
    quantile_fn: Callable[[float], float],
    cdf_fn: Callable[[float], float],
    p_moment_order: float,
    tail_moment_bound: Callable[[float, float], float] | None = None,
) -> Distribution1D:
    """Parametric measure from caller-supplied evaluators.

    Both maps are required: inversion accuracy is the caller's
    responsibility, which keeps downstream error bounds compositional.
    """
    return Distribution1D(
        kind=PARAMETRIC,
        cdf_fn=cdf_fn,
        quantile_fn=quantile_fn,
        p_moment_order=float(p_moment_order),
        tail_moment_bound=tail_moment_bound,
    )


# -- diagnostics and deterministic couplings ----------------------------------


def tail_decay_diagnostic(
    dist: Distribution1D,
    r: float,
    grid: Sequence[float] | np.ndarray,
) -> list[tuple[float, float, float]]:
    """Tail decay terms (x, x^r * (1 - F(x)), x^r * F(-x)) along a grid.

    A finite moment of order r forces both terms to vanish as x grows; for
    compactly supported measures the entries are exactly zero beyond the
    support.
    """
    r = float(r)
    if r <= 0.0:
        raise DomainError("tail order r must be positive")
    g = np.asarray(grid, dtype=float).ravel()
    if g.size and (np.any(g <= 0.0) or np.any(np.diff(g) <= 0.0)):
        raise DomainError("grid must be strictly increasing and positive")
    out = []
    for x in g:
        upper = x**r * (1.0 - dist.cdf(x))
        lower = x**r * dist.cdf(-x)
        out.append((float(x), float(upper), float(lower)))
    return out


def comonotone_pushforward(
    f: Distribution1D,
    g: Distribution1D,
    n: int,
) -> list[tuple[float, float]]:
    """Deterministic comonotone sample: quantile pairs at midpoints.

    Returns the n pairs (F^{-1}(u_k), G^{-1}(u_k)) with u_k = (k - 1/2)/n,
    the discretized law of (F^{-1}(U), G^{-1}(U)) for a single uniform U.
    """
    if n < 1:
        raise DomainError("n must be a positive integer")
    mids = (np.arange(n) + 0.5) / n
    fx = f.quantile_many(mids)
    gx = g.quantile_many(mids)
    return [(float(a), float(b)) for a, b in zip(fx, gx)]
