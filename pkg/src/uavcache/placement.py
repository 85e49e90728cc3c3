"""Content popularity and placement strategies.

Every strategy returns a PlacementVector in the feasible set: per-content
caching probabilities in [0, 1] summing to the cache size S.  The provided
strategies are the top-S indicator placement, the mixed popular/randomized
split with its greedy optimizer, the concave hit-rate maximizer, the
recursive EE-rescaled hit-rate iteration, and an LRU occupancy reference.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError

SUM_TOL = 1e-9


@dataclass(frozen=True)
class Catalog:
    """Content library with a normalized, nonincreasing popularity profile."""

    size: int
    skew: float
    popularity: tuple[float, ...]

    def __post_init__(self):
        if self.size < 1 or len(self.popularity) != self.size:
            raise ConfigurationError("popularity length must equal size")
        a = np.asarray(self.popularity, dtype=float)
        if np.any(a <= 0.0):
            raise ConfigurationError("popularities must be positive")
        if abs(a.sum() - 1.0) > 1e-12 * self.size:
            raise ConfigurationError("popularities must sum to 1")
        if np.any(np.diff(a) > 1e-15):
            # Index c is the c-th most popular content.
            raise ConfigurationError("popularities must be nonincreasing")

    @property
    def weights(self) -> np.ndarray:
        return np.asarray(self.popularity, dtype=float)


def zipf_popularity(size: int, kappa: float) -> Catalog:
    """Zipf catalog: a_m proportional to m^-kappa, normalized."""
    if size < 1:
        raise ConfigurationError("catalog size must be >= 1")
    if kappa < 0:
        raise ConfigurationError("skew must be nonnegative")
    ranks = np.arange(1, size + 1, dtype=float)
    w = ranks ** (-kappa)
    w /= w.sum()
    return Catalog(size=size, skew=kappa, popularity=tuple(w))


@dataclass(frozen=True, eq=False)
class PlacementVector:
    """Caching probabilities p_1..p_F with sum(p) = S and 0 <= p <= 1."""

    probs: tuple[float, ...]
    cache_size: float

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if np.any(p < -1e-12) or np.any(p > 1.0 + 1e-12):
            raise ConfigurationError("caching probabilities must lie in [0, 1]")
        if abs(p.sum() - self.cache_size) > SUM_TOL * max(1.0, len(p)):
            raise ConfigurationError(
                f"caching probabilities sum to {p.sum()!r}, "
                f"expected {self.cache_size!r}")

    @classmethod
    def from_array(cls, p, cache_size) -> "PlacementVector":
        p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
        return cls(probs=tuple(p), cache_size=float(cache_size))

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)

    def to_csv_rows(self, catalog: Catalog):
        """(index, popularity, p_c) rows for inspection dumps."""
        for c, (a, p) in enumerate(zip(catalog.popularity, self.probs), start=1):
            yield c, a, p


def mpcp(catalog: Catalog, cache_size: int) -> PlacementVector:
    """Most-popular content placement: cache the top-S contents everywhere."""
    _check_cache_size(catalog, cache_size)
    p = np.zeros(catalog.size)
    p[:cache_size] = 1.0
    return PlacementVector.from_array(p, cache_size)


def _check_cache_size(catalog, cache_size):
    if not 0 <= cache_size <= catalog.size:
        raise ConfigurationError(
            f"cache size must be in [0, {catalog.size}], got {cache_size}")


def mprc_probs(catalog: Catalog, cache_size: int, s_pop: int) -> PlacementVector:
    """Mixed popular/randomized placement for a given popular-slot count.

    The first s_pop slots pin the most popular contents; the remaining
    S - s_pop slots hold a sliding window drawn uniformly over the tail,
    giving the four-branch piecewise profile over content index.
    """
    _check_cache_size(catalog, cache_size)
    if not 0 <= s_pop <= cache_size:
        raise ConfigurationError("need 0 <= s_pop <= cache size")
    p = mprc_profile(catalog.size, cache_size, s_pop)
    if np.any(p > 1.0 + 1e-12):
        raise ConfigurationError(
            f"randomized span {cache_size - s_pop} exceeds the "
            f"{catalog.size - cache_size + 1} sliding-window positions; "
            "increase s_pop")
    return PlacementVector.from_array(p, cache_size)


def mprc_profile(size: int, cache_size: int, s_pop: int) -> np.ndarray:
    """Raw piecewise MPRC profile (no box-constraint validation)."""
    s_rnd = cache_size - s_pop
    span = size - cache_size + 1
    c = np.arange(1, size + 1)
    p = np.zeros(size, dtype=float)
    p[c <= s_pop] = 1.0
    mid = (c >= s_pop + 1) & (c <= cache_size)
    p[mid] = (c[mid] - s_pop) / span
    flat = (c > cache_size) & (c <= size - s_rnd + 1)
    p[flat] = s_rnd / span
    tail = c > size - s_rnd + 1
    p[tail] = (size - c[tail] + 1) / span
    return p


def feasible_s_pop_range(size: int, cache_size: int) -> range:
    """s_pop values whose MPRC profile respects the box constraint."""
    s_pop_min = max(0, cache_size - (size - cache_size + 1))
    return range(s_pop_min, cache_size + 1)


def mprc_optimize(catalog: Catalog, cache_size: int,
                  ee_eval: Callable[[PlacementVector], float]
                  ) -> tuple[int, PlacementVector]:
    """Greedy search over the popular-slot count, maximizing network EE.

    Evaluates every feasible s_pop and returns the argmax; ties break
    toward the larger s_pop (closer to pure most-popular caching).
    """
    best_s, best_p, best_val = None, None, -math.inf
    for s_pop in feasible_s_pop_range(catalog.size, cache_size):
        placement = mprc_probs(catalog, cache_size, s_pop)
        val = ee_eval(placement)
        if val >= best_val:
            best_s, best_p, best_val = s_pop, placement, val
    return best_s, best_p


def hitrate_solver(weights: Sequence[float], theta_cop: float,
                   cache_size: float) -> PlacementVector:
    """Maximize sum_c w_c * (1 - exp(-theta * p_c)) over the feasible set.

    Strictly concave separable program; the KKT point is
    p_c = clamp(ln(theta * w_c / mu) / theta, 0, 1) with the multiplier mu
    found by bisection so that sum(p) = S.

    Parameters
    ----------
    weights : nonnegative per-content weights (not necessarily normalized)
    theta_cop : coverage coefficient (> 0): the mean number of caching
        UAVs whose placement the program coordinates over
    cache_size : cache budget S, 0 <= S <= F

    Returns
    -------
    PlacementVector maximizing the weighted hit rate.
    """
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0):
        raise ConfigurationError("weights must be nonnegative")
    if theta_cop <= 0:
        raise ConfigurationError("theta_cop must be positive")
    f = len(w)
    if not 0 <= cache_size <= f:
        raise ConfigurationError("cache size out of range")
    if cache_size == 0:
        return PlacementVector.from_array(np.zeros(f), 0.0)
    if not np.any(w > 0):
        warnings.warn("all hit-rate weights are zero; returning uniform S/F",
                      RuntimeWarning, stacklevel=2)
        return PlacementVector.from_array(np.full(f, cache_size / f), cache_size)

    positive = w > 0
    if positive.sum() <= cache_size:
        # Every rewarded content fits at p = 1; spread the leftover budget
        # uniformly over the indifferent contents.
        p = np.where(positive, 1.0, 0.0)
        rest = (~positive).sum()
        if rest:
            p[~positive] = (cache_size - positive.sum()) / rest
        return PlacementVector.from_array(p, cache_size)

    # KKT inversion in log space: p_c = clamp((ln(theta*w_c) - t)/theta)
    # with t = ln(mu); immune to under/overflow of extreme weight ratios.
    log_tw = np.where(positive, np.log(theta_cop) + np.log(
        np.where(positive, w, 1.0)), -np.inf)

    def budget(t):
        with np.errstate(invalid="ignore"):
            p = np.where(positive, (log_tw - t) / theta_cop, 0.0)
        return np.clip(p, 0.0, 1.0)

    lo = log_tw[positive].min() - theta_cop - 1.0
    hi = log_tw[positive].max()
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if budget(mid).sum() > cache_size:
            lo = mid
        else:
            hi = mid
    p = budget(0.5 * (lo + hi))
    # Fixed-order residual repair keeps sum(p) = S exact despite clamping.
    p = _repair_sum(p, cache_size)
    return PlacementVector.from_array(p, cache_size)


def _repair_sum(p, target):
    """Absorb sub-1e-6 rounding residue; anything larger is a solver bug."""
    p = np.clip(p, 0.0, 1.0)
    residual = target - p.sum()
    if residual == 0.0:
        return p
    if abs(residual) > 1e-6 * max(1.0, target):
        raise ConfigurationError(
            f"placement misses the budget by {residual!r}")
    if residual > 0:
        room = 1.0 - p
    else:
        room = -p
    movable = np.abs(room) > 0
    total_room = room[movable].sum()
    p = p.copy()
    p[movable] += room[movable] * (residual / total_room)
    return np.clip(p, 0.0, 1.0)


def hitrate_objective(weights, theta_cop, placement: PlacementVector) -> float:
    w = np.asarray(weights, dtype=float)
    return float(np.sum(w * (1.0 - np.exp(-theta_cop * placement.array))))


def ee_softmax_scores(eta: np.ndarray, gain: float) -> np.ndarray:
    """Soft-max scale factors from per-content EE values.

    Scores are spread-normalized then shifted by their maximum, so the
    result is exactly invariant both to adding a constant to every EE value
    and to overall rescaling; `gain` sets the contrast between the best and
    worst content (e^gain).
    """
    eta = np.asarray(eta, dtype=float)
    spread = eta.max() - eta.min()
    if spread <= 0.0:
        return np.full(eta.shape, 1.0 / len(eta))
    scores = gain * (eta - eta.max()) / spread
    b = np.exp(scores)
    return b / b.sum()


@dataclass(frozen=True)
class RshrResult:
    placement: PlacementVector
    objectives: tuple[float, ...]
    iterations: int
    converged: bool
    aborted: bool = False
    note: str = ""


def rshr(catalog: Catalog, cache_size: float, theta_cop: float,
         ee_per_content: Callable[[float], float],
         max_iter: int = 25, tol: float = 1e-4,
         softmax_gain_scale: float = 2.0) -> RshrResult:
    """Recursive scaled hit rate.

    Starting from unit scales, each iteration solves the hit-rate program
    with weights a_c * b_c, re-evaluates the per-content EE of the iterate,
    and rescales with the soft-max of those EE values.  Stops when the
    network EE objective is stable or max_iter is reached; the best iterate
    seen is returned.

    The soft-max contrast is softmax_gain_scale * theta_cop (capped so the
    scale factors stay representable): a one-EE-spread gap then shifts a
    content's caching probability by about softmax_gain_scale, making the
    reweighting power independent of the coverage count.

    Parameters
    ----------
    ee_per_content : maps a caching probability to that content's EE at the
        current altitude plan; must be safe for repeated/concurrent calls.
    """
    if max_iter < 1:
        raise ConfigurationError("max_iter must be >= 1")
    gain = min(softmax_gain_scale * theta_cop, 600.0)
    a = catalog.weights
    b = np.ones(catalog.size)
    objectives: list[float] = []
    best_placement = None
    best_obj = -math.inf
    eta_cache: dict[float, float] = {}

    def eval_eta(p_vals):
        out = np.empty(len(p_vals))
        for i, p in enumerate(p_vals):
            key = float(p)
            if key not in eta_cache:
                eta_cache[key] = float(ee_per_content(key))
            out[i] = eta_cache[key]
        return out

    placement = None
    aborted = False
    note = ""
    for it in range(1, max_iter + 1):
        candidate = hitrate_solver(a * b, theta_cop, cache_size)
        eta = eval_eta(candidate.array)
        if not np.all(np.isfinite(eta)):
            aborted = True
            note = f"non-finite EE at iteration {it}; kept last stable iterate"
            break
        placement = candidate
        obj = float(np.sum(a * eta))
        objectives.append(obj)
        if obj > best_obj:
            best_obj, best_placement = obj, placement
        b = ee_softmax_scores(eta, gain)
        # Stable objective or a two-cycle both count as converged.
        for back in (2, 3):
            if len(objectives) >= back:
                prev = objectives[-back]
                if abs(obj - prev) <= tol * max(abs(prev), 1e-300):
                    return RshrResult(best_placement, tuple(objectives), it,
                                      True)
    if best_placement is None:
        raise ConfigurationError("EE evaluator returned no finite values")
    return RshrResult(best_placement, tuple(objectives), len(objectives),
                      False, aborted, note)


def lru_reference(catalog: Catalog, cache_size: float) -> PlacementVector:
    """LRU stationary occupancy via the characteristic-time approximation.

    p_c = 1 - exp(-a_c * t_C) with t_C solved so the expected occupancy
    equals the cache size.
    """
    a = catalog.weights
    f = catalog.size
    if cache_size <= 0:
        return PlacementVector.from_array(np.zeros(f), 0.0)
    if cache_size >= f:
        return PlacementVector.from_array(np.ones(f), float(f))

    def occupancy(t):
        return np.sum(1.0 - np.exp(-a * t))

    lo, hi = 0.0, 1.0
    while occupancy(hi) < cache_size:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if occupancy(mid) < cache_size:
            lo = mid
        else:
            hi = mid
    t_c = 0.5 * (lo + hi)
    p = _repair_sum(1.0 - np.exp(-a * t_c), cache_size)
    return PlacementVector.from_array(p, cache_size)


def virtual_capacity(p_c: float, theta_vc: float) -> float:
    """Closed-form capacity proxy log(1 + p_c/(theta_vc - p_c)).

    Requires theta_vc > 1 so the expression is defined and strictly
    increasing over p_c in [0, 1].
    """
    if theta_vc <= 1.0:
        raise ConfigurationError("theta_vc must exceed 1")
    if not 0.0 <= p_c <= 1.0:
        raise ConfigurationError("p_c must lie in [0, 1]")
    return math.log1p(p_c / (theta_vc - p_c))
