"""Synthetic directed graphs with controlled outdegree distributions.

The power-law model samples per-node outdegrees from a discrete distribution
whose tail is exactly proportional to k**-gamma, then wires each node's arcs
to uniformly random distinct targets. Hitting an arbitrary target arc count
while keeping the tail exponent intact is done structurally rather than by
scaling degree values (which would corrupt the integer support the ML fit
relies on): the support's lower end is shifted / reweighted to match the
target mean, and the realized sum is nudged onto the target with random
unit adjustments. The generated arc total is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize, special, stats

from .graph import CapacityError, CompactDigraph, EdgeCode, EdgeList, GraphInputError

__all__ = [
    "GenSpec",
    "PRESET_EXPONENTS",
    "preset_spec",
    "generate",
    "DegreeHistogram",
    "degree_histogram",
    "PowerLawFit",
    "fit_exponent",
]

#: Outdegree power-law exponents of the three reference networks the presets
#: imitate (at reduced scale).
PRESET_EXPONENTS = {
    "patents-like": 3.126,
    "orkut-like": 2.127,
    "webgraph-like": 1.516,
}

_PRESET_NODES = 100_000
#: Default arcs per node, echoing the relative densities of the originals.
_PRESET_MEAN_DEGREE = {
    "patents-like": 3,
    "orkut-like": 10,
    "webgraph-like": 20,
}

# keys pack as src * n + dst, so the generator needs n*n < 2**63
_GEN_MAX_NODES = (1 << 31) - 1


@dataclass(frozen=True)
class GenSpec:
    """Generation parameters; output is a pure function of this record."""

    model: str  # "powerlaw" | "uniform"
    node_count: int
    target_arc_count: int
    exponent: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.model not in ("powerlaw", "uniform"):
            raise GraphInputError(f"unknown model {self.model!r}")
        if self.node_count < 1:
            raise GraphInputError("node_count must be >= 1")
        if self.node_count > _GEN_MAX_NODES:
            raise CapacityError(f"generator supports at most {_GEN_MAX_NODES} nodes")
        n, m = self.node_count, self.target_arc_count
        if not 0 <= m <= n * (n - 1):
            raise GraphInputError(
                f"target_arc_count {m} outside [0, n(n-1)] = [0, {n * (n - 1)}]")
        if self.model == "powerlaw":
            if self.exponent is None or self.exponent <= 1.0:
                raise GraphInputError("powerlaw requires exponent > 1")
            if m < n:
                raise GraphInputError(
                    "powerlaw outdegrees start at 1, so target_arc_count must "
                    f"be >= node_count (got {m} < {n})")


def preset_spec(name: str, node_count: int = _PRESET_NODES,
                target_arc_count: int | None = None, seed: int = 0) -> GenSpec:
    if name not in PRESET_EXPONENTS:
        raise GraphInputError(
            f"unknown preset {name!r}; choose from {sorted(PRESET_EXPONENTS)}")
    if target_arc_count is None:
        target_arc_count = node_count * _PRESET_MEAN_DEGREE[name]
    return GenSpec(model="powerlaw", node_count=node_count,
                   target_arc_count=target_arc_count,
                   exponent=PRESET_EXPONENTS[name], seed=seed)


def generate(spec: GenSpec) -> EdgeList:
    """Produce the arc list for a spec; deterministic given the seed.

    The result never contains self-loops or duplicate arcs and its length
    equals target_arc_count exactly.
    """
    rng = np.random.default_rng(spec.seed)
    if spec.model == "uniform":
        return _generate_uniform(rng, spec.node_count, spec.target_arc_count)
    degrees = _sample_outdegrees(rng, spec.node_count, spec.target_arc_count,
                                 spec.exponent)
    return _attach_targets(rng, degrees, spec.node_count)


def _power_law_pmf(n: int, m: int, gamma: float) -> np.ndarray:
    """Outdegree pmf over 1..n-1 with mean m/n and an exact k**-gamma tail.

    The pure truncated power law has one fixed mean, so the target mean is
    met by moving probability at the low end only: extra mass at degree 1
    when the target sits below the natural mean, or a shifted support start
    (mixing two adjacent start points) when it sits above. Either way the
    pmf is exactly proportional to k**-gamma from degree
    max(support_start, 2) upward.
    """
    k_cap = n - 1
    mu = m / n
    k = np.arange(1, k_cap + 1, dtype=np.float64)
    w = k ** -gamma
    # suffix sums: w0[i] = sum of w over degrees >= i+1, w1 likewise for k*w
    w0 = np.cumsum(w[::-1])[::-1]
    w1 = np.cumsum((k * w)[::-1])[::-1]
    means = w1 / w0  # means[i] = mean of the law restricted to degrees >= i+1
    p = np.zeros(k_cap, dtype=np.float64)
    if mu <= means[0]:
        theta = 0.0 if means[0] <= 1.0 else (means[0] - mu) / (means[0] - 1.0)
        p[:] = (1.0 - theta) * w / w0[0]
        p[0] += theta
    else:
        idx = int(np.searchsorted(means, mu, side="right"))
        if idx >= k_cap:
            p[-1] = 1.0  # mu == n-1: every node saturates
        else:
            lo, hi = means[idx - 1], means[idx]
            theta = (hi - mu) / (hi - lo)
            p[idx:] = w[idx:] * (theta / w0[idx - 1] + (1.0 - theta) / w0[idx])
            p[idx - 1] = theta * w[idx - 1] / w0[idx - 1]
    return p / p.sum()


# unit corrections stay strictly below this degree so the fitted tail
# (default k_min = 5) remains an undisturbed sample of the power law
_CORRECTION_BAND = 5


def _sample_outdegrees(rng, n: int, m: int, gamma: float) -> np.ndarray:
    k_cap = n - 1
    pmf = _power_law_pmf(n, m, gamma)
    degrees = rng.choice(k_cap, size=n, p=pmf).astype(np.int64) + 1
    # nudge the realized sum onto m with random unit adjustments, preferring
    # nodes below the correction band; fall back to any legal node only when
    # the band has no capacity left
    delta = m - int(degrees.sum())
    while delta != 0:
        want = abs(delta)
        batch = np.unique(rng.integers(0, n, size=min(4 * want, 1 << 20)))
        if delta > 0:
            chosen = batch[degrees[batch] <= _CORRECTION_BAND - 2][:want]
            if chosen.size == 0:
                chosen = batch[degrees[batch] < k_cap][:want]
            degrees[chosen] += 1
            delta -= chosen.size
        else:
            d = degrees[batch]
            chosen = batch[(d >= 2) & (d <= _CORRECTION_BAND - 1)][:want]
            if chosen.size == 0:
                chosen = batch[degrees[batch] > 1][:want]
            degrees[chosen] -= 1
            delta += chosen.size
    return degrees


def _attach_targets(rng, degrees: np.ndarray, n: int) -> EdgeList:
    """Wire each node's outdegree to distinct uniform targets (never itself)."""
    src = np.repeat(np.arange(n, dtype=np.int64), degrees)
    draw = rng.integers(0, n - 1, size=src.shape[0], dtype=np.int64)
    dst = draw + (draw >= src)  # bijection onto targets != src
    while True:
        key = src * n + dst
        order = np.argsort(key, kind="stable")
        sorted_key = key[order]
        dup = np.flatnonzero(sorted_key[1:] == sorted_key[:-1]) + 1
        if dup.size == 0:
            break
        rows = order[dup]
        draw = rng.integers(0, n - 1, size=rows.size, dtype=np.int64)
        dst[rows] = draw + (draw >= src[rows])
    return EdgeList(src, dst)


def _generate_uniform(rng, n: int, m: int) -> EdgeList:
    total = n * (n - 1)
    if m == 0:
        return EdgeList(np.empty(0, np.int64), np.empty(0, np.int64))
    if m > total // 2:
        keys = rng.permutation(total)[:m].astype(np.int64)
    else:
        uniq = np.unique(rng.integers(0, total, size=m + m // 8 + 16, dtype=np.int64))
        while uniq.size < m:
            extra = rng.integers(0, total, size=2 * (m - uniq.size) + 16, dtype=np.int64)
            uniq = np.union1d(uniq, extra)
        keys = rng.permutation(uniq)[:m]
    src = keys // (n - 1)
    rem = keys % (n - 1)
    dst = rem + (rem >= src)
    return EdgeList(src, dst)


@dataclass(frozen=True)
class DegreeHistogram:
    """Exact (degree, node-count) pairs for one arc direction."""

    direction: str  # "out" | "in"
    degrees: np.ndarray
    node_counts: np.ndarray
    node_count: int

    def total_nodes(self) -> int:
        return int(self.node_counts.sum())

    def total_degree(self) -> int:
        return int(np.dot(self.degrees, self.node_counts))

    def as_dict(self) -> dict:
        return dict(zip(self.degrees.tolist(), self.node_counts.tolist()))

    def csv_rows(self):
        yield "degree", "count"
        for d, c in zip(self.degrees.tolist(), self.node_counts.tolist()):
            yield d, c


def degree_histogram(g: CompactDigraph, direction: str = "out") -> DegreeHistogram:
    if direction not in ("out", "in"):
        raise GraphInputError(f"direction must be 'out' or 'in', got {direction!r}")
    bit = int(EdgeCode.OUT) if direction == "out" else int(EdgeCode.IN)
    owners = np.repeat(np.arange(g.node_count, dtype=np.int64), np.diff(g.offsets))
    matching = owners[(g.entries & bit) != 0]
    per_node = np.bincount(matching, minlength=g.node_count)
    degrees, node_counts = np.unique(per_node, return_counts=True)
    return DegreeHistogram(direction=direction, degrees=degrees.astype(np.int64),
                           node_counts=node_counts.astype(np.int64),
                           node_count=g.node_count)


@dataclass(frozen=True)
class PowerLawFit:
    """Discrete maximum-likelihood power-law fit over degrees >= k_min."""

    exponent: float
    sample_size: int
    k_min: int
    log_likelihood: float
    gof_statistic: float
    gof_dof: int
    poor_fit: bool

    def as_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "sample_size": self.sample_size,
            "k_min": self.k_min,
            "log_likelihood": self.log_likelihood,
            "gof_statistic": self.gof_statistic,
            "gof_dof": self.gof_dof,
            "poor_fit": self.poor_fit,
        }


def fit_exponent(hist: DegreeHistogram, k_min: int = 5) -> PowerLawFit:
    """Estimate gamma for P(k) proportional to k**-gamma over k >= k_min.

    Maximizes the zeta-normalized discrete likelihood. A log-likelihood-ratio
    goodness test (G statistic against the fitted law, bins merged to an
    expected count of at least 5, 1% significance) flags distributions that
    are not power laws at all.
    """
    mask = hist.degrees >= k_min
    degs = hist.degrees[mask].astype(np.float64)
    cnts = hist.node_counts[mask].astype(np.float64)
    if degs.size < 2:
        raise GraphInputError(
            f"power-law fit needs at least 2 distinct degrees >= {k_min}")
    size = int(cnts.sum())
    log_sum = float(np.dot(cnts, np.log(degs)))

    def neg_loglik(gamma: float) -> float:
        return gamma * log_sum + size * float(np.log(special.zeta(gamma, k_min)))

    res = optimize.minimize_scalar(neg_loglik, bounds=(1.0001, 12.0),
                                   method="bounded",
                                   options={"xatol": 1e-6})
    gamma_hat = float(res.x)
    loglik = -float(res.fun)
    gof_stat, gof_dof = _gof_statistic(hist, k_min, gamma_hat, size)
    poor = bool(gof_dof >= 1
                and gof_stat > float(stats.chi2.ppf(0.99, gof_dof)))
    return PowerLawFit(exponent=gamma_hat, sample_size=size, k_min=k_min,
                       log_likelihood=loglik, gof_statistic=gof_stat,
                       gof_dof=gof_dof, poor_fit=poor)


def _gof_statistic(hist: DegreeHistogram, k_min: int, gamma: float, size: int):
    """G statistic of observed tail counts against the fitted law."""
    observed_max = int(hist.degrees.max())
    norm = float(special.zeta(gamma, k_min))
    k = np.arange(k_min, observed_max + 1, dtype=np.float64)
    pmf = k ** -gamma / norm
    tail_mass = float(special.zeta(gamma, observed_max + 1)) / norm
    counts = dict(zip(hist.degrees.tolist(), hist.node_counts.tolist()))

    bins = []  # (observed, expected)
    obs_acc = 0.0
    exp_acc = 0.0
    for i, deg in enumerate(range(k_min, observed_max + 1)):
        obs_acc += counts.get(deg, 0)
        exp_acc += size * pmf[i]
        if exp_acc >= 5.0:
            bins.append((obs_acc, exp_acc))
            obs_acc = exp_acc = 0.0
    # whatever remains joins the open tail bin
    bins.append((obs_acc, exp_acc + size * tail_mass))
    if len(bins) >= 2 and bins[-1][1] < 5.0:
        last_obs, last_exp = bins.pop()
        prev_obs, prev_exp = bins.pop()
        bins.append((prev_obs + last_obs, prev_exp + last_exp))

    g_stat = 0.0
    for obs, exp in bins:
        if obs > 0 and exp > 0:
            g_stat += 2.0 * obs * np.log(obs / exp)
    return float(g_stat), max(len(bins) - 2, 0)
