"""Walk simulation: single long paths and replica ensembles.

Single-path statistics (visit-count spectra, new-maximum counts, maximal
local and occupation times, heavy-site profiles) come from one long
trajectory; distributional checks come from ensembles of independent
replicas.  "Infinite-time" quantities are truncated at the moment the
walk exceeds all tracked sites by an escape margin m, after which any
return has probability at most h^m -- a rigorous, parameterized
certificate rather than an arbitrary cutoff.

Every quantity is a pure function of (config, seed): replica streams are
counter-based and keyed by replica index, chunks merge associatively, so
results are identical under any parallel schedule.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, ValidationError
from .model import WalkParams, derived_constants
from .closedform import excursion_mean_visits
from .rng import counter_steps

__all__ = [
    "SimConfig",
    "HeavyPointConfig",
    "LocalTimeField",
    "PathReport",
    "EnsembleReport",
    "simulate_path",
    "total_local_times",
    "path_report",
    "heavy_point_profile",
    "ensemble",
    "reversed_walk_check",
    "escape_margin",
]

_BLOCK = 1 << 16
_CHUNK_REPLICAS = 1 << 15
_STEP_BUDGET = 1_000_000_000


@dataclass(frozen=True)
class HeavyPointConfig:
    """Window and threshold for the profile around heavily visited sites.

    delta_n   slack in the heaviness threshold (1 - delta_n) * rate * log n
    c         window radius coefficient, |z| <= c * log log n
    """

    delta_n: float = 0.2
    c: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.delta_n < 1.0:
            raise ValidationError(f"delta_n must be in [0, 1), got {self.delta_n}")
        if self.c <= 0.0:
            raise ValidationError(f"c must be positive, got {self.c}")

    def check_window(self, params: WalkParams) -> None:
        alpha = math.log(1.0 / params.h)
        if alpha * self.c >= 1.0:
            raise ValidationError(
                f"window too wide: alpha*c = {alpha * self.c:.6g} must be < 1"
            )


@dataclass(frozen=True)
class SimConfig:
    params: WalkParams
    n: int
    replicas: int = 1
    seed: int = 0
    escape_eps: float = 1e-9
    heavy: HeavyPointConfig | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"n must be >= 1, got {self.n}")
        if self.replicas < 1:
            raise ValidationError(f"replicas must be >= 1, got {self.replicas}")
        if not 0.0 < self.escape_eps <= 1e-3:
            raise ValidationError(
                f"escape_eps must be in (0, 1e-3], got {self.escape_eps}"
            )


@dataclass(frozen=True)
class LocalTimeField:
    """Visit counts of one path over steps 1..n, stored densely.

    counts[i] is the number of visits to site min_site + i.  The counts
    sum to n by construction.
    """

    counts: np.ndarray
    min_site: int
    max_site: int
    n: int
    final_position: int

    def count(self, site: int) -> int:
        if site < self.min_site or site > self.max_site:
            return 0
        return int(self.counts[site - self.min_site])

    def sites(self) -> np.ndarray:
        return np.arange(self.min_site, self.max_site + 1)


@dataclass(frozen=True)
class PathReport:
    """Single-path statistics at horizon n."""

    n: int
    seed: int
    qtilde: np.ndarray  # qtilde[k] = number of sites visited exactly k times
    nu_n: int  # strict new running maxima
    xi_max: int  # maximal single-site visit count within the horizon
    eta_max: int  # maximal total (escape-truncated) visit count on the path
    xi_star: dict  # z -> maximal occupation of a translate of {0, z}
    cloud: np.ndarray  # (site local-time, sphere occupation) / log n pairs
    heavy: dict | None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "qtilde": self.qtilde.tolist(),
            "nu_n": self.nu_n,
            "xi_max": self.xi_max,
            "eta_max": self.eta_max,
            "xi_star": {str(z): int(v) for z, v in self.xi_star.items()},
            "cloud_size": int(len(self.cloud)),
            "heavy": self.heavy,
        }


@dataclass(frozen=True)
class EnsembleReport:
    statistic: str
    replicas: int
    mean: float
    variance: float
    sem: float
    ci95: tuple[float, float]
    histogram: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "replicas": self.replicas,
            "mean": self.mean,
            "variance": self.variance,
            "sem": self.sem,
            "ci95": list(self.ci95),
            "histogram": None if self.histogram is None else self.histogram.tolist(),
        }


def escape_margin(params: WalkParams, escape_eps: float) -> int:
    """Sites more than m above everything tracked are revisited with
    probability at most h^m <= escape_eps."""
    return int(math.ceil(math.log(escape_eps) / math.log(params.h)))


def _positions(params: WalkParams, n: int, seed: int, replica: int = 0) -> np.ndarray:
    """The full trajectory S_1..S_n as int32, generated blockwise."""
    out = np.empty(n, dtype=np.int32)
    carry = np.int32(0)
    block = 0
    for start in range(0, n, _BLOCK):
        width = min(_BLOCK, n - start)
        steps = counter_steps(params.p, seed, replica, block, width)
        out[start : start + width] = carry + np.cumsum(steps, dtype=np.int32)
        carry = out[start + width - 1]
        block += 1
    return out


def _field_from_positions(positions: np.ndarray, n: int) -> LocalTimeField:
    lo = int(positions.min())
    hi = int(positions.max())
    counts = np.bincount(positions - lo, minlength=hi - lo + 1)
    return LocalTimeField(
        counts=counts,
        min_site=lo,
        max_site=hi,
        n=n,
        final_position=int(positions[-1]),
    )


def simulate_path(params: WalkParams, n: int, seed: int) -> LocalTimeField:
    """One sampled path's local-time field; bit-reproducible in
    (params, n, seed)."""
    return _field_from_positions(_positions(params, n, seed), n)


def _continue_until_escape(
    params: WalkParams,
    start_pos: int,
    threshold: int,
    lo: int,
    hi: int,
    seed: int,
    replica: int,
    first_block: int,
) -> np.ndarray:
    """Extra visit counts to sites lo..hi after the horizon, accumulated
    until the walk first exceeds `threshold`."""
    extra = np.zeros(hi - lo + 1, dtype=np.int64)
    carry = start_pos
    block = first_block
    max_blocks = _STEP_BUDGET // _BLOCK
    while block - first_block < max_blocks:
        steps = counter_steps(params.p, seed, replica, block, _BLOCK)
        pos = carry + np.cumsum(steps, dtype=np.int64)
        exceeded = pos > threshold
        if exceeded.any():
            pos = pos[: int(np.argmax(exceeded))]
            in_range = pos[(pos >= lo) & (pos <= hi)]
            if len(in_range):
                extra += np.bincount(in_range - lo, minlength=hi - lo + 1)
            return extra
        in_range = pos[(pos >= lo) & (pos <= hi)]
        if len(in_range):
            extra += np.bincount(in_range - lo, minlength=hi - lo + 1)
        carry = int(pos[-1])
        block += 1
    raise BudgetError(f"escape not reached within {_STEP_BUDGET} steps")


def _total_counts_batch(
    params: WalkParams,
    sites: np.ndarray,
    seed: int,
    escape_eps: float,
    replica_ids: np.ndarray,
) -> np.ndarray:
    """Escape-truncated total visit counts, one row per replica.

    Each replica walks from 0 until it first exceeds max(sites) by the
    escape margin; visits to every tracked site up to that moment are its
    sample of the infinite-time counts (correct up to probability
    len(sites) * escape_eps).
    """
    sites = np.asarray(sites, dtype=np.int64)
    threshold = int(sites.max()) + escape_margin(params, escape_eps)
    n_rep = len(replica_ids)
    counts = np.zeros((n_rep, len(sites)), dtype=np.int64)
    carry = np.zeros(n_rep, dtype=np.int64)
    alive = np.arange(n_rep)
    block = 0
    width = 128
    max_blocks = _STEP_BUDGET // width
    while len(alive):
        if block >= max_blocks:
            raise BudgetError(f"escape not reached within {_STEP_BUDGET} steps")
        steps = counter_steps(params.p, seed, replica_ids[alive], block, width)
        pos = carry[alive, None] + np.cumsum(steps, axis=1, dtype=np.int64)
        exceeded = pos > threshold
        done = exceeded.any(axis=1)
        first = np.argmax(exceeded, axis=1)
        live_mask = np.arange(width)[None, :] < np.where(done, first, width)[:, None]
        for j, s in enumerate(sites):
            counts[alive, j] += ((pos == s) & live_mask).sum(axis=1)
        carry[alive] = pos[:, -1]
        alive = alive[~done]
        block += 1
    return counts


def total_local_times(
    params: WalkParams, sites, seed: int, escape_eps: float = 1e-9
) -> dict[int, int]:
    """One sample of the total (infinite-time) visit counts of `sites`."""
    arr = np.asarray(sorted(sites), dtype=np.int64)
    row = _total_counts_batch(params, arr, seed, escape_eps, np.array([0]))[0]
    return {int(s): int(c) for s, c in zip(arr, row)}


def _xi_star(counts: np.ndarray, z: int) -> int:
    """Max occupation of a translate of {0, z} given dense counts."""
    padded = np.pad(counts, z)
    return int((padded[:-z] + padded[z:]).max())


def _cloud(counts: np.ndarray, n: int) -> np.ndarray:
    """Normalized (local time, sphere occupation) pairs for every site in
    a one-site margin around the occupied range."""
    cext = np.pad(counts, 1).astype(np.float64)
    c2 = np.pad(cext, 1)
    sphere = c2[:-2] + c2[2:]
    keep = (cext > 0) | (sphere > 0)
    scale = math.log(n)
    return np.column_stack((cext[keep], sphere[keep])) / scale


def _heavy_deviation(
    params: WalkParams,
    counts: np.ndarray,
    n: int,
    heavy: HeavyPointConfig,
    rate_log_n: float,
) -> dict:
    """Worst relative deviation of the local-time profile around sites
    whose visit count clears the heaviness threshold."""
    heavy.check_window(params)
    threshold = (1.0 - heavy.delta_n) * rate_log_n
    radius = max(1, int(heavy.c * math.log(max(math.log(n), math.e))))
    heavy_idx = np.flatnonzero(counts >= threshold)
    if len(heavy_idx) == 0:
        return {"set_size": 0, "deviation": None, "radius": radius}
    padded = np.pad(counts, radius).astype(np.float64)
    worst = 0.0
    for dz in range(-radius, radius + 1):
        m_z = excursion_mean_visits(params, dz)
        profile = padded[heavy_idx + radius + dz] / (m_z * rate_log_n)
        worst = max(worst, float(np.abs(profile - 1.0).max()))
    return {"set_size": int(len(heavy_idx)), "deviation": worst, "radius": radius}


def path_report(config: SimConfig, xi_star_z: tuple[int, ...] = (1,)) -> PathReport:
    """All single-path statistics of one trajectory of length config.n."""
    params, n, seed = config.params, config.n, config.seed
    positions = _positions(params, n, seed)
    field_ = _field_from_positions(positions, n)
    counts = field_.counts

    qtilde = np.bincount(counts[counts > 0])
    qtilde[0] = 0

    runmax = np.maximum.accumulate(positions)
    prevmax = np.empty_like(runmax)
    prevmax[0] = 0  # the walk starts at 0
    prevmax[1:] = np.maximum(runmax[:-1], 0)
    nu_n = int((positions > prevmax).sum())

    xi_max = int(counts.max())

    margin = escape_margin(params, config.escape_eps)
    extra = _continue_until_escape(
        params,
        start_pos=field_.final_position,
        threshold=field_.max_site + margin,
        lo=field_.min_site,
        hi=field_.max_site,
        seed=seed,
        replica=0,
        first_block=(n + _BLOCK - 1) // _BLOCK,
    )
    totals = counts + extra
    on_path = counts > 0
    if field_.min_site <= 0 <= field_.max_site:
        on_path = on_path.copy()
        on_path[0 - field_.min_site] = True  # j = 0 counts: the start site
    eta_max = int(totals[on_path].max())

    xi_star = {z: _xi_star(counts, z) for z in xi_star_z}
    cloud = _cloud(counts, n)

    heavy = None
    if config.heavy is not None:
        rate_log_n = derived_constants(params).lambda0 * math.log(n)
        heavy = {
            "site_variant": _heavy_deviation(
                params, counts, n, config.heavy, rate_log_n
            ),
            "path_variant": _heavy_deviation(
                params, np.where(on_path, totals, 0), n, config.heavy, rate_log_n
            ),
        }

    return PathReport(
        n=n,
        seed=seed,
        qtilde=qtilde,
        nu_n=nu_n,
        xi_max=xi_max,
        eta_max=eta_max,
        xi_star=xi_star,
        cloud=cloud,
        heavy=heavy,
    )


def heavy_point_profile(config: SimConfig) -> dict:
    """Profile deviation statistics of one path (both the horizon-count
    and total-count variants); requires config.heavy."""
    if config.heavy is None:
        raise ValidationError("heavy_point_profile requires a HeavyPointConfig")
    return path_report(config).heavy


# --- ensembles ---------------------------------------------------------

_SET_STATS = {
    "sphere_occupation": (-1, 1),
    "ball_occupation": (-1, 0, 1),
}


def _stat_sites(statistic: str) -> tuple[int, ...]:
    if statistic in _SET_STATS:
        return _SET_STATS[statistic]
    kind, _, arg = statistic.partition(":")
    if kind == "local_time":
        return (int(arg),)
    if kind == "two_point_pos":
        return (0, int(arg))
    if kind == "two_point_neg":
        return (0, -int(arg))
    raise ValidationError(f"unknown ensemble statistic {statistic!r}")


def _chunk_ranges(replicas: int):
    return [
        (s, min(s + _CHUNK_REPLICAS, replicas))
        for s in range(0, replicas, _CHUNK_REPLICAS)
    ]


def ensemble(config: SimConfig, statistic, threads: int = 1) -> EnsembleReport:
    """Replica ensemble of a statistic with merged histogram.

    `statistic` is either a named total-count statistic ("local_time:z",
    "sphere_occupation", "ball_occupation", "two_point_pos:z",
    "two_point_neg:z", "no_return") or a callable LocalTimeField -> float
    evaluated on fixed-horizon paths.  Replicas use counter-based streams
    keyed by their index and chunks merge by addition, so the result does
    not depend on `threads`.
    """
    replicas = config.replicas
    if callable(statistic):
        values = np.array(
            [
                float(
                    statistic(
                        _field_from_positions(
                            _positions(config.params, config.n, config.seed, replica=r),
                            config.n,
                        )
                    )
                )
                for r in range(replicas)
            ]
        )
        return _summarize("<callable>", values, histogram=None)

    name = str(statistic)
    if name == "no_return":
        def chunk_values(lo, hi):
            ids = np.arange(lo, hi, dtype=np.uint64)
            width = config.n
            pos = np.cumsum(
                counter_steps(config.params.p, config.seed, ids, 0, width),
                axis=1,
                dtype=np.int32,
            )
            return (~(pos == 0).any(axis=1)).astype(np.int64)
        if config.n > _BLOCK:
            raise ValidationError(
                f"no_return ensembles support n <= {_BLOCK}, got {config.n}"
            )
    else:
        sites = np.asarray(_stat_sites(name), dtype=np.int64)

        def chunk_values(lo, hi):
            ids = np.arange(lo, hi, dtype=np.uint64)
            counts = _total_counts_batch(
                config.params, sites, config.seed, config.escape_eps, ids
            )
            return counts.sum(axis=1)

    def run_chunk(bounds):
        lo, hi = bounds
        vals = chunk_values(lo, hi)
        hist = np.bincount(vals)
        return vals.sum(), np.square(vals, dtype=np.float64).sum(), hist, hi - lo

    ranges = _chunk_ranges(replicas)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_chunk, ranges))
    else:
        results = [run_chunk(r) for r in ranges]

    total = sum(r[0] for r in results)
    total_sq = sum(r[1] for r in results)
    hist_len = max(len(r[2]) for r in results)
    hist = np.zeros(hist_len, dtype=np.int64)
    for r in results:
        hist[: len(r[2])] += r[2]
    mean = total / replicas
    variance = max(total_sq / replicas - mean ** 2, 0.0)
    sem = math.sqrt(variance / replicas)
    return EnsembleReport(
        statistic=name,
        replicas=replicas,
        mean=float(mean),
        variance=float(variance),
        sem=sem,
        ci95=(float(mean - 1.96 * sem), float(mean + 1.96 * sem)),
        histogram=hist,
    )


def _summarize(name: str, values: np.ndarray, histogram) -> EnsembleReport:
    mean = float(values.mean())
    variance = float(values.var())
    sem = math.sqrt(variance / len(values))
    return EnsembleReport(
        statistic=name,
        replicas=len(values),
        mean=mean,
        variance=variance,
        sem=sem,
        ci95=(mean - 1.96 * sem, mean + 1.96 * sem),
        histogram=histogram,
    )


def reversed_walk_check(
    params: WalkParams,
    n: int,
    seed: int,
    z: int = 1,
    replicas: int = 20_000,
    escape_eps: float = 1e-9,
) -> dict:
    """Verify the time-reversal identities on simulated paths.

    Checks (a) the reversed path's increments are the negated original
    increments in reverse order, (b) the reversed walk's step frequencies
    match the swapped parameters, and (c) the empirical law of the
    reversed walk's visit count at -z matches the forward law at +z
    within 4-sigma multinomial bands.
    """
    positions = _positions(params, n, seed)
    incr = np.diff(np.concatenate(([0], positions)))
    # reversed path: S*_i = S_{n-i} - S_n, increments -incr in reverse order
    rev = (positions[::-1][1:] - positions[-1]) if n > 1 else np.array([], dtype=np.int32)
    rev_full = np.concatenate((rev, [-positions[-1] - 0])) if n >= 1 else rev
    rev_incr = np.diff(np.concatenate(([0], rev_full)))
    identity_ok = bool(np.array_equal(rev_incr, -incr[::-1]))

    up_freq = float((rev_incr == 1).mean())
    freq_sigma = math.sqrt(params.p * params.q / n)
    freq_ok = abs(up_freq - params.q) <= 4.0 * freq_sigma + 1e-12

    # forward xi(z, infinity) ensemble
    ids = np.arange(replicas, dtype=np.uint64)
    fwd = _total_counts_batch(
        params, np.array([z]), seed + 1, escape_eps, ids
    ).ravel()
    # reversed walk = negated forward walk with an independent stream, so
    # its visit count at -z is the negated-stream count at +z
    bwd = _total_counts_batch(
        params, np.array([z]), seed + 2, escape_eps, ids
    ).ravel()
    kmax = 8
    law_ok = True
    worst = 0.0
    for k in range(kmax + 1):
        f_hat = float((fwd == k).mean())
        b_hat = float((bwd == k).mean())
        sigma = math.sqrt(max(f_hat * (1 - f_hat), 1e-12) / replicas)
        gap = abs(f_hat - b_hat)
        worst = max(worst, gap / max(sigma, 1e-300))
        if gap > 4.0 * math.sqrt(2.0) * sigma:
            law_ok = False
    return {
        "increments_identity": identity_ok,
        "step_frequency": freq_ok,
        "reversed_up_frequency": up_freq,
        "law_match": law_ok,
        "worst_band_ratio": worst,
    }
