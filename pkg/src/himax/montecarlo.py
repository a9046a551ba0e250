"""Monte Carlo estimation of actual significance levels under independence.

Each replication draws its data from its own counter-based Philox stream keyed
by ``(seed, table, n, p, replication)``, so results do not depend on how the
work is split across threads.
"""
import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .approximations import ApproxKind, ApproxParams, critical_value
from .numerics import clipped_log, clipped_loglog

__all__ = [
    "STATISTICS",
    "DEFAULT_PAIRING",
    "TABLE_P",
    "TABLE_N",
    "REFERENCE_LEVELS",
    "DegenerateSampleError",
    "SimConfig",
    "LevelEstimate",
    "SimResult",
    "register_distribution",
    "replication_stream",
    "sample_null",
    "estimate_levels",
    "reproduce_table",
    "table_config",
]

STATISTICS = ("W_n", "L_tilde_new", "L_tilde_old")
# W_n is judged against the d = 2 pre-limit CDF; its p -> infinity limit is the
# W_n Gumbel law, and at small p it tracks the published levels far better.
DEFAULT_PAIRING = {
    "W_n": ApproxKind.INTERMEDIATE,
    "L_tilde_new": ApproxKind.INTERMEDIATE,
    "L_tilde_old": ApproxKind.LIMIT_LTILDE,
}
TABLE_P = (4, 8, 16, 32, 64, 128)
TABLE_N = (16, 32, 64, 128, 256)
CHUNK = 100

# Published estimated levels (alpha = 0.05, 5000 replications), indexed by
# table -> statistic -> p -> levels for n = 16, 32, 64, 128, 256.
# Table 1: N(0, 1) entries; table 2: t with 7 degrees of freedom.
REFERENCE_LEVELS = {
    1: {
        "W_n": {
            4: (0.0484, 0.0580, 0.0496, 0.0520, 0.0566),
            8: (0.0190, 0.0332, 0.0412, 0.0524, 0.0440),
            16: (0.0094, 0.0248, 0.0356, 0.0436, 0.0478),
            32: (0.0032, 0.0188, 0.0366, 0.0412, 0.0432),
            64: (0.0010, 0.0114, 0.0296, 0.0402, 0.0460),
            128: (0.0004, 0.0082, 0.0218, 0.0350, 0.0568),
        },
        "L_tilde_new": {
            4: (0.0318, 0.0458, 0.0498, 0.0474, 0.0532),
            8: (0.0104, 0.0316, 0.0368, 0.0462, 0.0462),
            16: (0.0012, 0.0112, 0.0316, 0.0420, 0.0482),
            32: (0.0000, 0.0094, 0.0228, 0.0368, 0.0376),
            64: (0.0000, 0.0020, 0.0100, 0.0292, 0.0356),
            128: (0.0000, 0.0000, 0.0060, 0.0262, 0.0380),
        },
        "L_tilde_old": {
            4: (0.0140, 0.0232, 0.0284, 0.0256, 0.0292),
            8: (0.0066, 0.0198, 0.0222, 0.0258, 0.0338),
            16: (0.0002, 0.0130, 0.0246, 0.0312, 0.0338),
            32: (0.0000, 0.0044, 0.0212, 0.0280, 0.0364),
            64: (0.0000, 0.0026, 0.0160, 0.0256, 0.0358),
            128: (0.0000, 0.0000, 0.0060, 0.0170, 0.0362),
        },
    },
    2: {
        "W_n": {
            4: (0.0484, 0.0580, 0.0496, 0.0520, 0.0566),
            8: (0.0374, 0.0560, 0.0624, 0.0574, 0.0586),
            16: (0.0292, 0.0536, 0.0750, 0.0676, 0.0622),
            32: (0.0144, 0.0682, 0.0886, 0.0758, 0.0664),
            64: (0.0066, 0.0816, 0.1122, 0.1010, 0.0670),
            128: (0.0000, 0.1010, 0.1240, 0.1138, 0.0820),
        },
        "L_tilde_new": {
            4: (0.0408, 0.0466, 0.0514, 0.0504, 0.0522),
            8: (0.0084, 0.0332, 0.0468, 0.0440, 0.0470),
            16: (0.0012, 0.0186, 0.0324, 0.0436, 0.0446),
            32: (0.0000, 0.0102, 0.0294, 0.0414, 0.0444),
            64: (0.0000, 0.0040, 0.0266, 0.0382, 0.0472),
            128: (0.0000, 0.0002, 0.0184, 0.0354, 0.0480),
        },
        "L_tilde_old": {
            4: (0.0192, 0.0242, 0.0286, 0.0276, 0.0300),
            8: (0.0054, 0.0230, 0.0290, 0.0358, 0.0372),
            16: (0.0004, 0.0146, 0.0308, 0.0336, 0.0366),
            32: (0.0000, 0.0062, 0.0244, 0.0336, 0.0436),
            64: (0.0000, 0.0042, 0.0196, 0.0352, 0.0388),
            128: (0.0000, 0.0002, 0.0178, 0.0342, 0.0438),
        },
    },
}


class DegenerateSampleError(RuntimeError):
    """A simulated sample had a constant column."""


def _standard_normal(rng, size):
    return rng.standard_normal(size)


def _student_t(df):
    def sampler(rng, size):
        # N(0,1) / sqrt(chi2(df) / df)
        z = rng.standard_normal(size)
        chi2 = 2.0 * rng.standard_gamma(0.5 * df, size)
        return z / np.sqrt(chi2 / df)

    return sampler


_REGISTRY = {"standard_normal": _standard_normal}


def register_distribution(name, sampler):
    """Register ``sampler(rng, size) -> ndarray`` of i.i.d. draws under ``name``."""
    if name == "student_t" or name in _REGISTRY:
        raise ValueError(f"distribution {name!r} already defined")
    _REGISTRY[name] = sampler


def _resolve(distribution, df=None):
    if distribution == "student_t":
        if df is None or int(df) != df or df < 1:
            raise ValueError(f"student_t needs a positive integer df, got {df!r}")
        return _student_t(int(df))
    try:
        return _REGISTRY[distribution]
    except KeyError:
        raise ValueError(f"unknown distribution {distribution!r}") from None


def _label(distribution, df):
    return f"student_t({df})" if distribution == "student_t" else distribution


def replication_stream(seed, table, n, p, replication):
    """Independent Generator for one replication, keyed by all its coordinates."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(table), int(n), int(p), int(replication)))
    key = ss.generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_null(distribution, n, p, stream, df=None):
    """An n x p matrix of i.i.d. draws from ``distribution``."""
    return np.asarray(_resolve(distribution, df)(stream, (n, p)), dtype=float)


@dataclass
class SimConfig:
    grid: list
    distribution: str = "standard_normal"
    df: int = None
    replications: int = 5000
    nominal_alpha: float = 0.05
    seed: int = 0
    statistics: tuple = STATISTICS
    pairing: dict = field(default_factory=dict)
    table: int = 0

    def __post_init__(self):
        self.grid = [(int(n), int(p)) for n, p in self.grid]
        for n, p in self.grid:
            if n < 4 or p < 2:
                raise ValueError(f"grid cell (n={n}, p={p}) needs n >= 4 and p >= 2")
        if self.replications < 1:
            raise ValueError("replications must be positive")
        if not 0.0 < self.nominal_alpha < 1.0:
            raise ValueError("nominal_alpha must lie in (0, 1)")
        self.statistics = tuple(self.statistics)
        for s in self.statistics:
            if s not in STATISTICS:
                raise ValueError(f"unknown statistic {s!r}; choose from {STATISTICS}")
        self.pairing = {k: ApproxKind(v) for k, v in {**DEFAULT_PAIRING, **self.pairing}.items()}
        if self.pairing["L_tilde_new"] is ApproxKind.LIMIT_W or self.pairing["L_tilde_old"] is ApproxKind.LIMIT_W:
            raise ValueError("the Ltilde statistics cannot use the W_n limit")
        if self.pairing["W_n"] is ApproxKind.LIMIT_LTILDE:
            raise ValueError("W_n cannot use the Ltilde limit")
        _resolve(self.distribution, self.df)

    @classmethod
    def from_json(cls, source):
        """Build from a JSON string or a path to a JSON file."""
        if os.path.exists(str(source)):
            with open(source, encoding="utf-8") as fh:
                data = json.load(fh)
        else:
            data = json.loads(source)
        return cls(**data)


@dataclass(frozen=True)
class LevelEstimate:
    distribution: str
    n: int
    p: int
    statistic: str
    replications: int
    rejections: int
    critical_value: float
    approx: str

    @property
    def level(self):
        return self.rejections / self.replications

    @property
    def standard_error(self):
        lv = self.level
        return math.sqrt(lv * (1.0 - lv) / self.replications)


CSV_COLUMNS = ("distribution", "n", "p", "statistic", "R", "rejections", "level", "se", "critical_value", "approx")


@dataclass
class SimResult:
    cells: list

    def cell(self, statistic, n, p):
        for c in self.cells:
            if (c.statistic, c.n, c.p) == (statistic, n, p):
                return c
        raise KeyError((statistic, n, p))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for c in self.cells:
            w.writerow([
                c.distribution, c.n, c.p, c.statistic, c.replications, c.rejections,
                repr(c.level), repr(c.standard_error), repr(c.critical_value), c.approx,
            ])
        return buf.getvalue()

    def to_text(self):
        """Aligned table: one row per (p, statistic), one column per n."""
        ns = sorted({c.n for c in self.cells})
        ps = sorted({c.p for c in self.cells})
        stats = [s for s in STATISTICS if any(c.statistic == s for c in self.cells)]
        lookup = {(c.statistic, c.n, c.p): c for c in self.cells}
        head = f"{'p':>5}  {'statistic':<12}" + "".join(f"{'n = ' + str(n):>10}" for n in ns)
        lines = [head, "-" * len(head)]
        for p in ps:
            for k, s in enumerate(stats):
                row = f"{(p if k == 0 else ''):>5}  {s:<12}"
                for n in ns:
                    c = lookup.get((s, n, p))
                    row += f"{'' if c is None else format(c.level, '.4f'):>10}"
                lines.append(row)
        return "\n".join(lines) + "\n"


def _batch_statistics(x):
    """W_n and centred Ltilde statistics for a stack of samples of shape (B, n, p)."""
    _, n, p = x.shape
    xc = x - x.mean(axis=1, keepdims=True)
    ss = np.einsum("bki,bki->bi", xc, xc)
    if not np.all(ss > 0):
        b, col = np.argwhere(~(ss > 0))[0]
        raise DegenerateSampleError(f"simulated sample {b} in batch has constant column {col}")
    h = n // 2
    top = xc[:, :h]
    bottom = xc[:, h:]
    a = np.matmul(top.transpose(0, 2, 1), top)
    b = np.matmul(bottom.transpose(0, 2, 1), bottom)
    iu, ju = np.triu_indices(p, 1)
    a = a[:, iu, ju]
    b = b[:, iu, ju]
    denom = ss[:, iu] * ss[:, ju]
    r2 = (2.0 * (a * a + b * b) / denom).max(axis=1)
    rho2 = ((a + b) ** 2 / denom).max(axis=1)
    if np.any(r2 < rho2 - 1e-12):
        raise AssertionError("split-sample statistic fell below the full-sample correlation")
    log_p = clipped_log(p)
    w = n * r2 - 4.0 * log_p
    lt = n * rho2 - 4.0 * log_p + clipped_loglog(p)
    return w, lt


def _critical_values(config, n, p):
    out = {}
    for s in config.statistics:
        approx = config.pairing[s]
        d = 2 if s == "W_n" else 1
        params = ApproxParams(p=p, n=n, d=d)
        out[s] = (critical_value(params, approx, config.nominal_alpha), approx)
    return out


def _run_chunk(config, sampler, n, p, start, stop, crits):
    x = np.stack([
        sampler(replication_stream(config.seed, config.table, n, p, r), (n, p))
        for r in range(start, stop)
    ])
    w, lt = _batch_statistics(np.asarray(x, dtype=float))
    values = {"W_n": w, "L_tilde_new": lt, "L_tilde_old": lt}
    return {s: int(np.count_nonzero(values[s] > crits[s][0])) for s in config.statistics}


def resolve_threads(threads):
    if threads is None:
        threads = int(os.environ.get("HIMAX_THREADS", "1"))
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads


def estimate_levels(config, threads=1):
    """Estimate the rejection rate of each statistic on every grid cell.

    A replication rejects when the statistic exceeds the ``1 - nominal_alpha``
    critical value of its paired approximation. The result depends only on
    ``config``; ``threads`` changes speed, not output.
    """
    threads = resolve_threads(threads)
    sampler = _resolve(config.distribution, config.df)
    R = config.replications
    tasks = []
    crits = {}
    for n, p in config.grid:
        crits[(n, p)] = _critical_values(config, n, p)
        for start in range(0, R, CHUNK):
            tasks.append((n, p, start, min(start + CHUNK, R)))

    def work(task):
        n, p, start, stop = task
        return task, _run_chunk(config, sampler, n, p, start, stop, crits[(n, p)])

    if threads == 1:
        results = [work(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, tasks))

    counts = {(n, p, s): 0 for n, p in config.grid for s in config.statistics}
    for (n, p, _, _), chunk_counts in results:
        for s, k in chunk_counts.items():
            counts[(n, p, s)] += k

    label = _label(config.distribution, config.df)
    cells = []
    for n, p in config.grid:
        for s in config.statistics:
            cv, approx = crits[(n, p)][s]
            cells.append(LevelEstimate(label, n, p, s, R, counts[(n, p, s)], cv, approx.value))
    return SimResult(cells)


def table_config(which, replications=5000, seed=0, **overrides):
    """SimConfig for the full published grid of table 1 (normal) or 2 (t with 7 df)."""
    if which not in (1, 2):
        raise ValueError(f"which must be 1 or 2, got {which!r}")
    dist = {"distribution": "standard_normal"} if which == 1 else {"distribution": "student_t", "df": 7}
    grid = [(n, p) for p in TABLE_P for n in TABLE_N]
    return SimConfig(grid=grid, replications=replications, seed=seed, table=which, **dist, **overrides)


def reproduce_table(which, replications=5000, seed=0, threads=1, **overrides):
    """Run a full 6 x 3 x 5 table; returns ``(result, csv_text, aligned_text)``."""
    if replications < 100:
        raise ValueError("replications must be at least 100")
    result = estimate_levels(table_config(which, replications, seed, **overrides), threads=threads)
    result.cells.sort(key=lambda c: (c.p, STATISTICS.index(c.statistic), c.n))
    return result, result.to_csv(), result.to_text()
