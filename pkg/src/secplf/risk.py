"""Price-discrepancy risk statistics over minute close prices.

For a window of T minutes ending at minute M, the largest discrepancy a
guarded price can show is

    max_T(M) = d_M - eps * min(d_{M-T}, ..., d_M)

and a minute is an *exceedance* when that value is positive. The first T
minutes of a series are warm-up and never counted.

Everything here is float64. Whether a minute exceeds depends only on the
sign of ``d_M - eps*min``, evaluated as the comparison ``d_M > eps*min``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .errors import EmptySeries, NonPositivePrice, OutOfRange, ParseError, SeriesTooShort

MINUTE = 60


@dataclass(frozen=True)
class PriceSeries:
    asset: str
    start_minute: int
    closes: np.ndarray
    filled: int = 0  # minutes added by forward-fill

    def __post_init__(self):
        arr = np.ascontiguousarray(self.closes, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise EmptySeries(f"{self.asset}: no prices")
        if not np.all(arr > 0) or not np.all(np.isfinite(arr)):
            raise ValueError("closes must be positive and finite")
        arr.setflags(write=False)
        object.__setattr__(self, "closes", arr)

    def __len__(self) -> int:
        return self.closes.shape[0]

    @property
    def minutes(self) -> np.ndarray:
        return np.arange(self.start_minute, self.start_minute + len(self))

    def scaled(self, factor: float) -> PriceSeries:
        return PriceSeries(self.asset, self.start_minute, self.closes * factor, self.filled)


@dataclass(frozen=True)
class RiskParams:
    epsilon: float = 1.25
    z: float = 1 - 1e-5
    T: int = 600

    def validate(self) -> None:
        if not self.epsilon > 1:
            raise ValueError("epsilon must exceed 1")
        if not 0 < self.z < 1:
            raise ValueError("z must be in (0, 1)")
        if self.T < 1:
            raise ValueError("T must be at least 1")


def ingest_csv(path, asset: str | None = None) -> PriceSeries:
    """Read a ``timestamp,close`` CSV of minute closes.

    Timestamps are Unix seconds on minute boundaries and must strictly
    increase. Missing minutes are forward-filled from the previous close.
    Row numbers in errors count the header as row 1.
    """
    path = Path(path)
    asset = asset or path.stem
    minutes: list[int] = []
    closes: list[float] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptySeries(f"{path}: empty file")
        if [h.strip().lower() for h in header] != ["timestamp", "close"]:
            raise ParseError(1, ",".join(header), "expected header 'timestamp,close'")
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            content = ",".join(row)
            if len(row) != 2:
                raise ParseError(row_no, content, "expected two columns")
            try:
                ts = int(row[0].strip())
                close = float(row[1].strip())
            except ValueError:
                raise ParseError(row_no, content) from None
            if ts % MINUTE:
                raise ParseError(row_no, content, "timestamp not on a minute boundary")
            if not math.isfinite(close):
                raise ParseError(row_no, content, "close is not finite")
            if close <= 0:
                raise NonPositivePrice(row_no, content)
            m = ts // MINUTE
            if minutes and m == minutes[-1]:
                raise ParseError(row_no, content, "duplicate timestamp")
            if minutes and m < minutes[-1]:
                raise ParseError(row_no, content, "timestamp goes backwards")
            minutes.append(m)
            closes.append(close)
    if not closes:
        raise EmptySeries(f"{path}: no data rows")
    return _fill(asset, np.asarray(minutes, dtype=np.int64), np.asarray(closes))


def _fill(asset: str, minutes: np.ndarray, closes: np.ndarray) -> PriceSeries:
    start = int(minutes[0])
    n = int(minutes[-1]) - start + 1
    # index of the last observed row at or before each minute
    src = np.zeros(n, dtype=np.int64)
    src[minutes - start] = np.arange(minutes.shape[0])
    mask = np.zeros(n, dtype=bool)
    mask[minutes - start] = True
    src = np.maximum.accumulate(np.where(mask, src, 0))
    return PriceSeries(asset, start, closes[src], filled=n - minutes.shape[0])


def _closes(series) -> np.ndarray:
    if isinstance(series, PriceSeries):
        return series.closes
    return np.ascontiguousarray(series, dtype=np.float64)


def _check_T(n: int, T: int) -> None:
    if T < 1:
        raise OutOfRange(f"window T must be >= 1, got {T}")
    if n <= T:
        raise SeriesTooShort(f"series of length {n} has no minutes after a warm-up of {T}")


def max_delta_T(series, M: int, T: int, epsilon: float) -> float:
    """Largest discrepancy at minute index M (0-based) with window T."""
    d = _closes(series)
    if T < 1 or M < T or M >= d.shape[0]:
        raise OutOfRange(f"need 1 <= T <= M < {d.shape[0]}, got T={T}, M={M}")
    return float(d[M] - epsilon * d[M - T : M + 1].min())


def max_delta_series(series, T: int, epsilon: float) -> np.ndarray:
    """max_T for every M in [T, N)."""
    d = _closes(series)
    _check_T(d.shape[0], T)
    return kernels.max_delta(d, T, float(epsilon))


def exceedance_count(series, T: int, epsilon: float) -> int:
    d = _closes(series)
    _check_T(d.shape[0], T)
    return (d.shape[0] - T) - kernels.count_within(d, T, float(epsilon))


def probability(within: int, total: int) -> float:
    return within / total


def exceedance_probability(series, T: int, epsilon: float) -> float:
    """Fraction of minutes M in [T, N) whose discrepancy is <= 0."""
    d = _closes(series)
    _check_T(d.shape[0], T)
    return probability(kernels.count_within(d, T, float(epsilon)), d.shape[0] - T)


@dataclass(frozen=True)
class ExceedanceProfile:
    """Exceedance counts for every window T = 1 .. N-1 at once.

    ``counts[T-1]`` is the number of exceedances among minutes [T, N).
    """

    n: int
    epsilon: float
    counts: np.ndarray

    def count(self, T: int) -> int:
        return int(self.counts[T - 1])

    def within(self, T: int) -> int:
        return self.n - T - self.count(T)

    def probability(self, T: int) -> float:
        return probability(self.within(T), self.n - T)

    def probabilities(self) -> np.ndarray:
        T = np.arange(1, self.n)
        return (self.n - T - self.counts) / (self.n - T)


def exceedance_profile(series, epsilon: float) -> ExceedanceProfile:
    """Counts for all T in O(N log N).

    Minute M exceeds under window T exactly when T >= lag(M), the distance
    back to the nearest earlier minute j with eps*d_j < d_M. So the count
    for T is (#M with lag <= T) minus (#M < T with a finite lag, which the
    warm-up drops).
    """
    d = _closes(series)
    n = d.shape[0]
    if n < 2:
        raise SeriesTooShort("need at least two minutes")
    lags = kernels.exceedance_lags(d, float(epsilon))
    finite = lags >= 0
    by_lag = np.bincount(lags[finite], minlength=n)[:n]
    c = np.cumsum(by_lag)[1:]  # T = 1..N-1
    f = np.cumsum(finite)[:-1]  # M < T
    return ExceedanceProfile(n, float(epsilon), (c - f).astype(np.int64))


FIRST_CROSSING = "first_crossing"
LARGEST = "largest"


def tz_from_probabilities(probs, z: float, rule: str = FIRST_CROSSING) -> int:
    """T_z from P(T) for T = 1..len(probs).

    ``first_crossing``: the largest T such that every window up to T meets z.
    ``largest``: the largest T anywhere in range that meets z.
    Both give 0 when T = 1 already fails and N-1 when nothing fails.
    """
    probs = np.asarray(probs)
    ok = probs >= z
    if rule == FIRST_CROSSING:
        bad = np.flatnonzero(~ok)
        return int(bad[0]) if bad.size else int(probs.shape[0])
    if rule == LARGEST:
        good = np.flatnonzero(ok)
        return int(good[-1]) + 1 if good.size else 0
    raise ValueError(f"unknown T_z rule {rule!r}")


def compute_Tz(series, epsilon: float, z: float, rule: str = FIRST_CROSSING) -> int:
    """Longest oracle refresh interval whose no-discrepancy probability meets z."""
    if not 0 < z < 1:
        raise ValueError("z must be in (0, 1)")
    profile = exceedance_profile(series, epsilon)
    return tz_from_probabilities(profile.probabilities(), z, rule)


@dataclass
class CdfFragment:
    asset: str
    T: int
    epsilon: float
    samples: int
    points: list[tuple[float, float]]

    def to_csv_rows(self) -> list[list]:
        return [[self.asset, repr(x), repr(p)] for x, p in self.points]


def cdf_report(series, T: int, epsilon: float, buckets: int = 101, asset: str | None = None) -> CdfFragment:
    """Empirical CDF of max_T(M)/d_M sampled on an even grid that includes 0."""
    if buckets < 2:
        raise ValueError("buckets must be at least 2")
    d = _closes(series)
    delta = max_delta_series(d, T, epsilon)
    x = np.sort(delta / d[T:])
    lo, hi = min(float(x[0]), 0.0), max(float(x[-1]), 0.0)
    grid = np.unique(np.append(np.linspace(lo, hi, buckets), 0.0))
    cum = np.searchsorted(x, grid, side="right") / x.shape[0]
    if asset is None:
        asset = series.asset if isinstance(series, PriceSeries) else "series"
    pts = [(float(g), float(c)) for g, c in zip(grid, cum)]
    return CdfFragment(asset, T, float(epsilon), int(x.shape[0]), pts)


@dataclass
class AssetRisk:
    asset: str
    n: int
    filled: int
    tz: int
    exceedance_count: int
    exceedance_probability: float
    market_cap_usd: float | None = None
    cdf: list[tuple[float, float]] = field(default_factory=list)


@dataclass
class RiskReport:
    epsilon: float
    z: float
    T: int
    tz_rule: str
    assets: list[AssetRisk]

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> RiskReport:
        assets = []
        for a in d["assets"]:
            a = dict(a)
            a["cdf"] = [tuple(p) for p in a.get("cdf", [])]
            assets.append(AssetRisk(**a))
        return cls(float(d["epsilon"]), float(d["z"]), int(d["T"]), d["tz_rule"], assets)

    @classmethod
    def from_json(cls, text: str) -> RiskReport:
        return cls.from_dict(json.loads(text))


def analyze_series(
    series: PriceSeries,
    params: RiskParams,
    buckets: int = 0,
    rule: str = FIRST_CROSSING,
    market_cap: float | None = None,
) -> AssetRisk:
    params.validate()
    profile = exceedance_profile(series, params.epsilon)
    tz = tz_from_probabilities(profile.probabilities(), params.z, rule)
    _check_T(len(series), params.T)
    count = profile.count(params.T)
    cdf = cdf_report(series, params.T, params.epsilon, buckets).points if buckets else []
    return AssetRisk(
        asset=series.asset,
        n=len(series),
        filled=series.filled,
        tz=tz,
        exceedance_count=count,
        exceedance_probability=profile.probability(params.T),
        market_cap_usd=market_cap,
        cdf=cdf,
    )


def read_market_caps(path) -> dict[str, float]:
    caps = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["asset", "market_cap_usd"]:
            raise ParseError(1, ",".join(header or []), "expected header 'asset,market_cap_usd'")
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                caps[row[0].strip()] = float(row[1])
            except (IndexError, ValueError):
                raise ParseError(row_no, ",".join(row)) from None
    return caps


def write_tz_csv(report: RiskReport, path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["asset", "n", "market_cap_usd", "tz", "exceedance_count", "exceedance_probability"])
        for a in report.assets:
            cap = "" if a.market_cap_usd is None else repr(a.market_cap_usd)
            w.writerow([a.asset, a.n, cap, a.tz, a.exceedance_count, repr(a.exceedance_probability)])


def write_cdf_csv(fragments: list[CdfFragment], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["asset", "x", "cumulative_probability"])
        for frag in fragments:
            w.writerows(frag.to_csv_rows())


def read_cdf_csv(path) -> dict[str, list[tuple[float, float]]]:
    out: dict[str, list[tuple[float, float]]] = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(row["asset"], []).append((float(row["x"]), float(row["cumulative_probability"])))
    return out


def write_tz_plot(report: RiskReport, path) -> None:
    """gnuplot data: market cap vs T_z, one asset per line (assets lacking a cap are skipped)."""
    rows = sorted((a.market_cap_usd, a.tz, a.asset) for a in report.assets if a.market_cap_usd is not None)
    with Path(path).open("w", encoding="utf-8") as fh:
        fh.write("# market_cap_usd tz_minutes asset\n")
        for cap, tz, asset in rows:
            fh.write(f"{cap!r} {tz} {asset}\n")


def write_cdf_plot(fragments: list[CdfFragment], path) -> None:
    """gnuplot data: one indexed block per asset, ``x cumulative_probability``."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for i, frag in enumerate(fragments):
            if i:
                fh.write("\n\n")
            fh.write(f"# {frag.asset} T={frag.T} eps={frag.epsilon!r}\n")
            for x, p in frag.points:
                fh.write(f"{x!r} {p!r}\n")
