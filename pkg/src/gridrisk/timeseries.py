"""Regular time-series representation and the anomaly machinery shared by all CRIs.

A :class:`TimeSeries` is a named, regularly indexed sequence of real values at
daily or monthly frequency. Gaps are explicit NaN markers, never skipped index
positions. Climatologies are long-baseline monthly means; anomalies are
departures from them. All types are immutable and all operations are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    BaselineError,
    CoverageError,
    DegenerateSeriesError,
    DomainError,
    FrequencyError,
)

DEFAULT_BASELINE = (1981, 2010)
MIN_STRICT_BASELINE_YEARS = 30


class Frequency(str, Enum):
    DAILY = "daily"
    MONTHLY = "monthly"


def month_ordinal(d: date) -> int:
    """Months since year 0 for calendar arithmetic on monthly grids."""
    return d.year * 12 + d.month - 1


def month_start(ordinal: int) -> date:
    return date(ordinal // 12, ordinal % 12 + 1, 1)


def days_in_month(year: int, month: int) -> int:
    nxt = date(year + 1, 1, 1) if month == 12 else date(year, month + 1, 1)
    return (nxt - date(year, month, 1)).days


@dataclass(frozen=True)
class TimeSeries:
    """A single named series on a regular daily or monthly grid.

    values are float64; NaN marks a missing observation. Monthly series are
    anchored to the first day of their start month.
    """

    id: str
    frequency: Frequency
    start: date
    values: np.ndarray
    units: str = ""
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.id:
            raise DomainError("series id must be non-empty")
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim != 1 or values.size == 0:
            raise DomainError(f"series '{self.id}': values must be a non-empty 1-D sequence")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "frequency", Frequency(self.frequency))
        if self.frequency is Frequency.MONTHLY and self.start.day != 1:
            raise FrequencyError(
                f"series '{self.id}': monthly series must start on the first of a month"
            )

    def __len__(self) -> int:
        return self.values.size

    def date_at(self, i: int) -> date:
        if self.frequency is Frequency.MONTHLY:
            return month_start(month_ordinal(self.start) + i)
        return date.fromordinal(self.start.toordinal() + i)

    def dates(self) -> list[date]:
        return [self.date_at(i) for i in range(len(self))]

    @property
    def end(self) -> date:
        return self.date_at(len(self) - 1)

    def index_of(self, d: date) -> int:
        """Grid position of a calendar date; raises if off-grid or out of range."""
        if self.frequency is Frequency.MONTHLY:
            if d.day != 1:
                raise DomainError(f"{d} is not a monthly grid point")
            i = month_ordinal(d) - month_ordinal(self.start)
        else:
            i = d.toordinal() - self.start.toordinal()
        if not 0 <= i < len(self):
            raise DomainError(f"{d} outside the span of series '{self.id}'")
        return i

    def month_numbers(self) -> np.ndarray:
        """Calendar month (1..12) of every index position."""
        if self.frequency is Frequency.MONTHLY:
            first = month_ordinal(self.start)
            return (first + np.arange(len(self))) % 12 + 1
        return np.array([d.month for d in self.dates()])

    def years(self) -> np.ndarray:
        """Calendar year of every index position."""
        if self.frequency is Frequency.MONTHLY:
            first = month_ordinal(self.start)
            return (first + np.arange(len(self))) // 12
        return np.array([d.year for d in self.dates()])

    def with_values(self, values: np.ndarray, **changes) -> "TimeSeries":
        return replace(self, values=values, **changes)


@dataclass(frozen=True)
class Climatology:
    """Periodic means over a fixed baseline, the reference for anomalies."""

    period_means: np.ndarray
    baseline_start: int
    baseline_end: int
    source_id: str
    metadata: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        means = np.array(self.period_means, dtype=float, copy=True)
        if means.shape not in ((12,), (366,)):
            raise DomainError("climatology must hold 12 monthly or 366 day-of-year means")
        means.flags.writeable = False
        object.__setattr__(self, "period_means", means)
        if self.baseline_end < self.baseline_start:
            raise BaselineError("baseline_end precedes baseline_start")

    @property
    def baseline_years(self) -> int:
        return self.baseline_end - self.baseline_start + 1


def aggregate_daily_to_monthly(s: TimeSeries, how: str = "mean") -> TimeSeries:
    """Collapse a daily series onto the monthly grid.

    Only calendar months fully inside the series span are kept; dropped edge
    months are listed under metadata key 'partial_months_dropped'. A month
    containing any missing day aggregates to a missing value: partial
    information is never averaged into a monthly statistic.
    """
    if s.frequency is not Frequency.DAILY:
        raise FrequencyError(f"series '{s.id}' is not daily")
    if how not in ("mean", "sum", "last"):
        raise DomainError(f"unknown aggregate '{how}'")

    first_full = s.start if s.start.day == 1 else month_start(month_ordinal(s.start) + 1)
    dropped = []
    if s.start.day != 1:
        dropped.append(f"{s.start.year:04d}-{s.start.month:02d}")

    months = []
    values = []
    m = month_ordinal(first_full)
    while True:
        mstart = month_start(m)
        ndays = days_in_month(mstart.year, mstart.month)
        mend = date.fromordinal(mstart.toordinal() + ndays - 1)
        if mend > s.end:
            if mstart <= s.end:
                dropped.append(f"{mstart.year:04d}-{mstart.month:02d}")
            break
        i0 = s.index_of(mstart)
        chunk = s.values[i0:i0 + ndays]
        if np.isnan(chunk).any():
            values.append(np.nan)
        elif how == "mean":
            values.append(float(chunk.mean()))
        elif how == "sum":
            values.append(float(chunk.sum()))
        else:
            values.append(float(chunk[-1]))
        months.append(mstart)
        m += 1

    if not months:
        raise CoverageError(f"series '{s.id}' spans no complete calendar month")
    meta = dict(s.metadata)
    if dropped:
        meta["partial_months_dropped"] = dropped
    return TimeSeries(
        id=s.id,
        frequency=Frequency.MONTHLY,
        start=months[0],
        values=np.array(values),
        units=s.units,
        metadata=meta,
    )


def monthly_climatology(
    s: TimeSeries,
    baseline_start: int | None = None,
    baseline_end: int | None = None,
    strict: bool = True,
    daily_aggregate: str = "mean",
) -> Climatology:
    """Per-calendar-month means over a baseline window.

    The baseline defaults to 1981-2010. With strict=True the window must span
    at least 30 years and lie inside the series; shorter baselines require
    strict=False and are recorded in the climatology metadata.
    """
    if baseline_start is None and baseline_end is None:
        baseline_start, baseline_end = DEFAULT_BASELINE
    if baseline_start is None or baseline_end is None:
        raise BaselineError("baseline_start and baseline_end must be given together")
    if baseline_end < baseline_start:
        raise BaselineError("baseline_end precedes baseline_start")

    monthly = s if s.frequency is Frequency.MONTHLY else aggregate_daily_to_monthly(s, daily_aggregate)
    span_years = baseline_end - baseline_start + 1
    if strict and span_years < MIN_STRICT_BASELINE_YEARS:
        raise BaselineError(
            f"baseline spans {span_years} years; strict climatologies need "
            f">= {MIN_STRICT_BASELINE_YEARS}"
        )
    if baseline_start < monthly.start.year or baseline_end > monthly.end.year:
        raise BaselineError(
            f"baseline {baseline_start}-{baseline_end} extends beyond series "
            f"'{s.id}' span {monthly.start.year}-{monthly.end.year}"
        )

    years = monthly.years()
    months = monthly.month_numbers()
    in_baseline = (years >= baseline_start) & (years <= baseline_end)
    means = np.empty(12)
    counts = np.empty(12, dtype=int)
    for m in range(1, 13):
        sel = monthly.values[in_baseline & (months == m)]
        sel = sel[~np.isnan(sel)]
        if sel.size == 0:
            raise CoverageError(f"no observations for calendar month {m} in baseline")
        means[m - 1] = sel.mean()
        counts[m - 1] = sel.size
    return Climatology(
        period_means=means,
        baseline_start=baseline_start,
        baseline_end=baseline_end,
        source_id=s.id,
        metadata={"strict": strict, "observations_per_month": counts.tolist()},
    )


def anomaly_series(s: TimeSeries, c: Climatology) -> TimeSeries:
    """Departure of each month from its climatological mean; units preserved."""
    if s.frequency is not Frequency.MONTHLY:
        raise FrequencyError(f"series '{s.id}' must be monthly to take monthly anomalies")
    if c.period_means.shape != (12,):
        raise FrequencyError("climatology does not hold 12 monthly means")
    out = s.values - c.period_means[s.month_numbers() - 1]
    meta = dict(s.metadata)
    meta["climatology_baseline"] = [c.baseline_start, c.baseline_end]
    return s.with_values(out, id=s.id + "_anom", metadata=meta)


def standardize(s: TimeSeries) -> TimeSeries:
    """Center to zero mean and scale to unit sample standard deviation."""
    obs = s.values[~np.isnan(s.values)]
    if obs.size < 2:
        raise DegenerateSeriesError(f"series '{s.id}' has fewer than 2 observations")
    sd = obs.std(ddof=1)
    if sd == 0.0 or not math.isfinite(sd):
        raise DegenerateSeriesError(f"series '{s.id}' has zero variance")
    out = (s.values - obs.mean()) / sd
    return s.with_values(out, id=s.id + "_std", units="")


def _compare(values: np.ndarray, comparator: str, threshold: float) -> np.ndarray:
    ops = {
        "le": values <= threshold,
        "lt": values < threshold,
        "ge": values >= threshold,
        "gt": values > threshold,
    }
    if comparator not in ops:
        raise DomainError(f"unknown comparator '{comparator}'")
    return ops[comparator]


def _complete_months(daily: TimeSeries):
    """Yield (month start date, slice of day values) for complete months; collect dropped edges."""
    first_full = daily.start if daily.start.day == 1 else month_start(month_ordinal(daily.start) + 1)
    dropped = []
    if daily.start.day != 1:
        dropped.append(f"{daily.start.year:04d}-{daily.start.month:02d}")
    out = []
    m = month_ordinal(first_full)
    while True:
        mstart = month_start(m)
        ndays = days_in_month(mstart.year, mstart.month)
        mend = date.fromordinal(mstart.toordinal() + ndays - 1)
        if mend > daily.end:
            if mstart <= daily.end:
                dropped.append(f"{mstart.year:04d}-{mstart.month:02d}")
            break
        i0 = daily.index_of(mstart)
        out.append((mstart, daily.values[i0:i0 + ndays]))
        m += 1
    if not out:
        raise CoverageError(f"series '{daily.id}' spans no complete calendar month")
    return out, dropped


def threshold_day_count(
    daily: TimeSeries, comparator: str, threshold: float
) -> TimeSeries:
    """Days per month on which the daily value meets the criterion.

    Composable with monthly_climatology/anomaly_series to express counts as
    anomalies. Months with any missing day count as missing.
    """
    if daily.frequency is not Frequency.DAILY:
        raise FrequencyError(f"series '{daily.id}' must be daily")
    months, dropped = _complete_months(daily)
    values = []
    for _, chunk in months:
        if np.isnan(chunk).any():
            values.append(np.nan)
        else:
            values.append(float(_compare(chunk, comparator, threshold).sum()))
    meta = dict(daily.metadata)
    if dropped:
        meta["partial_months_dropped"] = dropped
    return TimeSeries(
        id=f"{daily.id}_days_{comparator}{threshold:g}",
        frequency=Frequency.MONTHLY,
        start=months[0][0],
        values=np.array(values),
        units="days",
        metadata=meta,
    )


def degree_days(daily: TimeSeries, base: float, mode: str) -> TimeSeries:
    """Monthly cooling (sum of T-base excess) or heating (base-T deficit) degree days."""
    if daily.frequency is not Frequency.DAILY:
        raise FrequencyError(f"series '{daily.id}' must be daily")
    if mode not in ("cooling", "heating"):
        raise DomainError(f"unknown degree-day mode '{mode}'")
    months, dropped = _complete_months(daily)
    values = []
    for _, chunk in months:
        if np.isnan(chunk).any():
            values.append(np.nan)
        else:
            diff = chunk - base if mode == "cooling" else base - chunk
            values.append(float(np.maximum(diff, 0.0).sum()))
    meta = dict(daily.metadata)
    if dropped:
        meta["partial_months_dropped"] = dropped
    suffix = "cdd" if mode == "cooling" else "hdd"
    return TimeSeries(
        id=f"{daily.id}_{suffix}",
        frequency=Frequency.MONTHLY,
        start=months[0][0],
        values=np.array(values),
        units="degree-days",
        metadata=meta,
    )


def _weibull_rank(x: float, baseline: np.ndarray) -> float:
    below = float(np.sum(baseline < x))
    ties = float(np.sum(baseline == x))
    rank = below + (ties + 1.0) / 2.0
    return rank / (baseline.size + 1.0)


def percentile_rank(
    s: TimeSeries,
    grouping: str,
    baseline: tuple[int, int],
    min_group: int = 10,
) -> TimeSeries:
    """Weibull plotting-position percentile of each value against its baseline group.

    grouping 'same_month' compares against the same calendar month of the
    baseline years, 'same_day_of_year' against the same calendar day (daily
    series only), 'pooled' against every baseline observation. Ties share the
    mean rank, so output stays strictly inside (0, 1).
    """
    y0, y1 = baseline
    if y1 < y0:
        raise DomainError("baseline end year precedes start year")
    years = s.years()
    in_baseline = (years >= y0) & (years <= y1)

    if grouping == "pooled":
        keys = np.zeros(len(s), dtype=int)
    elif grouping == "same_month":
        keys = s.month_numbers()
    elif grouping == "same_day_of_year":
        if s.frequency is not Frequency.DAILY:
            raise FrequencyError("same_day_of_year grouping needs a daily series")
        keys = np.array([d.month * 100 + d.day for d in s.dates()])
    else:
        raise DomainError(f"unknown grouping '{grouping}'")

    baselines: dict[int, np.ndarray] = {}
    for key in np.unique(keys):
        vals = s.values[in_baseline & (keys == key)]
        vals = vals[~np.isnan(vals)]
        if vals.size < min_group:
            raise CoverageError(
                f"baseline group {key!r} has {vals.size} observations; need >= {min_group}"
            )
        baselines[int(key)] = vals

    out = np.full(len(s), np.nan)
    for i, (v, key) in enumerate(zip(s.values, keys)):
        if not np.isnan(v):
            out[i] = _weibull_rank(float(v), baselines[int(key)])
    meta = dict(s.metadata)
    meta["percentile_baseline"] = [y0, y1]
    meta["percentile_grouping"] = grouping
    return s.with_values(out, id=s.id + "_pct", units="", metadata=meta)


def simple_returns(prices: TimeSeries, mode: str = "arithmetic") -> TimeSeries:
    """Period-over-period returns from a positive price series, length n-1."""
    if mode not in ("arithmetic", "log"):
        raise DomainError(f"unknown return mode '{mode}'")
    if len(prices) < 2:
        raise DomainError(f"series '{prices.id}' needs >= 2 prices")
    v = prices.values
    if np.isnan(v).any() or (v <= 0).any():
        raise DomainError(f"series '{prices.id}' has non-positive or missing prices")
    ratio = v[1:] / v[:-1]
    out = ratio - 1.0 if mode == "arithmetic" else np.log(ratio)
    return TimeSeries(
        id=prices.id + "_ret",
        frequency=prices.frequency,
        start=prices.date_at(1),
        values=out,
        units="",
        metadata=dict(prices.metadata),
    )
