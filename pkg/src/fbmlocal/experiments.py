"""Scaling experiments for angles and information between FBM increment windows.

Each experiment discretizes one or two time regions into consecutive
increments, builds the Gram and cross-Gram matrices, and pushes them
through the canonical-correlation machinery.  Shrinking the window
half-width eps along a geometric schedule and fitting log-log slopes
recovers the local-independence decay rates:

    cos angle ~ (eps/d)^(2-2H),   MI ~ 0.5 * r_H^2 * (eps/d)^(4-4H)

for two windows at distance d, and (eps/t)^(1-H) rates against the
infinite past.  Semi-infinite regions are truncated at T with graded
grids (polynomially finer toward the singular endpoint) and mandatory
2T sensitivity reruns.
"""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from fbmlocal.geometry import (
    IllConditionedWarning,
    canonical_correlations,
    cos_angle,
    mutual_information_gy,
)
from fbmlocal.kernels import (
    IncrementBasis,
    TimeGrid,
    check_hurst,
    cross_gram,
    gram,
    levy_increment_cross_gram,
    levy_increment_gram,
)
from fbmlocal.sobolev import r_h_spectral

__all__ = [
    "DEFAULT_EPS",
    "DEFAULT_GRID_N",
    "DEFAULT_TRUNCATION",
    "ScanConfig",
    "ScanRow",
    "ScanTable",
    "ExponentFit",
    "Theorem21Report",
    "Theorem22Report",
    "AdjacencyReport",
    "PastFutureReport",
    "ComplementReport",
    "Levy2dReport",
    "graded_points",
    "grading_depth",
    "local_independence_scan",
    "fit_exponent",
    "r_h_dual_gram",
    "theorem21_check",
    "past_window_scan",
    "theorem22_check",
    "adjacency_mi_table",
    "adjacency_divergence",
    "past_future_angle",
    "past_future_report",
    "complement_window_scan",
    "levy2d_scan",
    "scan_csv_text",
    "scan_to_dict",
    "write_scan_csv",
    "write_scan_json",
]

DEFAULT_EPS = tuple(2.0**-k for k in range(3, 9))
DEFAULT_GRID_N = 64
DEFAULT_TRUNCATION = 64.0

# Windows use grid_n points, so grid_n - 1 increments; a row is dropped
# when whitening keeps fewer than grid_n/2 of them.
_MIN_RANK_FRACTION = 0.5


# ---------------------------------------------------------------------------
# configuration and result containers


@dataclass(frozen=True)
class ScanConfig:
    """Two shrinking windows around t1 and t2, scanned over eps.

    eps values must be strictly decreasing and the largest one must keep
    the windows disjoint (max eps < |t1 - t2| / 2).
    """

    h: float
    t1: float
    t2: float
    eps: tuple
    grid_n: int = DEFAULT_GRID_N
    truncation_t: float = DEFAULT_TRUNCATION
    rtol: float = 1e-10

    def __post_init__(self):
        check_hurst(self.h)
        if self.t1 == self.t2:
            raise ValueError("t1 and t2 must differ")
        eps = tuple(float(e) for e in self.eps)
        object.__setattr__(self, "eps", eps)
        if len(eps) == 0:
            raise ValueError("eps schedule is empty")
        if any(e <= 0.0 for e in eps):
            raise ValueError("eps values must be positive")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("eps schedule must be strictly decreasing")
        if max(eps) >= abs(self.t2 - self.t1) / 2.0:
            raise ValueError("max eps must keep the windows disjoint: eps < |t1-t2|/2")
        if self.grid_n < 4:
            raise ValueError("grid_n must be at least 4")
        if self.truncation_t <= 0.0:
            raise ValueError("truncation_t must be positive")


@dataclass(frozen=True)
class ScanRow:
    """One eps of a scan.

    mi is None when the information is infinite and nan when the row was
    skipped for rank loss; hs_upper is None when the bound diverges.
    """

    eps: float
    cos: float
    mi: float | None
    hs_lower: float
    hs_upper: float | None
    rank_a: int
    rank_b: int
    cond: float
    ill_conditioned: bool
    skipped: bool = False

    @property
    def hs_norm(self) -> float:
        # hs_lower = h/2 with h the squared HS norm of the correlation operator
        return math.sqrt(2.0 * self.hs_lower)


@dataclass(frozen=True)
class ScanTable:
    """Rows of a scan, sorted by eps descending, plus run parameters."""

    rows: tuple
    meta: dict

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        """Numeric column; infinite MI maps to +inf, skipped rows to nan."""
        if name == "eps":
            return np.array([r.eps for r in self.rows])
        if name == "cos":
            return np.array([r.cos for r in self.rows])
        if name == "mi":
            return np.array(
                [math.inf if (r.mi is None and not r.skipped) else (r.mi if r.mi is not None else math.nan) for r in self.rows]
            )
        if name == "hs":
            return np.array([r.hs_norm for r in self.rows])
        raise ValueError(f"unknown column {name!r}")

    def usable_rows(self) -> list:
        return [r for r in self.rows if not r.skipped and not r.ill_conditioned]


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares log-log fit of a scan column against eps.

    correction_order records the expected relative size of the next
    asymptotic term (the eps^delta bookkeeping); eps_lo/eps_hi bound the
    fit window after dropping the largest eps and flagged rows.
    """

    slope: float
    intercept: float
    r2: float
    theory_slope: float
    theory_gap: float
    correction_order: float
    eps_lo: float
    eps_hi: float
    n_used: int

    def as_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# grids and row plumbing


def grading_depth(h: float, n_cells: int) -> float:
    """Decades of scale a graded grid should span for n_cells increments.

    Grows with log2(n) so refinement studies keep extending the resolved
    scale range, but is capped where conditional increment variances fall
    below what pivoted Cholesky can resolve in double precision: a cell a
    factor 10^-D below the span contributes ~10^(-2HD) of the largest
    diagonal, so 2HD is kept under ~10.
    """
    if n_cells < 1:
        raise ValueError("need at least 1 cell")
    budget = math.ceil(math.log2(n_cells)) + 5
    cond_cap = max(3, math.floor(9.6 / (2.0 * h) + 1e-9))
    return float(min(budget, cond_cap))


def graded_points(a: float, b: float, npts: int, decades: float = 8.0, toward: str = "b") -> np.ndarray:
    """npts points on [a, b], cell widths in geometric progression.

    The smallest cell sits at the chosen endpoint and the ladder spans
    `decades` orders of magnitude, so every scale band down to
    (b-a)*10^-decades gets about the same number of cells. Built by
    accumulating from the fine end to keep tiny offsets exact.
    """
    if npts < 2:
        raise ValueError("need at least 2 points")
    if b <= a:
        raise ValueError("need a < b")
    if decades < 0.0:
        raise ValueError("decades must be >= 0")
    n = npts - 1
    ratio = 10.0 ** (decades / max(n - 1, 1))
    cells = ratio ** np.arange(n)
    cells *= (b - a) / cells.sum()
    off = np.concatenate([[0.0], np.cumsum(cells)])
    off[-1] = b - a
    if toward == "b":
        pts = b - off[::-1]
        pts[-1] = b
        return pts
    if toward == "a":
        pts = a + off
        pts[0] = a
        return pts
    raise ValueError("toward must be 'a' or 'b'")


def _spectrum_quiet(ga, gb, c, rtol):
    # per-row flags carry the ill-conditioning information; the warning
    # itself would just spam a scan loop
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedWarning)
        return canonical_correlations(ga, gb, c, rtol=rtol)


def _make_row(eps, ga, gb, c, rtol, min_rank) -> ScanRow:
    spec = _spectrum_quiet(ga, gb, c, rtol)
    if min(spec.rank_a, spec.rank_b) < min_rank:
        return ScanRow(
            eps=eps,
            cos=math.nan,
            mi=math.nan,
            hs_lower=math.nan,
            hs_upper=math.nan,
            rank_a=spec.rank_a,
            rank_b=spec.rank_b,
            cond=spec.cond,
            ill_conditioned=spec.ill_conditioned,
            skipped=True,
        )
    mi = mutual_information_gy(spec)
    return ScanRow(
        eps=eps,
        cos=cos_angle(spec),
        mi=mi.value,
        hs_lower=mi.lower,
        hs_upper=mi.upper,
        rank_a=spec.rank_a,
        rank_b=spec.rank_b,
        cond=spec.cond,
        ill_conditioned=spec.ill_conditioned,
    )


def _map_ordered(fn, items, threads):
    # rows are independent; reduction is by index so results are
    # identical whether or not a pool is used
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _window_basis(center: float, eps: float, grid_n: int) -> IncrementBasis:
    return IncrementBasis.from_grid(TimeGrid(center - eps, center + eps, grid_n))


# ---------------------------------------------------------------------------
# two shrinking windows (the basic local-independence scan)


def local_independence_scan(cfg: ScanConfig, threads: int | None = None) -> ScanTable:
    """Angle and MI between increment windows around t1 and t2, per eps."""
    min_rank = cfg.grid_n * _MIN_RANK_FRACTION
    eps_desc = sorted(cfg.eps, reverse=True)

    def one(eps):
        a = _window_basis(cfg.t1, eps, cfg.grid_n)
        b = _window_basis(cfg.t2, eps, cfg.grid_n)
        return _make_row(eps, gram(a, cfg.h), gram(b, cfg.h), cross_gram(a, b, cfg.h), cfg.rtol, min_rank)

    rows = _map_ordered(one, eps_desc, threads)
    meta = {
        "experiment": "scan",
        "H": cfg.h,
        "t1": cfg.t1,
        "t2": cfg.t2,
        "eps": ",".join(repr(e) for e in eps_desc),
        "grid_n": cfg.grid_n,
        "rtol": cfg.rtol,
    }
    return ScanTable(rows=tuple(rows), meta=meta)


def fit_exponent(
    table: ScanTable,
    column: str = "cos",
    theory: float = math.nan,
    correction_order: float = math.nan,
    drop_largest: bool = True,
) -> ExponentFit:
    """Log-log slope of a scan column vs eps.

    The largest eps (pre-asymptotic) and any ill-conditioned rows are
    dropped; remaining rows must be finite and positive.  Requires at
    least 4 finite rows in the table.
    """
    finite = [r for r in table.rows if not r.skipped and r.mi is not None]
    if len(finite) < 4:
        raise ValueError("need at least 4 finite rows to fit an exponent")
    rows = sorted(table.rows, key=lambda r: -r.eps)
    if drop_largest:
        rows = rows[1:]
    kept = [r for r in rows if not r.ill_conditioned]
    for r in kept:
        if r.skipped:
            raise ValueError(f"skipped row at eps={r.eps} inside the fit range")
        if r.mi is None and column == "mi":
            raise ValueError(f"infinite MI at eps={r.eps} inside the fit range")
    if len(kept) < 3:
        raise ValueError("fewer than 3 usable rows after dropping flagged ones")

    sub = ScanTable(rows=tuple(kept), meta=table.meta)
    x = np.log(sub.column("eps"))
    y = sub.column(column)
    if np.any(~np.isfinite(y)) or np.any(y <= 0.0):
        raise ValueError(f"column {column!r} must be finite and positive for a power-law fit")
    y = np.log(y)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return ExponentFit(
        slope=float(slope),
        intercept=float(intercept),
        r2=r2,
        theory_slope=float(theory),
        theory_gap=abs(float(slope) - float(theory)),
        correction_order=float(correction_order),
        eps_lo=float(min(r.eps for r in kept)),
        eps_hi=float(max(r.eps for r in kept)),
        n_used=len(kept),
    )


# ---------------------------------------------------------------------------
# two-window theorem: rates 2-2H and 4-4H plus the constant r_H


def r_h_dual_gram(h: float, n: int = 2048) -> float:
    """Prefactor via the dual-norm route, no window scan involved.

    The leading constant in the scan convention equals
    H |2H-1| 2^(2-2H) M^2 with M^2 the squared dual norm of the mean
    functional over unit-variance increment combinations on (0, 1),
    computed as a Gram quadratic form w' G^{-1} w.  Kept as a diagnostic
    cross-route for the extrapolated value; see the README note on the
    spectral-formula normalization gap.
    """
    check_hurst(h)
    from scipy.linalg import cho_factor, cho_solve

    basis = IncrementBasis.from_grid(TimeGrid(0.0, 1.0, n + 1))
    g = gram(basis, h)
    w = np.diff(np.linspace(0.0, 1.0, n + 1))
    m2 = float(w @ cho_solve(cho_factor(g, lower=True), w))
    return h * abs(2.0 * h - 1.0) * 2.0 ** (2.0 - 2.0 * h) * m2


@dataclass(frozen=True)
class Theorem21Report:
    fit_cos: ExponentFit
    fit_mi: ExponentFit
    r_h_extrapolated: float
    r_h_spectral: float
    r_h_rel_gap: float
    r_h_dual_gram: float
    mi_cos_ratio: float
    constant_inconclusive: bool
    table: ScanTable

    def as_dict(self) -> dict:
        return {
            "fit_cos": self.fit_cos.as_dict(),
            "fit_mi": self.fit_mi.as_dict(),
            "r_h_extrapolated": self.r_h_extrapolated,
            "r_h_spectral": self.r_h_spectral,
            "r_h_rel_gap": self.r_h_rel_gap,
            "r_h_dual_gram": self.r_h_dual_gram,
            "mi_cos_ratio": self.mi_cos_ratio,
            "constant_inconclusive": self.constant_inconclusive,
            "table": scan_to_dict(self.table),
        }


def theorem21_check(
    h: float,
    t1: float = 0.0,
    t2: float = 1.0,
    eps: tuple = DEFAULT_EPS,
    grid_n: int = DEFAULT_GRID_N,
    rtol: float = 1e-10,
    threads: int | None = None,
) -> Theorem21Report:
    """Fit both two-window decay rates and cross-check the constant r_H.

    The prefactor is extrapolated as cos * (eps/d)^(2H-2) at the smallest
    clean eps (no Richardson step; adequate at the 5% comparison level)
    and compared with the spectral-integral value.  Also reports
    MI / (0.5 cos^2), which tends to 1 in the small-eps limit.
    """
    check_hurst(h)
    if abs(2.0 * h - 1.0) < 0.1:
        raise ValueError("constant comparison needs |2H-1| >= 0.1")
    cfg = ScanConfig(h=h, t1=t1, t2=t2, eps=eps, grid_n=grid_n, rtol=rtol)
    table = local_independence_scan(cfg, threads=threads)
    delta = min(1.0, 2.0 - 2.0 * h)
    fit_cos = fit_exponent(table, "cos", theory=2.0 - 2.0 * h, correction_order=delta)
    fit_mi = fit_exponent(table, "mi", theory=4.0 - 4.0 * h, correction_order=delta)

    usable = table.usable_rows()
    if not usable:
        raise ValueError("every row was skipped or flagged; cannot extrapolate r_H")
    last = usable[-1]  # smallest stable eps
    d = abs(t2 - t1)
    r_extrap = last.cos * (last.eps / d) ** (2.0 * h - 2.0)
    r_spec = r_h_spectral(h)
    rel_gap = abs(r_extrap - r_spec) / r_spec
    mi_cos_ratio = last.mi / (0.5 * last.cos**2) if last.mi is not None else math.inf
    full_rank = grid_n - 1
    inconclusive = last.rank_a < full_rank or last.rank_b < full_rank
    return Theorem21Report(
        fit_cos=fit_cos,
        fit_mi=fit_mi,
        r_h_extrapolated=float(r_extrap),
        r_h_spectral=float(r_spec),
        r_h_rel_gap=float(rel_gap),
        r_h_dual_gram=r_h_dual_gram(h),
        mi_cos_ratio=float(mi_cos_ratio),
        constant_inconclusive=inconclusive,
        table=table,
    )


# ---------------------------------------------------------------------------
# window against the truncated past: rates 1-H and 2-2H


def past_window_scan(
    h: float,
    t: float,
    truncation_t: float = DEFAULT_TRUNCATION,
    eps: tuple = DEFAULT_EPS,
    grid_n: int = DEFAULT_GRID_N,
    rtol: float = 1e-10,
    grading_decades: float | None = None,
    threads: int | None = None,
) -> ScanTable:
    """Angle and MI between the past (-T, 0) and a window around t > 0.

    The past is discretized on a geometrically graded grid, finest toward
    0 where the cross kernel varies fastest.
    """
    check_hurst(h)
    if t <= 0.0:
        raise ValueError("t must be positive")
    eps = tuple(float(e) for e in eps)
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps schedule must be strictly decreasing")
    if max(eps) >= t:
        raise ValueError("max eps must keep the window inside (0, inf): eps < t")
    if truncation_t < 16.0 * t:
        raise ValueError("truncation must satisfy T >= 16 t")
    if grid_n < 4:
        raise ValueError("grid_n must be at least 4")
    if grading_decades is None:
        grading_decades = grading_depth(h, grid_n - 1)

    past = IncrementBasis.from_points(graded_points(-truncation_t, 0.0, grid_n, grading_decades, toward="b"))
    gp = gram(past, h)
    min_rank = grid_n * _MIN_RANK_FRACTION

    def one(e):
        b = _window_basis(t, e, grid_n)
        return _make_row(e, gp, gram(b, h), cross_gram(past, b, h), rtol, min_rank)

    rows = _map_ordered(one, sorted(eps, reverse=True), threads)
    meta = {
        "experiment": "past-window",
        "H": h,
        "t": t,
        "T": truncation_t,
        "eps": ",".join(repr(e) for e in sorted(eps, reverse=True)),
        "grid_n": grid_n,
        "grading_decades": grading_decades,
        "rtol": rtol,
    }
    return ScanTable(rows=tuple(rows), meta=meta)


@dataclass(frozen=True)
class Theorem22Report:
    fit_cos: ExponentFit
    fit_mi: ExponentFit
    fit_cos_2t: ExponentFit
    fit_mi_2t: ExponentFit
    truncation_sensitivity: float
    truncation_dominated: bool
    table: ScanTable
    table_2t: ScanTable

    def as_dict(self) -> dict:
        return {
            "fit_cos": self.fit_cos.as_dict(),
            "fit_mi": self.fit_mi.as_dict(),
            "fit_cos_2t": self.fit_cos_2t.as_dict(),
            "fit_mi_2t": self.fit_mi_2t.as_dict(),
            "truncation_sensitivity": self.truncation_sensitivity,
            "truncation_dominated": self.truncation_dominated,
            "table": scan_to_dict(self.table),
            "table_2t": scan_to_dict(self.table_2t),
        }


def theorem22_check(
    h: float,
    t: float = 1.0,
    truncation_t: float = DEFAULT_TRUNCATION,
    eps: tuple = DEFAULT_EPS,
    grid_n: int = DEFAULT_GRID_N,
    rtol: float = 1e-10,
    grading_decades: float | None = None,
    threads: int | None = None,
) -> Theorem22Report:
    """Past-vs-window rates: cos slope against 1-H, MI slope against 2-2H.

    Reruns at 2T; the report is flagged truncation-dominated when either
    slope moves by more than 0.02.
    """
    table = past_window_scan(h, t, truncation_t, eps, grid_n, rtol, grading_decades, threads)
    table2 = past_window_scan(h, t, 2.0 * truncation_t, eps, grid_n, rtol, grading_decades, threads)
    # next term is O(eps^(2-H)), one full power of eps beyond the lead
    fit_cos = fit_exponent(table, "cos", theory=1.0 - h, correction_order=1.0)
    fit_mi = fit_exponent(table, "mi", theory=2.0 - 2.0 * h, correction_order=1.0)
    fit_cos2 = fit_exponent(table2, "cos", theory=1.0 - h, correction_order=1.0)
    fit_mi2 = fit_exponent(table2, "mi", theory=2.0 - 2.0 * h, correction_order=1.0)
    sens = max(abs(fit_cos.slope - fit_cos2.slope), abs(fit_mi.slope - fit_mi2.slope))
    return Theorem22Report(
        fit_cos=fit_cos,
        fit_mi=fit_mi,
        fit_cos_2t=fit_cos2,
        fit_mi_2t=fit_mi2,
        truncation_sensitivity=float(sens),
        truncation_dominated=sens > 0.02,
        table=table,
        table_2t=table2,
    )


# ---------------------------------------------------------------------------
# adjacent intervals: unbounded MI growth under refinement


@dataclass(frozen=True)
class AdjacencyReport:
    n_schedule: tuple
    mi: tuple
    mi_alt_eps: tuple
    eps: float
    alt_eps: float
    strictly_increasing: bool
    min_doubling_growth: float
    eps_invariance_gap: float

    def as_dict(self) -> dict:
        return asdict(self)


def adjacency_mi_table(
    h: float,
    eps: float = 1.0,
    n_schedule: tuple = (4, 8, 16, 32, 64, 128, 256),
    rtol: float = 1e-10,
) -> list:
    """MI between increment bases on (-eps, 0) and (0, eps) per grid size n."""
    check_hurst(h)
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    out = []
    for n in n_schedule:
        if n < 2:
            raise ValueError("grid sizes must be at least 2")
        a = IncrementBasis.from_grid(TimeGrid(-eps, 0.0, int(n) + 1))
        b = IncrementBasis.from_grid(TimeGrid(0.0, eps, int(n) + 1))
        spec = _spectrum_quiet(gram(a, h), gram(b, h), cross_gram(a, b, h), rtol)
        mi = mutual_information_gy(spec)
        out.append(math.inf if mi.value is None else mi.value)
    return out


def adjacency_divergence(
    h: float,
    eps: float = 1.0,
    n_schedule: tuple = (4, 8, 16, 32, 64, 128, 256),
    rtol: float = 1e-10,
    alt_eps_factor: float = 0.25,
) -> AdjacencyReport:
    """Divergence proxy for adjacent intervals.

    MI between (-eps, 0) and (0, eps) must grow strictly with the grid
    and show no plateau (>= 2% per doubling is the acceptance bar), while
    being invariant under eps by self-similarity.
    """
    if abs(2.0 * h - 1.0) < 0.1:
        raise ValueError("divergence check needs |2H-1| >= 0.1")
    ns = tuple(int(n) for n in n_schedule)
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n schedule must be strictly increasing")
    mi = adjacency_mi_table(h, eps, ns, rtol)
    alt = alt_eps_factor * eps
    mi_alt = adjacency_mi_table(h, alt, ns, rtol)
    increasing = all(b > a for a, b in zip(mi, mi[1:]))
    growth = min(b / a - 1.0 for a, b in zip(mi, mi[1:])) if len(mi) > 1 else math.nan
    gap = max(abs(x - y) for x, y in zip(mi, mi_alt))
    return AdjacencyReport(
        n_schedule=ns,
        mi=tuple(mi),
        mi_alt_eps=tuple(mi_alt),
        eps=float(eps),
        alt_eps=float(alt),
        strictly_increasing=increasing,
        min_doubling_growth=float(growth),
        eps_invariance_gap=float(gap),
    )


# ---------------------------------------------------------------------------
# truncated past against truncated future


def past_future_angle(
    h: float,
    truncation_t: float = 16.0,
    n: int = 128,
    grading_decades: float | None = None,
    rtol: float = 1e-10,
) -> float:
    """cos angle between increments on (-T, 0) and (0, T), graded toward 0.

    With the default depth rule the grid dilates exactly when T changes,
    so by self-similarity the value depends on T only through rounding;
    n is the real refinement knob.
    """
    check_hurst(h)
    if truncation_t <= 0.0:
        raise ValueError("truncation_t must be positive")
    if n < 2:
        raise ValueError("n must be at least 2")
    if grading_decades is None:
        grading_decades = grading_depth(h, int(n))
    past = IncrementBasis.from_points(graded_points(-truncation_t, 0.0, int(n) + 1, grading_decades, toward="b"))
    future = IncrementBasis.from_points(graded_points(0.0, truncation_t, int(n) + 1, grading_decades, toward="a"))
    spec = _spectrum_quiet(gram(past, h), gram(future, h), cross_gram(past, future, h), rtol)
    return cos_angle(spec)


@dataclass(frozen=True)
class PastFutureReport:
    value: float
    value_2n: float
    value_2t: float
    drift_n: float
    drift_t: float
    margin: float

    def as_dict(self) -> dict:
        return asdict(self)


def past_future_report(
    h: float,
    truncation_t: float = 16.0,
    n: int = 128,
    grading_decades: float | None = None,
    rtol: float = 1e-10,
) -> PastFutureReport:
    """Past-future angle with doubling studies in n and T.

    The angle must stay bounded away from zero (cos below 1); the margin
    is reported, no universal constant is asserted. Drifts are relative
    except near zero (the Brownian case), where that would divide noise
    by noise.
    """
    v = past_future_angle(h, truncation_t, n, grading_decades, rtol)
    v2n = past_future_angle(h, truncation_t, 2 * n, grading_decades, rtol)
    v2t = past_future_angle(h, 2.0 * truncation_t, n, grading_decades, rtol)
    margin = 1.0 - max(v, v2n, v2t)
    scale = max(v, 1e-8)
    return PastFutureReport(
        value=v,
        value_2n=v2n,
        value_2t=v2t,
        drift_n=abs(v2n - v) / scale,
        drift_t=abs(v2t - v) / scale,
        margin=margin,
    )


# ---------------------------------------------------------------------------
# window against the complement of a surrounding interval


@dataclass(frozen=True)
class ComplementReport:
    fit_hs: ExponentFit
    fit_hs_2t: ExponentFit
    truncation_sensitivity: float
    truncation_dominated: bool
    table: ScanTable
    table_2t: ScanTable

    def as_dict(self) -> dict:
        return {
            "fit_hs": self.fit_hs.as_dict(),
            "fit_hs_2t": self.fit_hs_2t.as_dict(),
            "truncation_sensitivity": self.truncation_sensitivity,
            "truncation_dominated": self.truncation_dominated,
            "table": scan_to_dict(self.table),
            "table_2t": scan_to_dict(self.table_2t),
        }


def _complement_table(h, t1, t, t2, eps, truncation_t, grid_n, rtol, grading_decades, threads):
    left = IncrementBasis.from_points(graded_points(t1 - truncation_t, t1, grid_n, grading_decades, toward="b"))
    right = IncrementBasis.from_points(graded_points(t2, t2 + truncation_t, grid_n, grading_decades, toward="a"))
    comp = IncrementBasis(
        s=np.concatenate([left.s, right.s]),
        t=np.concatenate([left.t, right.t]),
    )
    gc = gram(comp, h)
    min_rank = grid_n * _MIN_RANK_FRACTION

    def one(e):
        b = _window_basis(t, e, grid_n)
        return _make_row(e, gc, gram(b, h), cross_gram(comp, b, h), rtol, min_rank)

    rows = _map_ordered(one, sorted(eps, reverse=True), threads)
    meta = {
        "experiment": "complement-window",
        "H": h,
        "t1": t1,
        "t": t,
        "t2": t2,
        "T": truncation_t,
        "eps": ",".join(repr(e) for e in sorted(eps, reverse=True)),
        "grid_n": grid_n,
        "grading_decades": grading_decades,
        "rtol": rtol,
    }
    return ScanTable(rows=tuple(rows), meta=meta)


def complement_window_scan(
    h: float,
    t1: float = 0.0,
    t: float = 0.5,
    t2: float = 1.0,
    eps: tuple = DEFAULT_EPS,
    truncation_t: float = DEFAULT_TRUNCATION,
    grid_n: int = DEFAULT_GRID_N,
    rtol: float = 1e-10,
    grading_decades: float | None = None,
    threads: int | None = None,
) -> ComplementReport:
    """Window inside (t1, t2) against the truncated two-sided complement.

    Fits the Hilbert-Schmidt norm of the correlation operator against the
    rate 1-H that the two-sided estimate yields, with a 2T sensitivity
    rerun.
    """
    check_hurst(h)
    if not t1 < t < t2:
        raise ValueError("need t1 < t < t2")
    eps = tuple(float(e) for e in eps)
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps schedule must be strictly decreasing")
    if t - max(eps) <= t1 or t + max(eps) >= t2:
        raise ValueError("windows must stay strictly inside (t1, t2)")
    if truncation_t <= (t2 - t1):
        raise ValueError("truncation_t must exceed the inner interval length")
    if grading_decades is None:
        grading_decades = grading_depth(h, grid_n - 1)

    table = _complement_table(h, t1, t, t2, eps, truncation_t, grid_n, rtol, grading_decades, threads)
    table2 = _complement_table(h, t1, t, t2, eps, 2.0 * truncation_t, grid_n, rtol, grading_decades, threads)
    fit = fit_exponent(table, "hs", theory=1.0 - h, correction_order=math.nan)
    fit2 = fit_exponent(table2, "hs", theory=1.0 - h, correction_order=math.nan)
    sens = abs(fit.slope - fit2.slope)
    return ComplementReport(
        fit_hs=fit,
        fit_hs_2t=fit2,
        truncation_sensitivity=float(sens),
        truncation_dominated=sens > 0.02,
        table=table,
        table_2t=table2,
    )


# ---------------------------------------------------------------------------
# two-dimensional isotropic field: ball-to-ball angle rate


@dataclass(frozen=True)
class Levy2dReport:
    fit_cos: ExponentFit
    table: ScanTable

    def as_dict(self) -> dict:
        return {"fit_cos": self.fit_cos.as_dict(), "table": scan_to_dict(self.table)}


def _ball_lattice(center: np.ndarray, eps: float, grid_per_axis: int) -> np.ndarray:
    """Square-lattice points inside the closed ball B(center, eps), center excluded."""
    offs = np.linspace(-eps, eps, grid_per_axis)
    ox, oy = np.meshgrid(offs, offs, indexing="ij")
    pts = np.column_stack([ox.ravel(), oy.ravel()])
    inside = np.einsum("ij,ij->i", pts, pts) <= eps * eps * (1.0 + 1e-12)
    nonzero = np.any(pts != 0.0, axis=1)
    pts = pts[inside & nonzero]
    if pts.shape[0] < 8:
        raise ValueError("lattice too coarse: fewer than 8 points fall inside the ball")
    return center[None, :] + pts


def levy2d_scan(
    h: float,
    c1=(0.0, 0.0),
    c2=(1.0, 0.0),
    eps: tuple = DEFAULT_EPS,
    grid_per_axis: int = 9,
    rtol: float = 1e-10,
    threads: int | None = None,
) -> Levy2dReport:
    """Ball-to-ball angle decay for the isotropic two-parameter field.

    Increments are differences X(p) - X(center) over lattice points p in
    each ball; the fitted cos slope is compared against 2-2H.
    """
    check_hurst(h)
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    if c1.shape != (2,) or c2.shape != (2,):
        raise ValueError("centers must be 2-dimensional points")
    dist = float(np.linalg.norm(c2 - c1))
    eps = tuple(float(e) for e in eps)
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps schedule must be strictly decreasing")
    if max(eps) >= dist / 2.0:
        raise ValueError("balls must be disjoint at the largest eps")

    def one(e):
        pa = _ball_lattice(c1, e, grid_per_axis)
        pb = _ball_lattice(c2, e, grid_per_axis)
        la = np.tile(c1, (pa.shape[0], 1))
        lb = np.tile(c2, (pb.shape[0], 1))
        ga = levy_increment_gram(la, pa, h)
        gb = levy_increment_gram(lb, pb, h)
        c = levy_increment_cross_gram(la, pa, lb, pb, h)
        min_rank = min(pa.shape[0], pb.shape[0]) * _MIN_RANK_FRACTION
        return _make_row(e, ga, gb, c, rtol, min_rank)

    rows = _map_ordered(one, sorted(eps, reverse=True), threads)
    meta = {
        "experiment": "levy2d",
        "H": h,
        "c1": f"({c1[0]!r},{c1[1]!r})",
        "c2": f"({c2[0]!r},{c2[1]!r})",
        "eps": ",".join(repr(e) for e in sorted(eps, reverse=True)),
        "grid_per_axis": grid_per_axis,
        "rtol": rtol,
    }
    table = ScanTable(rows=tuple(rows), meta=meta)
    fit = fit_exponent(table, "cos", theory=2.0 - 2.0 * h, correction_order=math.nan)
    return Levy2dReport(fit_cos=fit, table=table)


# ---------------------------------------------------------------------------
# serialization (CSV with '#' parameter header; JSON mirror)

_SCAN_COLUMNS = (
    "eps",
    "cos_angle",
    "mi",
    "hs_lower",
    "hs_upper",
    "rank_a",
    "rank_b",
    "cond",
    "ill_conditioned",
    "skipped",
)


def _fmt_csv(value) -> str:
    if value is None:
        return "inf"
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    x = float(value)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf"
    return repr(x)


def _row_values(row: ScanRow) -> tuple:
    return (
        row.eps,
        row.cos,
        row.mi,
        row.hs_lower,
        row.hs_upper,
        row.rank_a,
        row.rank_b,
        row.cond,
        row.ill_conditioned,
        row.skipped,
    )


def scan_csv_text(table: ScanTable, extra_meta: dict | None = None) -> str:
    """CSV rows with '#'-prefixed parameter header, LF endings, '.' decimals."""
    meta = dict(table.meta)
    if extra_meta:
        meta.update(extra_meta)
    lines = [f"# {k} = {v}" for k, v in meta.items()]
    lines.append(",".join(_SCAN_COLUMNS))
    for row in table.rows:
        lines.append(",".join(_fmt_csv(v) for v in _row_values(row)))
    return "\n".join(lines) + "\n"


def write_scan_csv(table: ScanTable, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(scan_csv_text(table))


def _json_val(x):
    if x is None:
        return "inf"
    if isinstance(x, float) and math.isnan(x):
        return None
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def scan_to_dict(table: ScanTable) -> dict:
    rows = []
    for row in table.rows:
        rows.append(
            {
                "eps": row.eps,
                "cos_angle": _json_val(row.cos),
                "mi": _json_val(row.mi),
                "hs_lower": _json_val(row.hs_lower),
                "hs_upper": _json_val(row.hs_upper),
                "rank_a": row.rank_a,
                "rank_b": row.rank_b,
                "cond": row.cond,
                "ill_conditioned": bool(row.ill_conditioned),
                "skipped": bool(row.skipped),
            }
        )
    return {"config": dict(table.meta), "rows": rows}


def write_scan_json(table: ScanTable, path) -> None:
    with open(path, "w", newline="") as fh:
        json.dump(scan_to_dict(table), fh, indent=2)
        fh.write("\n")
