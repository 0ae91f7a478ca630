"""Classical single-scaling-function filter theory in the frequency domain.

Filters here are the single-level case of the generalized machinery: an
N-tuple of circle functions, stored divided by sqrt(N) so that the matrix
whose (j, l) entry is filter_j(x + l/N) is unitary wherever the family is
valid.  On top of the filter checks this module builds scaling functions by
truncated infinite products, derives the wavelet family, and runs tight-frame
partial-sum diagnostics, with exact closed-form inner products for
frequency-domain indicator wavelets (Shannon, Journe) and a trapezoid
quadrature path for sampled data.

Frequency-domain conventions: dilation sends f(x) to f(x/N) / sqrt(N) and
translation multiplies by exp(-2 pi i x); inner products conjugate the
second argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .multiplicity import check_constant_near
from .reporting import CheckItem, CheckReport, Failure, cell_str
from .torus import PiecewiseFn, as_fraction, common_refinement, reduce_mod_1

TWO_PI = 2.0 * math.pi


def _unit_phase(t) -> complex:
    """exp(2 pi i t) with the argument reduced exactly first."""
    return complex(np.exp(2j * math.pi * float(reduce_mod_1(t))))


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """Finite combination sum_v a_v exp(-2 pi i v x)."""

    coeffs: dict

    def __post_init__(self):
        object.__setattr__(
            self, "coeffs", {int(v): a for v, a in self.coeffs.items() if a != 0}
        )

    def __call__(self, x) -> complex:
        x = reduce_mod_1(x)
        return sum(
            (complex(a) * _unit_phase(-v * x) for v, a in self.coeffs.items()),
            0j,
        )

    def eval_grid(self, xs: np.ndarray) -> np.ndarray:
        out = np.zeros_like(xs, dtype=complex)
        for v, a in self.coeffs.items():
            out += complex(a) * np.exp(-2j * math.pi * v * xs)
        return out

    def value_at_zero(self):
        """Exact when the coefficients are exact (the phases are all 1)."""
        return sum(self.coeffs.values())


@dataclass(frozen=True, eq=False)
class ClassicalMSystem:
    """An N-tuple of filters (low-pass first), stored divided by sqrt(N)."""

    dilation: int
    filters: tuple

    def __post_init__(self):
        object.__setattr__(self, "filters", tuple(self.filters))
        if self.dilation < 2:
            raise ValueError("dilation must be an integer >= 2")
        if len(self.filters) != self.dilation:
            raise ValueError("need exactly one filter per dilation branch")

    @property
    def lowpass(self):
        return self.filters[0]

    @property
    def is_piecewise(self) -> bool:
        return all(isinstance(m, PiecewiseFn) for m in self.filters)


def _value_at_zero(m):
    if isinstance(m, TrigPolynomial):
        return m.value_at_zero()
    return m(Fraction(0))


def _is_exact_filter(m) -> bool:
    if isinstance(m, PiecewiseFn):
        return m.is_exact
    if isinstance(m, TrigPolynomial):
        return all(isinstance(a, (int, Fraction)) for a in m.coeffs.values())
    return False


def filter_matrix_at(system: ClassicalMSystem, x) -> np.ndarray:
    """The matrix (filter_j(x + l/N))_{j,l}; exact for exact piecewise data."""
    n = system.dilation
    x = reduce_mod_1(x)
    entries = [
        [m(reduce_mod_1(x + Fraction(l, n))) for l in range(n)]
        for m in system.filters
    ]
    flat = [v for row in entries for v in row]
    if all(isinstance(v, (int, Fraction)) for v in flat):
        return linalg.exact_matrix(entries)
    return np.array([[complex(v) for v in row] for row in entries], dtype=complex)


def _grid_fractions(grid_points: int) -> list[Fraction]:
    return [Fraction(t, grid_points) for t in range(grid_points)]


def check_classical_lowpass(
    m0,
    dilation: int,
    *,
    origin_radius=None,
    cohen_interval=None,
    grid_points: int = 4096,
    tol: float = 1e-12,
) -> CheckReport:
    """The four low-pass filter conditions, in stored (over sqrt(N)) units.

    (origin-value)       m0(0) = 1
    (squared-partition)  sum over branches of |m0(x + l/N)|^2 = 1
    (smooth-at-origin)   trig polynomials pass outright; piecewise data must
                         be constant near 0
    (cohen)              |m0| bounded away from 0 on an interval around 0,
                         by default [-1/(2N), 1/(2N)]; a heuristic stand-in
                         for the classical nonvanishing condition
    """
    n = dilation
    report = CheckReport("classical-low-pass")
    exact = _is_exact_filter(m0)

    origin = report.add(CheckItem("origin-value", passed=True, exact=exact))
    got = _value_at_zero(m0)
    if exact:
        if got != 1:
            origin.record_failure(
                Failure("origin-value", cell_str(Fraction(0), Fraction(0)),
                        detail=f"value at 0 is {got}, expected 1")
            )
    else:
        residual = abs(complex(got) - 1)
        origin.record_residual(residual)
        if residual > tol:
            origin.record_failure(
                Failure("origin-value", cell_str(Fraction(0), Fraction(0)),
                        residual=residual)
            )

    sq = report.add(
        CheckItem("squared-partition", passed=True,
                  exact=exact and isinstance(m0, PiecewiseFn))
    )
    if isinstance(m0, PiecewiseFn) and exact:
        total = None
        for l in range(n):
            shifted = m0.translate(Fraction(l, n))
            sq_l = shifted.zip_with(shifted, lambda u, v: u * u.conjugate())
            total = sq_l if total is None else total.zip_with(sq_l, lambda u, v: u + v)
        for a, b, v in total.cellwise():
            if v != 1:
                sq.record_failure(
                    Failure("squared-partition", cell_str(a, b),
                            detail=f"branch sum is {v}, expected 1")
                )
    else:
        worst = 0.0
        for x in _grid_fractions(grid_points):
            total = sum(
                abs(complex(m0(reduce_mod_1(x + Fraction(l, n))))) ** 2
                for l in range(n)
            )
            worst = max(worst, abs(total - 1.0))
        sq.record_residual(worst)
        if worst > tol:
            sq.record_failure(
                Failure("squared-partition", cell_str(Fraction(0), Fraction(1)),
                        residual=worst)
            )

    smooth = report.add(CheckItem("smooth-at-origin", passed=True, exact=True))
    if isinstance(m0, PiecewiseFn):
        sub = check_constant_near(m0, [Fraction(0)], origin_radius)
        if not sub.passed:
            for item in sub.items:
                for f in item.failures:
                    smooth.record_failure(f)
    # trig polynomials are smooth everywhere; nothing to check

    cohen = report.add(CheckItem("cohen", passed=True, exact=exact))
    lo, hi = cohen_interval if cohen_interval is not None else (
        Fraction(-1, 2 * n), Fraction(1, 2 * n)
    )
    lo, hi = as_fraction(lo), as_fraction(hi)
    if isinstance(m0, PiecewiseFn):
        # cells meeting the closed interval in positive measure must be nonzero
        for a, b, v in m0.cellwise():
            for cell_lo in (a - 1, a, a + 1):  # the interval straddles the wrap point
                cell_hi = cell_lo + (b - a)
                if cell_hi > lo and cell_lo < hi and v == 0:
                    cohen.record_failure(
                        Failure("cohen", cell_str(a, b),
                                detail=f"filter vanishes on [{cell_lo}, {cell_hi}) "
                                       f"inside [{lo}, {hi}]")
                    )
    else:
        samples = 512
        worst = None
        for t in range(samples + 1):
            x = lo + (hi - lo) * Fraction(t, samples)
            mag = abs(complex(m0(reduce_mod_1(x))))
            worst = mag if worst is None else min(worst, mag)
        cohen.record_residual(worst)
        if worst <= tol:
            cohen.record_failure(
                Failure("cohen", [str(lo), str(hi)],
                        detail="filter modulus not bounded away from 0",
                        residual=worst)
            )
    return report


def check_classical_highpass(
    system: ClassicalMSystem, *, grid_points: int = 4096, tol: float = 1e-12
) -> CheckReport:
    """Unitarity of the translate matrix at every representable point."""
    report = CheckReport("classical-high-pass")
    exact = system.is_piecewise and all(_is_exact_filter(m) for m in system.filters)
    item = report.add(CheckItem("translate-matrix-unitarity", passed=True, exact=exact))
    n = system.dilation
    if exact:
        parts = [
            m.translate(Fraction(l, n)).partition
            for m in system.filters
            for l in range(n)
        ]
        part = common_refinement(*parts)
        for a, b in part.cells():
            mat = filter_matrix_at(system, a)
            residual = linalg.unitarity_residual(mat)
            if residual > 0:
                item.record_failure(
                    Failure("translate-matrix-unitarity", cell_str(a, b),
                            residual=residual)
                )
    else:
        worst = 0.0
        for x in _grid_fractions(grid_points):
            mat = filter_matrix_at(system, x)
            worst = max(worst, linalg.unitarity_residual(mat))
        item.record_residual(worst)
        if worst > tol:
            item.record_failure(
                Failure("translate-matrix-unitarity",
                        cell_str(Fraction(0), Fraction(1)), residual=worst)
            )
    return report


@dataclass(frozen=True, eq=False)
class FrequencyGridFn:
    """Complex samples on a uniform rational grid k*step, k = kmin..kmax.

    Evaluation off the sampled window returns 0 (compact support reading).
    """

    step: Fraction
    kmin: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "step", as_fraction(self.step))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        if self.step <= 0:
            raise ValueError("grid step must be positive")

    @classmethod
    def on_symmetric_grid(cls, extent, step, values) -> "FrequencyGridFn":
        extent, step = as_fraction(extent), as_fraction(step)
        kmin = -extent / step
        if kmin.denominator != 1:
            raise ValueError("extent must be an integer multiple of the step")
        return cls(step, int(kmin), values)

    @property
    def kmax(self) -> int:
        return self.kmin + len(self.values) - 1

    def points(self) -> list[Fraction]:
        return [k * self.step for k in range(self.kmin, self.kmax + 1)]

    def points_float(self) -> np.ndarray:
        return np.arange(self.kmin, self.kmax + 1, dtype=float) * float(self.step)

    def __call__(self, x) -> complex:
        k = as_fraction(x) / self.step
        if k.denominator != 1:
            raise ValueError(f"{x} is not a grid point")
        idx = int(k) - self.kmin
        if 0 <= idx < len(self.values):
            return complex(self.values[idx])
        return 0j

    def norm_squared(self) -> float:
        w = np.abs(self.values) ** 2
        if len(w) < 2:
            return 0.0
        return float(self.step) * float(np.sum(w) - 0.5 * (w[0] + w[-1]))


def scaling_function(
    m0,
    dilation: int,
    depth: int,
    extent=Fraction(64),
    step=Fraction(1, 1024),
) -> FrequencyGridFn:
    """Truncated infinite product: product over i <= depth of m0(x / N^i).

    Factors are appended in increasing i, so deepening by one multiplies the
    previous values bit-for-bit by the new factor (a telescoping check).
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    n = dilation
    extent, step = as_fraction(extent), as_fraction(step)
    kmin = -extent / step
    if kmin.denominator != 1:
        raise ValueError("extent must be an integer multiple of the step")
    kmin = int(kmin)
    count = -2 * kmin + 1
    if isinstance(m0, TrigPolynomial):
        xs = np.arange(kmin, kmin + count, dtype=float) * float(step)
        values = np.ones(count, dtype=complex)
        for i in range(1, depth + 1):
            values *= m0.eval_grid(xs / float(n) ** i)
    else:
        values = np.ones(count, dtype=complex)
        for idx in range(count):
            x = (kmin + idx) * step
            v = complex(1)
            for i in range(1, depth + 1):
                v *= complex(m0(x / n**i))
                if v == 0:
                    break
            values[idx] = v
    return FrequencyGridFn(step, kmin, values)


def wavelet_family(system: ClassicalMSystem, phi: FrequencyGridFn) -> list[FrequencyGridFn]:
    """The N-1 wavelets: index k gives filter_k(x/N) * phi(x/N) on the
    N-times-dilated grid (the stored filters already absorb the 1/sqrt(N))."""
    n = system.dilation
    out = []
    xs = phi.points()
    for k in range(1, n):
        mk = system.filters[k]
        if isinstance(mk, TrigPolynomial):
            gains = mk.eval_grid(phi.points_float())
        else:
            gains = np.array([complex(mk(x)) for x in xs], dtype=complex)
        out.append(FrequencyGridFn(n * phi.step, phi.kmin, gains * phi.values))
    return out


@dataclass(frozen=True, eq=False)
class IndicatorWavelet:
    """Characteristic function of finitely many rational intervals of the line."""

    intervals: tuple

    def __post_init__(self):
        normalized = []
        for a, b in self.intervals:
            a, b = as_fraction(a), as_fraction(b)
            if b > a:
                normalized.append((a, b))
        normalized.sort()
        merged: list[list[Fraction]] = []
        for a, b in normalized:
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        object.__setattr__(self, "intervals", tuple((a, b) for a, b in merged))

    @property
    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.intervals), Fraction(0))

    def contains(self, x) -> bool:
        x = as_fraction(x)
        return any(a <= x < b for a, b in self.intervals)

    def dilated(self, scale: Fraction) -> "IndicatorWavelet":
        scale = as_fraction(scale)
        return IndicatorWavelet(tuple((a * scale, b * scale) for a, b in self.intervals))

    def intersection(self, other: "IndicatorWavelet") -> "IndicatorWavelet":
        out = []
        for a, b in self.intervals:
            for c, d in other.intervals:
                lo, hi = max(a, c), min(b, d)
                if hi > lo:
                    out.append((lo, hi))
        return IndicatorWavelet(tuple(out))

    def sampled(self, extent, step) -> FrequencyGridFn:
        extent, step = as_fraction(extent), as_fraction(step)
        kmin = -extent / step
        if kmin.denominator != 1:
            raise ValueError("extent must be an integer multiple of the step")
        kmin = int(kmin)
        count = -2 * kmin + 1
        values = np.array(
            [1.0 if self.contains((kmin + i) * step) else 0.0 for i in range(count)],
            dtype=complex,
        )
        return FrequencyGridFn(step, kmin, values)


def journe_wavelet() -> IndicatorWavelet:
    """The frequency support of the Journe orthonormal wavelet."""
    return IndicatorWavelet((
        (Fraction(-16, 7), Fraction(-2)),
        (Fraction(-1, 2), Fraction(-2, 7)),
        (Fraction(2, 7), Fraction(1, 2)),
        (Fraction(2), Fraction(16, 7)),
    ))


@dataclass(frozen=True)
class FrameSum:
    """Partial tight-frame sum against the target squared norm."""

    total: float
    target: float

    @property
    def ratio(self) -> float:
        return self.total / self.target if self.target else 0.0


def _indicator_inner_product(f: IndicatorWavelet, psi: IndicatorWavelet,
                             dilation: int, j: int, v: int) -> complex:
    """<f, D^j T^v psi> in closed form: an exact interval intersection and
    an analytic integral of the phase over each piece."""
    scale = Fraction(dilation) ** j
    region = f.intersection(psi.dilated(scale))
    if not region.intervals:
        return 0j
    if v == 0:
        return complex(float(region.measure) * float(scale) ** -0.5)
    total = 0j
    w = Fraction(v) / scale
    for a, b in region.intervals:
        total += (_unit_phase(w * b) - _unit_phase(w * a)) / (2j * math.pi * float(w))
    return total * float(scale) ** -0.5


def _grid_inner_product(f: FrequencyGridFn, psi: FrequencyGridFn,
                        dilation: int, j: int, v: int) -> complex:
    """Trapezoid quadrature of <f, D^j T^v psi> on the shared grid scale.

    Integrates in whichever variable keeps every evaluation on a grid point:
    the wavelet's for j >= 0, the analyzed function's for j < 0.
    """
    if f.step != psi.step:
        raise ValueError("quadrature needs a shared grid step")
    h = float(f.step)
    scale = float(dilation) ** j
    m = dilation ** abs(j)
    if j >= 0:
        ks = np.arange(psi.kmin, psi.kmax + 1)
        outer_idx = ks * m - f.kmin
        outer = np.where(
            (outer_idx >= 0) & (outer_idx < len(f.values)),
            f.values[np.clip(outer_idx, 0, len(f.values) - 1)],
            0.0,
        )
        us = ks.astype(float) * h
        integrand = outer * np.exp(2j * math.pi * v * us) * np.conj(psi.values)
        weights = np.ones_like(us)
        weights[0] = weights[-1] = 0.5
        return complex(scale**0.5 * h * np.sum(weights * integrand))
    ks = np.arange(f.kmin, f.kmax + 1)
    inner_idx = ks * m - psi.kmin
    inner = np.where(
        (inner_idx >= 0) & (inner_idx < len(psi.values)),
        psi.values[np.clip(inner_idx, 0, len(psi.values) - 1)],
        0.0,
    )
    xs = ks.astype(float) * h
    integrand = f.values * np.exp(2j * math.pi * (v / scale) * xs) * np.conj(inner)
    weights = np.ones_like(xs)
    weights[0] = weights[-1] = 0.5
    return complex(scale**-0.5 * h * np.sum(weights * integrand))


def frame_sum(f, wavelets, dilation: int, j_range, v_range) -> FrameSum:
    """Sum of |<f, D^j T^v psi_k>|^2 over the truncation box, plus the target.

    Both f and the wavelets must be IndicatorWavelet (closed-form path) or
    FrequencyGridFn on a shared step (quadrature path).  For a tight frame
    the ratio total/target climbs to 1 as the box grows; the sum is monotone
    in both ranges.
    """
    jmin, jmax = int(j_range[0]), int(j_range[1])
    vmin, vmax = int(v_range[0]), int(v_range[1])
    if jmin > jmax or vmin > vmax:
        raise ValueError("truncation ranges must be nonempty")
    wavelets = list(wavelets)
    if isinstance(f, IndicatorWavelet) and all(
        isinstance(p, IndicatorWavelet) for p in wavelets
    ):
        inner = _indicator_inner_product
        target = float(f.measure)
    elif isinstance(f, FrequencyGridFn) and all(
        isinstance(p, FrequencyGridFn) for p in wavelets
    ):
        inner = _grid_inner_product
        target = f.norm_squared()
    else:
        raise TypeError("mixed analyzed-function / wavelet representations")
    total = 0.0
    for psi in wavelets:
        for j in range(jmin, jmax + 1):
            for v in range(vmin, vmax + 1):
                total += abs(inner(f, psi, dilation, j, v)) ** 2
    return FrameSum(total, target)
