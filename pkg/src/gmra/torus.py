"""Exact arithmetic for piecewise-constant functions on the circle [0, 1).

Breakpoints are rationals (`fractions.Fraction`), cells are the half-open
intervals between consecutive breakpoints, and a function's value at a
breakpoint is the value of the cell to its right.  Structural operations
(refinement, translation, dilation pullbacks) are exact; cell values may be
exact (ints, Fractions, object-dtype matrices) or floating point (complex
scalars, numpy arrays).  Everything here is immutable, so values can be
shared and evaluated concurrently.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator

import numpy as np

Rational = Fraction

_HALF = Fraction(1, 2)


def as_fraction(x) -> Fraction:
    """Coerce an int, Fraction or "p/q" string to an exact rational."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def reduce_mod_1(x) -> Fraction:
    """Exact reduction of a rational to its torus representative in [0, 1)."""
    x = as_fraction(x)
    return x - (x.numerator // x.denominator)


def centered(x) -> Fraction:
    """Representative of a torus point in [-1/2, 1/2)."""
    x = reduce_mod_1(x)
    return x - 1 if x >= _HALF else x


def branch_point(x, n: int, branch: int) -> Fraction:
    """The branch-th preimage of x under t -> n*t mod 1, as a point of [0, 1).

    Preimages are labelled 0..n-1 with branch 0 the one nearest 0: branch l
    sends x to (centered(x) + l) / n.  The labelling (not the preimage set)
    depends on this choice of fundamental domain.
    """
    if not 0 <= branch < n:
        raise ValueError(f"branch {branch} out of range for dilation {n}")
    return reduce_mod_1((centered(x) + branch) / n)


def branch_label(y, n: int) -> int:
    """Inverse of `branch_point`: the label of the preimage y."""
    y = reduce_mod_1(y)
    yhat = y - 1 if y >= 1 - Fraction(1, 2 * n) else y
    return math.floor(n * yhat + _HALF)


def value_kind(v):
    """Coarse type tag used to keep cell algebra honest."""
    if isinstance(v, np.ndarray):
        return ("array", v.shape)
    if isinstance(v, (int, Fraction, float, complex)):
        return ("scalar",)
    raise TypeError(f"unsupported cell value type: {type(v).__name__}")


def value_is_exact(v) -> bool:
    if isinstance(v, (int, Fraction)):
        return True
    if isinstance(v, np.ndarray) and v.dtype == object:
        return all(isinstance(e, (int, Fraction)) for e in v.flat)
    return False


def value_eq(a, b) -> bool:
    if value_kind(a) != value_kind(b):
        return False
    if isinstance(a, np.ndarray):
        return bool(np.array_equal(a, b))
    return a == b


def to_complex_value(v):
    if isinstance(v, np.ndarray):
        return np.asarray(v, dtype=complex)
    return complex(v)


def value_residual(a, b) -> float:
    """Max-abs difference between two cell values of matching kind."""
    ka, kb = value_kind(a), value_kind(b)
    if ka != kb:
        raise ValueError(f"cell value kinds differ: {ka} vs {kb}")
    ca, cb = to_complex_value(a), to_complex_value(b)
    if isinstance(ca, np.ndarray):
        if ca.size == 0:
            return 0.0
        return float(np.max(np.abs(ca - cb)))
    return abs(ca - cb)


def _check_zippable(a, b) -> None:
    ka, kb = value_kind(a), value_kind(b)
    if ka[0] == "array" and kb[0] == "array" and ka[1] != kb[1]:
        raise TypeError(f"cell value shapes differ: {ka[1]} vs {kb[1]}")


@dataclass(frozen=True)
class Partition:
    """Strictly increasing breakpoints in [0, 1), starting at 0."""

    breakpoints: tuple[Fraction, ...]

    def __post_init__(self):
        bps = self.breakpoints
        if not bps or bps[0] != 0:
            raise ValueError("partition must start at 0")
        for a, b in zip(bps, bps[1:]):
            if not a < b:
                raise ValueError("breakpoints must be strictly increasing")
        if bps[-1] >= 1:
            raise ValueError("breakpoints must lie in [0, 1)")

    @classmethod
    def from_points(cls, points: Iterable) -> "Partition":
        pts = {reduce_mod_1(p) for p in points}
        pts.add(Fraction(0))
        return cls(tuple(sorted(pts)))

    @property
    def ncells(self) -> int:
        return len(self.breakpoints)

    def cells(self) -> Iterator[tuple[Fraction, Fraction]]:
        bps = self.breakpoints
        for k, a in enumerate(bps):
            yield a, bps[k + 1] if k + 1 < len(bps) else Fraction(1)

    def cell_index(self, x) -> int:
        return bisect.bisect_right(self.breakpoints, reduce_mod_1(x)) - 1

    def refine(self, other: "Partition") -> "Partition":
        return Partition.from_points(self.breakpoints + other.breakpoints)


def common_refinement(*partitions: Partition) -> Partition:
    pts: list[Fraction] = []
    for p in partitions:
        pts.extend(p.breakpoints)
    return Partition.from_points(pts)


@dataclass(frozen=True, eq=False)
class PiecewiseFn:
    """A function on the circle, constant on each partition cell."""

    partition: Partition
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) != self.partition.ncells:
            raise ValueError("need exactly one value per cell")

    @classmethod
    def constant(cls, value) -> "PiecewiseFn":
        return cls(Partition((Fraction(0),)), (value,))

    def __call__(self, x):
        return self.values[self.partition.cell_index(x)]

    def cellwise(self) -> Iterator[tuple[Fraction, Fraction, object]]:
        for (a, b), v in zip(self.partition.cells(), self.values):
            yield a, b, v

    @property
    def is_exact(self) -> bool:
        return all(value_is_exact(v) for v in self.values)

    def map_values(self, fn: Callable) -> "PiecewiseFn":
        return PiecewiseFn(self.partition, tuple(fn(v) for v in self.values))

    def on_partition(self, partition: Partition) -> "PiecewiseFn":
        """Re-express on a partition refining the current one."""
        return PiecewiseFn(partition, tuple(self(a) for a in partition.breakpoints))

    def translate(self, t) -> "PiecewiseFn":
        """Pointwise shift: result(x) = self(x + t)."""
        t = as_fraction(t)
        part = Partition.from_points(b - t for b in self.partition.breakpoints)
        return PiecewiseFn(part, tuple(self(a + t) for a in part.breakpoints))

    def pullback_dilate(self, n: int) -> "PiecewiseFn":
        """Compose with the n-fold dilation: result(x) = self(n x mod 1)."""
        if n < 2:
            raise ValueError("dilation factor must be at least 2")
        part = Partition.from_points(
            (b + l) / n for b in self.partition.breakpoints for l in range(n)
        )
        return PiecewiseFn(part, tuple(self(n * a) for a in part.breakpoints))

    def pullback_branch(self, n: int, branch: int) -> "PiecewiseFn":
        """Compose with the branch-th preimage of the n-fold dilation.

        result(x) = self((centered(x) + branch) / n); see `branch_point` for
        the labelling convention.
        """
        lo = Fraction(2 * branch - 1, 2 * n)
        hi = Fraction(2 * branch + 1, 2 * n)
        pts = [Fraction(0), _HALF]
        for b in self.partition.breakpoints:
            k = math.ceil(lo - b)  # unique integer lift of b into [lo, hi)
            if b + k < hi:
                pts.append(n * (b + k) - branch)
        part = Partition.from_points(pts)
        values = tuple(self(branch_point(a, n, branch)) for a in part.breakpoints)
        return PiecewiseFn(part, values)

    def zip_with(self, other: "PiecewiseFn", op: Callable) -> "PiecewiseFn":
        part = self.partition.refine(other.partition)
        values = []
        for a in part.breakpoints:
            va, vb = self(a), other(a)
            _check_zippable(va, vb)
            values.append(op(va, vb))
        return PiecewiseFn(part, tuple(values))

    def simplify(self) -> "PiecewiseFn":
        """Merge adjacent cells carrying equal values."""
        bps: list[Fraction] = []
        vals: list = []
        for a, _b, v in self.cellwise():
            if vals and value_eq(vals[-1], v):
                continue
            bps.append(a)
            vals.append(v)
        return PiecewiseFn(Partition(tuple(bps)), tuple(vals))

    def integral(self):
        """Integral over one period; exact when the values are exact."""
        total = 0
        for a, b, v in self.cellwise():
            total = total + v * (b - a)
        return total

    def support(self) -> "TorusSet":
        """Where the (scalar) values are nonzero."""
        return TorusSet.where(self, lambda v: bool(v))


def zip_map(f: PiecewiseFn, g: PiecewiseFn, op: Callable) -> PiecewiseFn:
    return f.zip_with(g, op)


def pullback_dilate(f: PiecewiseFn, n: int) -> PiecewiseFn:
    return f.pullback_dilate(n)


def translate(f: PiecewiseFn, t) -> PiecewiseFn:
    return f.translate(t)


def equal(f: PiecewiseFn, g: PiecewiseFn) -> bool:
    """Exact pointwise equality, compared on the common refinement."""
    part = f.partition.refine(g.partition)
    return all(value_eq(f(a), g(a)) for a in part.breakpoints)


def max_difference(f: PiecewiseFn, g: PiecewiseFn) -> float:
    """Worst-cell max-abs difference (0.0 for identical functions)."""
    part = f.partition.refine(g.partition)
    return max(value_residual(f(a), g(a)) for a in part.breakpoints)


@dataclass(frozen=True)
class TorusSet:
    """Finite union of half-open arcs of the circle, sorted and disjoint.

    Arcs are stored inside [0, 1]; a set crossing the wrap point is split
    there, which makes the representation canonical and equality structural.
    """

    arcs: tuple[tuple[Fraction, Fraction], ...]

    @classmethod
    def from_intervals(cls, intervals: Iterable) -> "TorusSet":
        """Build from (a, b) pairs of rationals with a < b, read modulo 1.

        A pair of length >= 1 covers the whole circle.
        """
        raw: list[tuple[Fraction, Fraction]] = []
        for a, b in intervals:
            a, b = as_fraction(a), as_fraction(b)
            if b <= a:
                continue
            if b - a >= 1:
                return cls(((Fraction(0), Fraction(1)),))
            ra = reduce_mod_1(a)
            rb = ra + (b - a)
            if rb <= 1:
                raw.append((ra, rb))
            else:
                raw.append((ra, Fraction(1)))
                raw.append((Fraction(0), rb - 1))
        raw.sort()
        merged: list[list[Fraction]] = []
        for a, b in raw:
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        return cls(tuple((a, b) for a, b in merged))

    @classmethod
    def empty(cls) -> "TorusSet":
        return cls(())

    @classmethod
    def full(cls) -> "TorusSet":
        return cls(((Fraction(0), Fraction(1)),))

    @classmethod
    def where(cls, fn: PiecewiseFn, pred: Callable) -> "TorusSet":
        """The set of points whose cell value satisfies pred."""
        return cls.from_intervals(
            (a, b) for a, b, v in fn.cellwise() if pred(v)
        )

    def contains(self, x) -> bool:
        x = reduce_mod_1(x)
        return any(a <= x < b for a, b in self.arcs)

    @property
    def is_empty(self) -> bool:
        return not self.arcs

    @property
    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.arcs), Fraction(0))

    def indicator(self, one=1, zero=0) -> PiecewiseFn:
        part = Partition.from_points(p for arc in self.arcs for p in arc)
        return PiecewiseFn(
            part, tuple(one if self.contains(a) else zero for a in part.breakpoints)
        )

    def intersection(self, other: "TorusSet") -> "TorusSet":
        f = self.indicator().zip_with(other.indicator(), lambda u, v: u * v)
        return TorusSet.where(f, bool)

    def union(self, other: "TorusSet") -> "TorusSet":
        return TorusSet.from_intervals(self.arcs + other.arcs)

    def complement(self) -> "TorusSet":
        return TorusSet.where(self.indicator(), lambda v: not v)
