"""Multiplicity-function calculus.

A multiplicity function assigns to each circle point a nonnegative number
of translation characters; its conjugate counts the extra characters
supplied by the remaining dilation preimages.  Both are held exactly as
integer-valued piecewise-constant functions, so the consistency identity

    mu(x) + conj_mu(x) = sum over branches l of mu((x + l) / N)

is checked cell by cell in integer arithmetic.  The level sets of the two
functions index the supports of every filter downstream, and their pointwise
sum gives the dimension profile of the unitary bundle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .reporting import CheckItem, CheckReport, Failure, cell_str
from .torus import (Partition, PiecewiseFn, TorusSet, as_fraction,
                    equal as pw_equal, reduce_mod_1, value_eq)


class NegativeConjugateError(ValueError):
    """The branch sum falls short of mu somewhere, so no conjugate exists."""

    def __init__(self, cell, mu_value: int, branch_total: int):
        self.cell = cell
        self.mu_value = mu_value
        self.branch_total = branch_total
        super().__init__(
            f"mu={mu_value} exceeds its branch sum {branch_total} "
            f"on [{cell[0]}, {cell[1]})"
        )


@dataclass(frozen=True, eq=False)
class MultiplicityFunction:
    """Nonnegative-integer piecewise function plus its dilation factor."""

    fn: PiecewiseFn
    dilation: int

    def __post_init__(self):
        if self.dilation < 2:
            raise ValueError("dilation must be an integer >= 2")
        for _a, _b, v in self.fn.cellwise():
            if not isinstance(v, int) or v < 0:
                raise ValueError("multiplicity values must be nonnegative ints")
        if self.bound < 1:
            raise ValueError("a multiplicity function cannot vanish identically")

    def __call__(self, x) -> int:
        return self.fn(x)

    @property
    def bound(self) -> int:
        """Essential supremum (the count of level sets)."""
        return max(self.fn.values)


@dataclass(frozen=True, eq=False)
class ConjugateMultiplicity:
    """The complementary character count, one value per cell."""

    fn: PiecewiseFn

    def __call__(self, x) -> int:
        return self.fn(x)

    @property
    def bound(self) -> int:
        return max(self.fn.values)


@dataclass(frozen=True, eq=False)
class LevelSets:
    """Nested supports: level k of `upper` is where mu >= k, same for conj."""

    upper: tuple[TorusSet, ...]
    conj: tuple[TorusSet, ...]


@dataclass(frozen=True, eq=False)
class IndexPartitions:
    """The dimension-indexed decompositions of the circle.

    matrix_level[j]  : points where mu + conj_mu == j (matrix cells are j x j)
    fiber_level[j]   : points where the value-vector dimension mu(Nx) + conj_mu(Nx) == j
    support_level[(i, j)] : level set i intersected with fiber_level[j]
    """

    matrix_level: dict[int, TorusSet]
    fiber_level: dict[int, TorusSet]
    support_level: dict[tuple[int, int], TorusSet]


def branch_sum(mf: MultiplicityFunction) -> PiecewiseFn:
    """Sum of mu over all dilation preimages, cell-exactly."""
    n = mf.dilation
    branches = [mf.fn.pullback_branch(n, l) for l in range(n)]
    return reduce(lambda f, g: f.zip_with(g, lambda u, v: u + v), branches)


def conjugate(mf: MultiplicityFunction) -> ConjugateMultiplicity:
    """The conjugate multiplicity; raises if the consistency inequality fails."""
    diff = branch_sum(mf).zip_with(mf.fn, lambda s, m: s - m)
    for a, b, v in diff.cellwise():
        if v < 0:
            raise NegativeConjugateError((a, b), mf(a), mf(a) + v)
    return ConjugateMultiplicity(diff.simplify())


def check_consistency(mf: MultiplicityFunction) -> CheckReport:
    """Verdict for mu(x) <= sum of mu over the dilation preimages of x."""
    report = CheckReport("consistency")
    item = report.add(CheckItem("consistency-inequality", passed=True, exact=True))
    total = branch_sum(mf)
    part = total.partition.refine(mf.fn.partition)
    for (a, b) in part.cells():
        if mf(a) > total(a):
            item.record_failure(
                Failure(
                    "consistency-inequality",
                    cell_str(a, b),
                    detail=f"mu={mf(a)} > branch sum {total(a)}",
                )
            )
    return report


def level_sets(mf: MultiplicityFunction, cm: ConjugateMultiplicity) -> LevelSets:
    upper = tuple(
        TorusSet.where(mf.fn, lambda v, i=i: v >= i) for i in range(1, mf.bound + 1)
    )
    conj = tuple(
        TorusSet.where(cm.fn, lambda v, k=k: v >= k) for k in range(1, cm.bound + 1)
    )
    return LevelSets(upper, conj)


def dimension_field(mf: MultiplicityFunction, cm: ConjugateMultiplicity) -> PiecewiseFn:
    """mu + conj_mu: matrix dimension at x, also the number of preimages of x."""
    return mf.fn.zip_with(cm.fn, lambda u, v: u + v).simplify()


def fiber_dimension_field(
    mf: MultiplicityFunction, cm: ConjugateMultiplicity
) -> PiecewiseFn:
    """Dimension of the filter value vector at x: (mu + conj_mu)(N x mod 1)."""
    return dimension_field(mf, cm).pullback_dilate(mf.dilation)


def index_partitions(
    mf: MultiplicityFunction, cm: ConjugateMultiplicity
) -> IndexPartitions:
    dims = dimension_field(mf, cm)
    fiber = dims.pullback_dilate(mf.dilation)
    top = mf.bound + cm.bound
    matrix_level = {
        j: TorusSet.where(dims, lambda v, j=j: v == j) for j in range(top + 1)
    }
    fiber_level = {
        j: TorusSet.where(fiber, lambda v, j=j: v == j) for j in range(top + 1)
    }
    levels = level_sets(mf, cm)
    support_level = {
        (i, j): levels.upper[i - 1].intersection(fiber_level[j])
        for i in range(1, mf.bound + 1)
        for j in range(top + 1)
    }
    return IndexPartitions(matrix_level, fiber_level, support_level)


def default_radius(fn: PiecewiseFn, point) -> Fraction:
    """Half the width of the narrowest cell touching the point."""
    part = fn.partition
    x = reduce_mod_1(point)
    widths = []
    cells = list(part.cells())
    idx = part.cell_index(x)
    a, b = cells[idx]
    widths.append(b - a)
    if x == a:  # at a breakpoint the left neighbour matters too
        la, lb = cells[idx - 1]
        widths.append((lb - la) if idx > 0 else (1 - la))
    return min(widths) / 2


def check_constant_near(
    fn: PiecewiseFn, points, radius=None, *, name: str = "constant-near"
) -> CheckReport:
    """Pass iff fn is constant on the open ball of the given radius around
    each point (modulo 1).  Default radius: half the narrowest adjacent cell.
    """
    report = CheckReport(name)
    for p in points:
        p = reduce_mod_1(p)
        r = as_fraction(radius) if radius is not None else default_radius(fn, p)
        if r <= 0:
            raise ValueError("radius must be positive")
        item = report.add(CheckItem(f"constant-near-{p}", passed=True, exact=True))
        if 2 * r >= 1:
            samples = list(fn.partition.breakpoints)
        else:
            start = p - r
            samples = [reduce_mod_1(start)]
            for b in fn.partition.breakpoints:
                offset = reduce_mod_1(b - start)
                if 0 < offset < 2 * r:
                    samples.append(b)
        values = [fn(s) for s in samples]
        first = values[0]
        for s, v in zip(samples, values):
            if not value_eq(v, first):
                cells = list(fn.partition.cells())
                a, b = cells[fn.partition.cell_index(s)]
                item.record_failure(
                    Failure(
                        "constant-neighborhood",
                        cell_str(a, b),
                        detail=f"value {v!r} differs from {first!r} near {p}",
                    )
                )
                break
    return report


def validate_multiplicity(mf: MultiplicityFunction, radius=None) -> CheckReport:
    """Everything required of a usable multiplicity function: the consistency
    inequality, a character at the origin, and constancy near every l/N.
    """
    report = CheckReport("multiplicity")
    report.items.extend(check_consistency(mf).items)

    origin = report.add(CheckItem("origin-multiplicity", passed=True, exact=True))
    if mf(0) < 1:
        origin.record_failure(
            Failure("origin-multiplicity", cell_str(Fraction(0), Fraction(0)),
                    detail="mu(0) must be at least 1")
        )

    points = [Fraction(l, mf.dilation) for l in range(mf.dilation)]
    near = check_constant_near(mf.fn, points, radius, name="constant-near-branches")
    report.items.extend(near.items)
    return report


def random_multiplicity(
    seed,
    dilation: int | None = None,
    *,
    max_value: int = 3,
    max_cells: int = 12,
    denominators=(5, 6, 7, 8, 9, 11),
) -> MultiplicityFunction:
    """Seeded generator of valid multiplicity functions for property suites.

    Draws a random integer-valued step function, then shrinks it to the
    largest pointwise-smaller function satisfying the consistency inequality;
    rejects draws that lose the origin character, constancy near the branch
    points, or the feasibility margin for the low-pass normalization
    (mu(0) - 1 <= conj_mu(0)).
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    for _attempt in range(1000):
        n = int(dilation) if dilation is not None else int(rng.choice((2, 3)))
        q = int(rng.choice(denominators))
        candidates = [
            Fraction(k, q)
            for k in range(1, q)
            if all(Fraction(k, q) != Fraction(l, n) for l in range(n))
        ]
        rng.shuffle(candidates)
        count = int(rng.integers(1, min(max_cells - 1, len(candidates)) + 1))
        part = Partition.from_points(candidates[:count])
        values = [int(v) for v in rng.integers(0, max_value + 1, part.ncells)]
        values[0] = max(1, values[0])
        values[-1] = values[0]
        fn = PiecewiseFn(part, tuple(values))

        try:
            mf = MultiplicityFunction(fn, n)
        except ValueError:
            continue
        # shrink to consistency: mu <- min(mu, branch sum) until stable
        for _round in range(64):
            total = branch_sum(mf)
            shrunk = mf.fn.zip_with(total, lambda m, s: min(m, s)).simplify()
            if pw_equal(shrunk, mf.fn):
                break
            try:
                mf = MultiplicityFunction(shrunk, n)
            except ValueError:
                mf = None
                break
        if mf is None or mf.fn.partition.ncells > max_cells:
            continue
        if not validate_multiplicity(mf).passed:
            continue
        cm = conjugate(mf)
        if mf(0) - 1 > cm(0):
            continue
        return mf
    raise RuntimeError("could not draw a valid multiplicity function")
