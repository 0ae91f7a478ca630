"""Generalized filter banks, M-systems, and their unitary matrix fields.

A filter bank over a multiplicity function mu with dilation N consists of
low-pass components h[i][j] (i, j = 1..c) and high-pass components
g[k][j] (k = 1..d, j = 1..c), each supported on the j-th level set of mu.
Filter values are stored divided by sqrt(N), so the assembled matrix field
carries the stored numbers as entries and every orthogonality relation
becomes an identity between plain products; with Fraction-valued cells all
checks below run in exact arithmetic.

Flattening stacks the rows as M_1..М_c = h rows, M_{c+1}..M_{c+d} = g rows.
At a point x the stacked value vector lives in a space of dimension
mu(Nx) + conj_mu(Nx) once the forced zeros (rows beyond the local counts)
are discarded; the matrix collecting those vectors over the preimages of x
is unitary of size mu(x) + conj_mu(x), which is the content the checks in
this module verify.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .multiplicity import (ConjugateMultiplicity, MultiplicityFunction,
                           check_constant_near, dimension_field, level_sets)
from .reporting import CheckItem, CheckReport, Failure, cell_str
from .torus import (Partition, PiecewiseFn, branch_label, branch_point,
                    common_refinement, reduce_mod_1, value_is_exact)


class BankValidationError(ValueError):
    """A filter family failed one of its structural checks."""

    def __init__(self, report: CheckReport):
        self.report = report
        failed = [item.name for item in report.items if not item.passed]
        super().__init__(f"filter bank validation failed: {', '.join(failed)}")


class NotUnitaryError(ValueError):
    """A cell of the assembled matrix field is not unitary."""

    def __init__(self, cell, residual: float):
        self.cell = cell
        self.residual = residual
        super().__init__(
            f"matrix on [{cell[0]}, {cell[1]}) fails unitarity "
            f"(residual {residual:.3e})"
        )


class LowPassInfeasibleError(ValueError):
    """No bank over this multiplicity function can satisfy the low-pass
    normalization: it needs mu(0) - 1 <= conj_mu(0)."""


def _conj(v):
    return v.conjugate()


@dataclass(frozen=True, eq=False)
class GeneralizedFilterBank:
    """Low/high-pass filter components over a fixed multiplicity function.

    low[i][j] and high[k][j] are circle functions storing filter / sqrt(N).
    """

    mf: MultiplicityFunction
    cm: ConjugateMultiplicity
    low: tuple
    high: tuple

    def __post_init__(self):
        c, d = self.mf.bound, self.cm.bound
        object.__setattr__(self, "low", tuple(tuple(row) for row in self.low))
        object.__setattr__(self, "high", tuple(tuple(row) for row in self.high))
        if len(self.low) != c or any(len(row) != c for row in self.low):
            raise ValueError(f"low-pass array must be {c}x{c}")
        if len(self.high) != d or any(len(row) != c for row in self.high):
            raise ValueError(f"high-pass array must be {d}x{c}")

    @property
    def components(self) -> tuple:
        """All rows, low-pass first: the flattened M-system components."""
        return self.low + self.high

    @property
    def is_exact(self) -> bool:
        return all(
            fn.is_exact for row in self.components for fn in row
            if isinstance(fn, PiecewiseFn)
        )


@dataclass(frozen=True, eq=False)
class MSystem:
    """Flattened filter family: rows M_1..M_{c+d}, each with c components."""

    mf: MultiplicityFunction
    cm: ConjugateMultiplicity
    components: tuple

    def __post_init__(self):
        c, d = self.mf.bound, self.cm.bound
        object.__setattr__(
            self, "components", tuple(tuple(row) for row in self.components)
        )
        if len(self.components) != c + d:
            raise ValueError(f"expected {c + d} rows")
        if any(len(row) != c for row in self.components):
            raise ValueError(f"every row needs {c} components")

    @property
    def bank(self) -> GeneralizedFilterBank:
        c = self.mf.bound
        return GeneralizedFilterBank(
            self.mf, self.cm, self.components[:c], self.components[c:]
        )

    @property
    def is_piecewise(self) -> bool:
        return all(
            isinstance(fn, PiecewiseFn) for row in self.components for fn in row
        )

    @property
    def is_exact(self) -> bool:
        return self.is_piecewise and all(
            fn.is_exact for row in self.components for fn in row
        )


@dataclass(frozen=True)
class PreimageIndex:
    """The dilation preimages of a point, labelled (branch, level) and
    ordered lexicographically; positions enumerate the matrix columns."""

    x: Fraction
    dilation: int
    pairs: tuple[tuple[int, int], ...]

    @property
    def dimension(self) -> int:
        return len(self.pairs)

    def point(self, pair) -> Fraction:
        return branch_point(self.x, self.dilation, pair[0])

    def position(self, pair) -> int:
        return self.pairs.index(tuple(pair))


@dataclass(frozen=True, eq=False)
class UnitaryField:
    """Matrix-valued section whose cell on the j-dimensional stratum is j x j."""

    section: PiecewiseFn
    dimension: PiecewiseFn

    def __call__(self, x) -> np.ndarray:
        return self.section(x)


def preimage_list(mf: MultiplicityFunction, x) -> PreimageIndex:
    """All (branch, level) pairs at x; there are mu(x) + conj_mu(x) of them."""
    x = reduce_mod_1(x)
    n = mf.dilation
    pairs = []
    for l in range(n):
        depth = mf(branch_point(x, n, l))
        pairs.extend((l, j) for j in range(1, depth + 1))
    return PreimageIndex(x, n, tuple(pairs))


def flatten(bank: GeneralizedFilterBank, validate: bool = True,
            tol: float = 1e-12) -> MSystem:
    """View a filter bank as an M-system, optionally validating it first."""
    if validate:
        report = verify_bank(bank, tol=tol)
        if not report.passed:
            raise BankValidationError(report)
    return MSystem(bank.mf, bank.cm, bank.components)


def row_filter_indices(mf: MultiplicityFunction, cm: ConjugateMultiplicity,
                       x) -> list[int]:
    """Flattened component indices of the matrix rows at x: the first mu(x)
    low-pass rows, then the first conj_mu(x) high-pass rows (0-based)."""
    c = mf.bound
    mu_x = mf(x)
    conj_x = cm(x)
    return list(range(mu_x)) + [c + k for k in range(conj_x)]


def matrix_at(system: MSystem, x) -> np.ndarray:
    """The matrix of the unitary field at one point.

    Works for any components that evaluate at exact rationals, so classical
    trig-polynomial filters can be probed pointwise as well.
    """
    x = reduce_mod_1(x)
    idx = preimage_list(system.mf, x)
    rows = row_filter_indices(system.mf, system.cm, x)
    if len(rows) != idx.dimension:
        raise ValueError(
            f"dimension mismatch at {x}: {len(rows)} rows vs "
            f"{idx.dimension} preimages"
        )
    entries = [
        [system.components[fi][j - 1](idx.point((l, j))) for (l, j) in idx.pairs]
        for fi in rows
    ]
    flat = [v for row in entries for v in row]
    if flat and all(isinstance(v, (int, Fraction)) for v in flat):
        return linalg.exact_matrix(entries)
    return np.array(
        [[complex(v) for v in row] for row in entries], dtype=complex
    ).reshape(len(rows), idx.dimension)


def assembly_partition(system: MSystem) -> Partition:
    """Partition on which the assembled matrix field is cellwise constant."""
    if not system.is_piecewise:
        raise TypeError("cellwise assembly needs piecewise-constant components")
    n = system.mf.dilation
    parts = []
    for l in range(n):
        parts.append(system.mf.fn.pullback_branch(n, l).partition)
        for row in system.components:
            for fn in row:
                parts.append(fn.pullback_branch(n, l).partition)
    parts.append(system.mf.fn.partition)
    parts.append(system.cm.fn.partition)
    return common_refinement(*parts)


def assemble_unitary(system: MSystem, tol: float = 1e-12) -> UnitaryField:
    """Assemble the matrix field of an M-system and certify its unitarity.

    Raises NotUnitaryError (with the offending cell and its Gram residual)
    when some cell fails, which signals the input is not a genuine M-system.
    """
    part = assembly_partition(system)
    cells = list(part.cells())
    mats = [matrix_at(system, a) for a, _b in cells]
    dims = tuple(m.shape[0] for m in mats)
    for (a, b), m in zip(cells, mats):
        residual = linalg.unitarity_residual(m)
        if residual > tol:
            raise NotUnitaryError((a, b), residual)
    field = PiecewiseFn(part, tuple(mats)).simplify()
    dims_fn = PiecewiseFn(part, dims).simplify()
    return UnitaryField(field, dims_fn)


def _branch_tables(system: MSystem, extra_parts=()) -> tuple[Partition, dict]:
    """Common partition plus per-(row, component, branch) value tables."""
    n = system.mf.dilation
    branched = {}
    parts = list(extra_parts)
    parts.append(system.mf.fn.partition)
    for l in range(n):
        branched[("mu", l)] = system.mf.fn.pullback_branch(n, l)
        parts.append(branched[("mu", l)].partition)
        for fi, row in enumerate(system.components):
            for j, fn in enumerate(row):
                key = (fi, j, l)
                branched[key] = fn.pullback_branch(n, l)
                parts.append(branched[key].partition)
    part = common_refinement(*parts)
    tables = {
        key: fn.on_partition(part).values for key, fn in branched.items()
    }
    return part, tables


def verify_orthogonality(bank: GeneralizedFilterBank, tol: float = 1e-12) -> CheckReport:
    """Check the three filter orthogonality relations cell by cell.

    In stored (sqrt(N)-normalized) units they read, per cell of the common
    refinement with branch values summed over levels j and branches l:

        sum h[i] conj(h[k]) = delta(i, k) * [x in level set i]
        sum g[k] conj(g[k']) = delta(k, k') * [x in conjugate level set k]
        sum h[i] conj(g[k]) = 0
    """
    system = MSystem(bank.mf, bank.cm, bank.components)
    mf, cm = bank.mf, bank.cm
    c, d = mf.bound, cm.bound
    exact = bank.is_exact
    part, tables = _branch_tables(system, extra_parts=(cm.fn.partition,))
    n = mf.dilation

    report = CheckReport("orthogonality")
    low_item = report.add(CheckItem("low-pass-products", passed=True, exact=exact))
    high_item = report.add(CheckItem("high-pass-products", passed=True, exact=exact))
    cross_item = report.add(CheckItem("cross-products", passed=True, exact=exact))

    cells = list(part.cells())
    for ci, (a, b) in enumerate(cells):
        mu_here = mf(a)
        conj_here = cm(a)

        def pair_sum(fi, fk):
            total = 0
            for j in range(c):
                for l in range(n):
                    u = tables[(fi, j, l)][ci]
                    v = tables[(fk, j, l)][ci]
                    total = total + u * _conj(v)
            return total

        for i in range(c):
            for k in range(i, c):
                got = pair_sum(i, k)
                want = 1 if (i == k and mu_here >= i + 1) else 0
                _record(low_item, f"low[{i + 1},{k + 1}]", got, want,
                        (a, b), exact, tol)
        for k in range(d):
            for k2 in range(k, d):
                got = pair_sum(c + k, c + k2)
                want = 1 if (k == k2 and conj_here >= k + 1) else 0
                _record(high_item, f"high[{k + 1},{k2 + 1}]", got, want,
                        (a, b), exact, tol)
        for i in range(c):
            for k in range(d):
                got = pair_sum(i, c + k)
                _record(cross_item, f"cross[{i + 1},{k + 1}]", got, 0,
                        (a, b), exact, tol)
    return report


def _record(item: CheckItem, label: str, got, want, cell, exact: bool,
            tol: float) -> None:
    if exact:
        if got != want:
            item.record_failure(
                Failure(item.name, cell_str(*cell),
                        detail=f"{label}: {got} != {want}")
            )
    else:
        residual = abs(complex(got) - complex(want))
        item.record_residual(residual)
        if residual > tol:
            item.record_failure(
                Failure(item.name, cell_str(*cell),
                        detail=f"{label}", residual=residual)
            )


def verify_support(bank: GeneralizedFilterBank) -> CheckReport:
    """Components must vanish outside their level set."""
    report = CheckReport("support")
    item = report.add(CheckItem("support", passed=True, exact=True))
    mf = bank.mf
    for fi, row in enumerate(bank.components):
        for j, fn in enumerate(row):
            if not isinstance(fn, PiecewiseFn):
                continue
            check = fn.zip_with(mf.fn, lambda v, m, j=j: (v, m))
            for a, b, (v, m) in check.cellwise():
                if m < j + 1 and v != 0:
                    item.record_failure(
                        Failure("support", cell_str(a, b),
                                detail=f"component[{fi + 1}][{j + 1}] nonzero "
                                       f"outside its level set")
                    )
    return report


def verify_forced_zeros(system: MSystem, tol: float = 1e-12) -> CheckReport:
    """Rows beyond the local counts must vanish: component i of the stack is
    zero wherever i > mu(Nx) (low rows) or i - c > conj_mu(Nx) (high rows)."""
    report = CheckReport("forced-zeros")
    item = report.add(CheckItem("forced-zeros", passed=True,
                                exact=system.is_exact))
    mf, cm = system.mf, system.cm
    c = mf.bound
    mu_up = mf.fn.pullback_dilate(mf.dilation)
    conj_up = cm.fn.pullback_dilate(mf.dilation)
    for fi, row in enumerate(system.components):
        for j, fn in enumerate(row):
            if not isinstance(fn, PiecewiseFn):
                continue
            gate = mu_up if fi < c else conj_up
            rank = fi + 1 if fi < c else fi - c + 1
            check = fn.zip_with(gate, lambda v, m: (v, m))
            for a, b, (v, m) in check.cellwise():
                if rank > m:
                    residual = abs(complex(v))
                    if residual > (0 if system.is_exact else tol):
                        item.record_failure(
                            Failure("forced-zeros", cell_str(a, b),
                                    detail=f"row {fi + 1} must vanish where "
                                           f"its rank exceeds {m}",
                                    residual=residual)
                        )
    return report


def verify_low_pass(bank: GeneralizedFilterBank, radius=None,
                    tol: float = 1e-12) -> CheckReport:
    """Normalization at the origin plus constancy of every component near 0.

    In stored units the requirement is low[1][1](0) = 1 with every other
    component vanishing at 0 except the high-pass values on deeper levels,
    which the orthogonality relations leave free.
    """
    report = CheckReport("low-pass")
    exact = bank.is_exact
    origin = report.add(CheckItem("origin-normalization", passed=True, exact=exact))
    c = bank.mf.bound
    for i in range(c):
        for j in range(c):
            fn = bank.low[i][j]
            want = 1 if (i == 0 and j == 0) else 0
            got = fn(0) if isinstance(fn, PiecewiseFn) else fn(Fraction(0))
            _record(origin, f"low[{i + 1}][{j + 1}](0)", got, want,
                    (Fraction(0), Fraction(0)), exact, tol)
    for k in range(bank.cm.bound):
        fn = bank.high[k][0]
        got = fn(0) if isinstance(fn, PiecewiseFn) else fn(Fraction(0))
        _record(origin, f"high[{k + 1}][1](0)", got, 0,
                (Fraction(0), Fraction(0)), exact, tol)

    smooth = report.add(CheckItem("constant-near-origin", passed=True, exact=True))
    for fi, row in enumerate(bank.components):
        for j, fn in enumerate(row):
            if not isinstance(fn, PiecewiseFn):
                continue
            sub = check_constant_near(fn, [Fraction(0)], radius)
            if not sub.passed:
                for it in sub.items:
                    for f in it.failures:
                        f.detail = f"component[{fi + 1}][{j + 1}]: {f.detail}"
                        smooth.record_failure(f)
    return report


def verify_column_orthogonality(system: MSystem, tol: float = 1e-12) -> CheckReport:
    """Column sums of the stacked filters over all c+d rows.

    For preimage pairs p = (l, j), p' = (l', j') of a point, the sum over
    every row of value(p) * conj(value(p')) must be delta(p, p'); pairs with
    a level index beyond the local multiplicity must sum to zero.
    """
    report = CheckReport("column-orthogonality")
    exact = system.is_exact
    item = report.add(CheckItem("column-sums", passed=True, exact=exact))
    mf, cm = system.mf, system.cm
    c = mf.bound
    n = mf.dilation
    part, tables = _branch_tables(system, extra_parts=(cm.fn.partition,))
    rows = len(system.components)
    cells = list(part.cells())
    for ci, (a, b) in enumerate(cells):
        depths = [tables[("mu", l)][ci] for l in range(n)]
        pairs = [(l, j) for l in range(n) for j in range(1, c + 1)]
        for pi, (l, j) in enumerate(pairs):
            for (l2, j2) in pairs[pi:]:
                total = 0
                for fi in range(rows):
                    u = tables[(fi, j - 1, l)][ci]
                    v = tables[(fi, j2 - 1, l2)][ci]
                    total = total + u * _conj(v)
                valid = j <= depths[l] and j2 <= depths[l2]
                want = 1 if (valid and (l, j) == (l2, j2)) else 0
                _record(item, f"col[({l},{j}),({l2},{j2})]", total, want,
                        (a, b), exact, tol)
    return report


def verify_bank(bank: GeneralizedFilterBank, radius=None,
                tol: float = 1e-12) -> CheckReport:
    """Full structural verification of a filter bank."""
    report = CheckReport("filter-bank")
    report.items.extend(verify_support(bank).items)
    report.items.extend(verify_orthogonality(bank, tol).items)
    report.items.extend(verify_low_pass(bank, radius, tol).items)
    system = MSystem(bank.mf, bank.cm, bank.components)
    report.items.extend(verify_forced_zeros(system, tol).items)
    report.items.extend(verify_column_orthogonality(system, tol).items)
    return report


def canonical_origin_matrix(mf: MultiplicityFunction, cm: ConjugateMultiplicity,
                            exact: bool = False) -> np.ndarray:
    """The permutation every generated bank carries near the origin.

    Row 1 maps to the origin column; the remaining low-pass rows are parked
    on the first columns contributed by the other branches, so their values
    at 0 vanish as the low-pass normalization requires; high-pass rows fill
    the leftover columns in order.  Infeasible when mu(0) - 1 > conj_mu(0).
    """
    mu0 = mf(0)
    dim = preimage_list(mf, 0).dimension
    conj0 = dim - mu0
    if mu0 - 1 > conj0:
        raise LowPassInfeasibleError(
            f"mu(0)={mu0} needs at least {mu0 - 1} conjugate characters at 0, "
            f"got {conj0}"
        )
    columns = {0: 0}
    for i in range(1, mu0):
        columns[i] = mu0 + i - 1
    used = set(columns.values())
    free = [c for c in range(dim) if c not in used]
    for k, col in enumerate(free):
        columns[mu0 + k] = col
    if exact:
        mat = linalg.exact_matrix([[0] * dim for _ in range(dim)])
        for row, col in columns.items():
            mat[row, col] = Fraction(1)
    else:
        mat = np.zeros((dim, dim), dtype=complex)
        for row, col in columns.items():
            mat[row, col] = 1.0
    return mat


def bank_from_field(mf: MultiplicityFunction, cm: ConjugateMultiplicity,
                    field: PiecewiseFn) -> GeneralizedFilterBank:
    """Read filter components off a matrix-valued section.

    Inverts the assembly: the value of component (row, level) at y is the
    entry of the matrix at N y mod 1 in the row's position and the column
    labelled by y's (branch, level) pair.
    """
    n = mf.dilation
    c, d = mf.bound, cm.bound
    part = common_refinement(
        field.pullback_dilate(n).partition, mf.fn.partition, cm.fn.partition
    )
    starts = part.breakpoints
    columns = []
    for y in starts:
        x = reduce_mod_1(n * y)
        idx = preimage_list(mf, x)
        columns.append((x, branch_label(y, n), idx))

    low = []
    high = []
    for fi in range(c + d):
        per_level = []
        for j in range(1, c + 1):
            cell_values = []
            for y, (x, l, idx) in zip(starts, columns):
                depth = mf(y)
                if j > depth:
                    cell_values.append(_zero_like(field))
                    continue
                rows = row_filter_indices(mf, cm, x)
                if fi not in rows:
                    cell_values.append(_zero_like(field))
                    continue
                mat = field(x)
                cell_values.append(mat[rows.index(fi), idx.position((l, j))])
            per_level.append(PiecewiseFn(part, tuple(cell_values)).simplify())
        if fi < c:
            low.append(tuple(per_level))
        else:
            high.append(tuple(per_level))
    return GeneralizedFilterBank(mf, cm, tuple(low), tuple(high))


def _zero_like(field: PiecewiseFn):
    exact = all(value_is_exact(v) for v in field.values)
    return Fraction(0) if exact else 0j


def field_partition(mf: MultiplicityFunction) -> Partition:
    """Partition on which branch depths (hence matrix shapes) are constant."""
    n = mf.dilation
    return common_refinement(
        *(mf.fn.pullback_branch(n, l).partition for l in range(n))
    )


def generate_random_bank(mf: MultiplicityFunction, cm: ConjugateMultiplicity,
                         seed) -> GeneralizedFilterBank:
    """Seeded random bank: Haar-random unitaries per stratum cell, with the
    canonical origin permutation forced on the cells touching 0 so the
    low-pass normalization holds by construction."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    part = field_partition(mf)
    cells = list(part.cells())
    origin_mat = canonical_origin_matrix(mf, cm)
    mats = []
    for k, (a, b) in enumerate(cells):
        dim = preimage_list(mf, a).dimension
        if k == 0 or k == len(cells) - 1:
            if dim != origin_mat.shape[0]:
                raise LowPassInfeasibleError(
                    "multiplicity is not constant near the origin"
                )
            mats.append(origin_mat)
        else:
            mats.append(linalg.haar_unitary(rng, dim))
    field = PiecewiseFn(part, tuple(mats))
    return bank_from_field(mf, cm, field)
