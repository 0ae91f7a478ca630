"""Sections of the unitary group bundle and their action on M-systems.

A loop element over a multiplicity function is a matrix-valued section of
the circle whose cell on the j-dimensional stratum is a j x j unitary, equal
to the identity on a neighborhood of the origin.  The group operates cell by
cell; it acts on M-systems by mixing the stacked filter rows at x with the
matrix at N x mod 1, and between any two M-systems over the same
multiplicity function there is exactly one connecting element, computed here
as a product of the two assembled matrix fields.

The classical single-level case is also served directly: pointwise
connecting matrices and the action formula for plain filter tuples, so
trig-polynomial systems can be handled on sampling grids.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .multiplicity import (ConjugateMultiplicity, MultiplicityFunction,
                           check_constant_near, dimension_field)
from .msystem import (MSystem, assemble_unitary, matrix_at, preimage_list,
                      row_filter_indices)
from .reporting import CheckItem, CheckReport, Failure, cell_str
from .torus import (PiecewiseFn, Partition, branch_point, common_refinement,
                    equal as pw_equal, reduce_mod_1, value_is_exact)


class DimensionProfileError(ValueError):
    """Operands live over different multiplicity functions."""


@dataclass(frozen=True, eq=False)
class LoopElement:
    """Unitary-matrix-valued section with the dimension profile of mu."""

    mf: MultiplicityFunction
    cm: ConjugateMultiplicity
    section: PiecewiseFn

    def __call__(self, x) -> np.ndarray:
        return self.section(x)

    @property
    def is_exact(self) -> bool:
        return all(value_is_exact(v) for v in self.section.values)


def identity_element(mf: MultiplicityFunction, cm: ConjugateMultiplicity,
                     exact: bool = True) -> LoopElement:
    dims = dimension_field(mf, cm)
    values = tuple(linalg.identity(v, exact=exact) for v in dims.values)
    return LoopElement(mf, cm, PiecewiseFn(dims.partition, values))


def _require_same_profile(a, b) -> None:
    same = a.mf is b.mf or (
        a.mf.dilation == b.mf.dilation and pw_equal(a.mf.fn, b.mf.fn)
    )
    if not same:
        raise DimensionProfileError("operands use different multiplicity functions")


def compose(k1: LoopElement, k2: LoopElement) -> LoopElement:
    """Pointwise matrix product (k1 after k2)."""
    _require_same_profile(k1, k2)
    section = k1.section.zip_with(k2.section, linalg.matmul)
    return LoopElement(k1.mf, k1.cm, section.simplify())


def inverse(k: LoopElement) -> LoopElement:
    """Cellwise conjugate transpose."""
    return LoopElement(k.mf, k.cm, k.section.map_values(linalg.conj_transpose))


def is_loop_element(k: LoopElement, tol: float = 1e-12, radius=None) -> CheckReport:
    """Dimension profile, cellwise unitarity, identity at (and near) 0."""
    report = CheckReport("loop-element")
    exact = k.is_exact

    dims_item = report.add(CheckItem("dimension-profile", passed=True, exact=True))
    dims = dimension_field(k.mf, k.cm)
    probe = k.section.zip_with(dims, lambda m, d: (m, d))
    for a, b, (m, d) in probe.cellwise():
        if m.shape != (d, d):
            dims_item.record_failure(
                Failure("dimension-profile", cell_str(a, b),
                        detail=f"matrix is {m.shape}, stratum dimension is {d}")
            )

    unit_item = report.add(CheckItem("unitarity", passed=True, exact=exact))
    for a, b, m in k.section.cellwise():
        if m.shape[0] != m.shape[1]:
            continue  # already reported above
        residual = linalg.unitarity_residual(m)
        unit_item.record_residual(residual)
        if residual > (0 if exact else tol):
            unit_item.record_failure(
                Failure("unitarity", cell_str(a, b), residual=residual)
            )

    origin_item = report.add(CheckItem("origin-identity", passed=True, exact=exact))
    m0 = k.section(0)
    if m0.shape[0] == m0.shape[1]:
        ident = linalg.identity(m0.shape[0], exact=linalg.is_exact_matrix(m0))
        residual = linalg.matrix_residual(m0, ident)
        origin_item.record_residual(residual)
        if residual > (0 if exact else tol):
            origin_item.record_failure(
                Failure("origin-identity", cell_str(Fraction(0), Fraction(0)),
                        residual=residual)
            )

    near_item = report.add(CheckItem("constant-near-origin", passed=True, exact=exact))
    part = k.section.partition
    if radius is None:
        bps = part.breakpoints
        first_width = bps[1] if len(bps) > 1 else Fraction(1)
        last_width = 1 - bps[-1] if len(bps) > 1 else Fraction(1)
        radius = min(first_width, last_width, Fraction(1, 2)) / 2
    samples = [reduce_mod_1(-radius)]
    samples += [b for b in part.breakpoints if reduce_mod_1(b + radius) < 2 * radius]
    for s in samples:
        m = k.section(s)
        if m.shape != m0.shape:
            near_item.record_failure(
                Failure("constant-near-origin", cell_str(s, s),
                        detail=f"matrix shape changes to {m.shape} near 0")
            )
            continue
        residual = linalg.matrix_residual(m, m0)
        near_item.record_residual(residual)
        if residual > (0 if exact else tol):
            near_item.record_failure(
                Failure("constant-near-origin", cell_str(s, s), residual=residual)
            )
    return report


def act(k: LoopElement, system: MSystem) -> MSystem:
    """Apply a loop element to an M-system.

    The new row i at x is the K(N x)-mix of the old rows at x, carried out
    per level component; rows beyond the local counts stay zero.
    """
    _require_same_profile(k, system)
    if not system.is_piecewise:
        raise TypeError("the cellwise action needs piecewise-constant components")
    mf, cm = system.mf, system.cm
    n = mf.dilation
    c, d = mf.bound, cm.bound

    k_up = k.section.pullback_dilate(n)
    mu_up = mf.fn.pullback_dilate(n)
    conj_up = cm.fn.pullback_dilate(n)
    parts = [k_up.partition, mu_up.partition, conj_up.partition]
    for row in system.components:
        for fn in row:
            parts.append(fn.partition)
    part = common_refinement(*parts)
    starts = part.breakpoints

    exact = system.is_exact and k.is_exact
    zero = Fraction(0) if exact else 0j
    new_values = [[[] for _ in range(c)] for _ in range(c + d)]
    for a in starts:
        m, mt = mu_up(a), conj_up(a)
        kmat = k_up(a)
        if kmat.shape != (m + mt, m + mt):
            raise DimensionProfileError(
                f"loop matrix at {a} is {kmat.shape}, expected {(m + mt, m + mt)}"
            )
        rows = list(range(m)) + [c + t for t in range(mt)]
        for j in range(c):
            old = [system.components[fi][j](a) for fi in rows]
            if old:
                vec = np.empty(len(old), dtype=object if exact else complex)
                vec[:] = old
                mixed = np.dot(kmat, vec)
            else:
                mixed = []
            for fi in range(c + d):
                if fi in rows:
                    new_values[fi][j].append(mixed[rows.index(fi)])
                else:
                    new_values[fi][j].append(zero)
    components = tuple(
        tuple(
            PiecewiseFn(part, tuple(new_values[fi][j])).simplify()
            for j in range(c)
        )
        for fi in range(c + d)
    )
    return MSystem(mf, cm, components)


def connecting_element(system: MSystem, target: MSystem,
                       tol: float = 1e-12) -> LoopElement:
    """The unique section carrying one M-system onto another.

    Cellwise it is target-field times the conjugate transpose of the source
    field, which realizes the transitivity of the action; when the two
    systems agree near the origin the result is the identity there and the
    section is a genuine loop element.
    """
    _require_same_profile(system, target)
    a_field = assemble_unitary(system, tol)
    b_field = assemble_unitary(target, tol)
    section = b_field.section.zip_with(
        a_field.section,
        lambda bm, am: linalg.matmul(bm, linalg.conj_transpose(am)),
    )
    return LoopElement(system.mf, system.cm, section.simplify())


def random_loop_element(mf: MultiplicityFunction, cm: ConjugateMultiplicity,
                        seed, origin_radius=None) -> LoopElement:
    """Seeded random section: Haar unitaries per stratum cell, identity on a
    neighborhood of the origin."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    dims = dimension_field(mf, cm)
    bps = dims.partition.breakpoints
    if origin_radius is None:
        first_width = bps[1] if len(bps) > 1 else Fraction(1)
        last_width = 1 - bps[-1] if len(bps) > 1 else Fraction(1)
        origin_radius = min(first_width, last_width, Fraction(1, 2)) / 2
    r = origin_radius
    part = common_refinement(
        dims.partition, Partition.from_points([r, 1 - r])
    )
    mats = []
    for a, b in part.cells():
        dim = dims(a)
        if b <= r or a >= 1 - r:
            mats.append(np.eye(dim, dtype=complex))
        else:
            mats.append(linalg.haar_unitary(rng, dim))
    return LoopElement(mf, cm, PiecewiseFn(part, tuple(mats)))


# ---------------------------------------------------------------------------
# pointwise forms, including the classical single-level case


def act_values_at(k, system: MSystem, x, level: int = 0) -> list:
    """All c+d component values of (k . system) at one point.

    `k` may be a LoopElement or any callable returning the matrix at a
    point, so sampled classical loop matrices work too.
    """
    mf, cm = system.mf, system.cm
    x = reduce_mod_1(x)
    nx = reduce_mod_1(mf.dilation * x)
    kmat = k(nx)
    rows = row_filter_indices(mf, cm, nx)
    old = [system.components[fi][level](x) for fi in rows]
    mixed = np.dot(np.asarray(kmat, dtype=complex), np.array(old, dtype=complex)) \
        if old else []
    out = [0j] * (mf.bound + cm.bound)
    for pos, fi in enumerate(rows):
        out[fi] = complex(mixed[pos])
    return out


def connecting_matrix_at(system: MSystem, target: MSystem, x) -> np.ndarray:
    """Pointwise connecting matrix, via the two assembled matrices at x."""
    a = matrix_at(system, x)
    b = matrix_at(target, x)
    return linalg.matmul(b, linalg.conj_transpose(a))


def classical_connecting_matrix(source_filters, target_filters, dilation: int,
                                x) -> np.ndarray:
    """Connecting matrix of two classical filter tuples at one point.

    Entry (i, j) sums target_i * conj(source_j) over the dilation preimages
    of x (filters stored divided by sqrt(N), which absorbs the 1/N factor).
    """
    if len(source_filters) != len(target_filters):
        raise DimensionProfileError("filter tuples differ in length")
    x = reduce_mod_1(x)
    points = [branch_point(x, dilation, l) for l in range(dilation)]
    size = len(source_filters)
    out = np.zeros((size, size), dtype=complex)
    for i in range(size):
        for j in range(size):
            out[i, j] = sum(
                complex(target_filters[i](p)) * complex(source_filters[j](p)).conjugate()
                for p in points
            )
    return out


def classical_action_at(matrix_fn, filters, dilation: int, x) -> np.ndarray:
    """The classical action formula at one point: matrix at N x applied to
    the filter value vector at x."""
    x = reduce_mod_1(x)
    kmat = np.asarray(matrix_fn(reduce_mod_1(dilation * x)), dtype=complex)
    vec = np.array([complex(m(x)) for m in filters], dtype=complex)
    return kmat @ vec
