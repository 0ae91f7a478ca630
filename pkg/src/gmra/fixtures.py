"""Built-in worked examples.

The Journe family is the standard non-MRA orthonormal wavelet: its
multiplicity function takes the values 0, 1 and 2 on arcs with sevenths as
endpoints, the conjugate multiplicity is identically 1, and the filter bank
consists of indicator functions scaled by sqrt(2) (stored here divided by
sqrt(2), hence as 0/1 Fractions, which makes every check exact).  Haar and
Shannon are the usual dilation-2 classical families; Haar as trig
polynomials, Shannon as indicator filters.
"""

from __future__ import annotations

from fractions import Fraction

from .multiplicity import MultiplicityFunction, conjugate
from .msystem import GeneralizedFilterBank, MSystem, flatten
from .torus import Partition, PiecewiseFn, TorusSet
from .wavelet import (ClassicalMSystem, IndicatorWavelet, TrigPolynomial,
                      journe_wavelet)

F = Fraction


def _indicator(*intervals) -> PiecewiseFn:
    """0/1 Fraction-valued indicator of a union of rational arcs."""
    return TorusSet.from_intervals(intervals).indicator(one=F(1), zero=F(0))


def journe_multiplicity() -> MultiplicityFunction:
    sevenths = Partition.from_points(F(k, 7) for k in range(7))
    return MultiplicityFunction(
        PiecewiseFn(sevenths, (2, 1, 0, 1, 0, 1, 2)), dilation=2
    )


def journe_bank() -> GeneralizedFilterBank:
    """The generalized filter bank of the Journe wavelet (exact values)."""
    mf = journe_multiplicity()
    cm = conjugate(mf)
    zero = PiecewiseFn.constant(F(0))
    h11 = _indicator(
        (F(-2, 7), F(-1, 4)), (F(-1, 7), F(1, 7)), (F(1, 4), F(2, 7))
    )
    h21 = _indicator((F(-1, 2), F(-3, 7)), (F(3, 7), F(1, 2)))
    g11 = _indicator((F(-1, 4), F(-1, 7)), (F(1, 7), F(1, 4)))
    g12 = _indicator((F(-1, 7), F(1, 7)))
    return GeneralizedFilterBank(
        mf, cm,
        low=((h11, zero), (h21, zero)),
        high=((g11, g12),),
    )


def journe_msystem() -> MSystem:
    return flatten(journe_bank(), validate=False)


def constant_multiplicity(value: int = 1, dilation: int = 2) -> MultiplicityFunction:
    return MultiplicityFunction(PiecewiseFn.constant(int(value)), dilation)


def haar_msystem() -> ClassicalMSystem:
    """Haar filters for dilation 2, stored divided by sqrt(2):
    (1 + exp(-2 pi i x)) / 2 and (1 - exp(-2 pi i x)) / 2."""
    m0 = TrigPolynomial({0: F(1, 2), 1: F(1, 2)})
    m1 = TrigPolynomial({0: F(1, 2), 1: F(-1, 2)})
    return ClassicalMSystem(2, (m0, m1))


def shannon_msystem() -> ClassicalMSystem:
    """Shannon filters for dilation 2, stored divided by sqrt(2): indicators
    of [-1/4, 1/4) and its complement."""
    m0 = _indicator((F(-1, 4), F(1, 4)))
    m1 = _indicator((F(1, 4), F(3, 4)))
    return ClassicalMSystem(2, (m0, m1))


def shannon_wavelet() -> IndicatorWavelet:
    """Frequency support of the Shannon wavelet: [-1, -1/2) and [1/2, 1)."""
    return IndicatorWavelet(((F(-1), F(-1, 2)), (F(1, 2), F(1))))


def classical_as_msystem(system: ClassicalMSystem) -> MSystem:
    """Embed a classical family as an M-system over constant multiplicity 1."""
    mf = constant_multiplicity(1, system.dilation)
    cm = conjugate(mf)
    components = tuple((m,) for m in system.filters)
    return MSystem(mf, cm, components)
