import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arealaw import perm_core as pc
from arealaw.freepoisson import (FreePoissonLaw, fp_entropy, fp_entropy_quad, fp_moment, fp_moment_quad,
                                 narayana, nc_partition_counts)


def test_catalan_at_unit_rate():
    assert [fp_moment(1, n) for n in range(8)] == [1, 1, 2, 5, 14, 42, 132, 429]


def test_small_moments_polynomials():
    c = Fraction(3, 2)
    assert fp_moment(c, 1) == c
    assert fp_moment(c, 2) == c + c ** 2
    assert fp_moment(c, 3) == c + 3 * c ** 2 + c ** 3


@pytest.mark.parametrize("n", range(1, 11))
def test_narayana_oracle(n):
    assert nc_partition_counts(n) == tuple([0] + [narayana(n, k) for k in range(1, n + 1)])


@pytest.mark.parametrize("n", range(1, 8))
def test_noncrossing_enumeration_oracle(n):
    # blocks of a non-crossing partition are the cycles of its geodesic permutation
    counts = Counter(p.cycle_count() for p in pc.enumerate_noncrossing(n))
    assert nc_partition_counts(n) == tuple(counts.get(j, 0) for j in range(n + 1))


@pytest.mark.parametrize("c", [0.25, 0.5, 1.0, 2.0, 4.5])
def test_quadrature_moments(c):
    for n in range(0, 6):
        assert fp_moment_quad(c, n) == pytest.approx(fp_moment(c, n), rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("c", [0.3, 1.0, 3.0])
def test_mass_and_support(c):
    law = FreePoissonLaw(c)
    assert law.mass() == pytest.approx(1.0, abs=1e-12)
    lo, hi = law.support
    assert law.density(lo - 1e-9) == 0 and law.density(hi + 1e-9) == 0
    assert law.density((lo + hi) / 2) > 0


def test_entropy_examples():
    assert fp_entropy(1.0) == -0.5
    assert fp_entropy(0.5) == -0.125
    assert fp_entropy(2.0) == pytest.approx(-0.5 - 2 * math.log(2))


@given(st.floats(min_value=0.05, max_value=6.0))
def test_entropy_quadrature(c):
    assert fp_entropy_quad(c) == pytest.approx(fp_entropy(c), abs=1e-9)


def test_invalid_arguments():
    with pytest.raises(ValueError):
        fp_moment(0, 2)
    with pytest.raises(ValueError):
        fp_moment(1, 13)
    with pytest.raises(ValueError):
        FreePoissonLaw(-1.0)
    with pytest.raises(ValueError):
        fp_entropy(0.0)
