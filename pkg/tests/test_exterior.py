import itertools

import pytest

from grs.errors import DegreeError, DimensionError, SingularMetricError, VarianceError
from grs.exterior import (
    CONTRA,
    COV,
    Chart,
    MetricSpec,
    form,
    hodge,
    interior,
    metric_pairing,
    multivector,
    musical_tilde,
    sort_sign,
    volume_form,
    wedge,
)
from grs.scalar import as_expr, coord, sin


@pytest.fixture
def mink():
    return Chart(("x", "y", "z", "xi"), MetricSpec.diagonal([-1, -1, -1, 1]))


@pytest.fixture
def r3():
    return Chart(("x", "y", "z"), MetricSpec.diagonal([1, 1, 1]))


def test_sort_sign():
    assert sort_sign((0, 1)) == ((0, 1), 1)
    assert sort_sign((1, 0)) == ((0, 1), -1)
    assert sort_sign((2, 0, 1)) == ((0, 1, 2), 1)
    assert sort_sign((1, 1)) is None


def test_chart_validation():
    with pytest.raises(DimensionError):
        Chart(("x", "x"), MetricSpec.diagonal([1, 1]))


def test_wedge_anticommutes(r3):
    a = form(r3, 1, {(0,): 2.0})
    b = form(r3, 1, {(1,): 3.0})
    ab = wedge(a, b)
    ba = wedge(b, a)
    assert ab.get((0, 1)) == 6.0
    assert ba.get((0, 1)) == -6.0


def test_wedge_squares_to_zero(r3):
    a = form(r3, 1, {(0,): 1.0, (1,): 2.0})
    sq = wedge(a, a)
    assert not sq.components


def test_wedge_associative(mink):
    a = form(mink, 1, {(0,): 1.0, (2,): 2.0})
    b = form(mink, 1, {(1,): 3.0})
    c = form(mink, 2, {(2, 3): 1.0})
    left = wedge(wedge(a, b), c)
    right = wedge(a, wedge(b, c))
    assert left.components == right.components


def test_wedge_variance_mismatch(r3):
    a = form(r3, 1, {(0,): 1.0})
    v = multivector(r3, 1, {(0,): 1.0})
    with pytest.raises(VarianceError):
        wedge(a, v)


def test_interior_basis(r3):
    vol = form(r3, 3, {(0, 1, 2): 1.0})
    X = multivector(r3, 1, {(0,): 1.0})
    assert interior(X, vol).components == {(1, 2): 1.0}


def test_interior_composition_order(r3):
    # i(X ^ Y) = i(Y) after i(X): the first factor hits the first slot
    vol = form(r3, 3, {(0, 1, 2): 1.0})
    XY = multivector(r3, 2, {(0, 1): 1.0})
    once = interior(XY, vol)
    X = multivector(r3, 1, {(0,): 1.0})
    Y = multivector(r3, 1, {(1,): 1.0})
    twice = interior(Y, interior(X, vol))
    assert once.components == twice.components


def test_interior_degree_error(r3):
    a = form(r3, 1, {(0,): 1.0})
    XY = multivector(r3, 2, {(0, 1): 1.0})
    with pytest.raises(DegreeError):
        interior(XY, a)


def _basis_forms(chart, degree):
    n = chart.dim
    for idx in itertools.combinations(range(n), degree):
        yield idx, form(chart, degree, {idx: 1.0})


class TestHodge:
    def test_defining_relation_all_basis_pairs(self, mink):
        """alpha ^ *beta = <alpha, beta> vol, exactly, for every basis pair."""
        vol = volume_form(mink)
        eta = (-1.0, -1.0, -1.0, 1.0)
        for p in range(5):
            for ia, a in _basis_forms(mink, p):
                for ib, b in _basis_forms(mink, p):
                    left = wedge(a, hodge(b))
                    # diagonal metric: basis pairing is 0 off the diagonal,
                    # else the product of inverse-metric entries
                    pairing = 0.0
                    if ia == ib:
                        pairing = 1.0
                        for i in ia:
                            pairing *= 1.0 / eta[i]
                    expected = vol.scale(pairing)
                    le = left.ev((0.0, 0.0, 0.0, 0.0)).components
                    re = expected.ev((0.0, 0.0, 0.0, 0.0)).components
                    assert le == re, (ia, ib)

    def test_double_hodge_on_two_forms(self, mink):
        # Lorentzian signature: ** = -id in degree 2
        for idx, b in _basis_forms(mink, 2):
            twice = hodge(hodge(b))
            assert twice.components == {idx: pytest.approx(-1.0)}

    def test_euclidean_double_hodge_identity(self, r3):
        for _idx, b in _basis_forms(r3, 1):
            twice = hodge(hodge(b))
            assert twice.ev((0, 0, 0)).components == b.components

    def test_symbolic_coefficients(self, mink):
        z, xi = coord(2), coord(3)
        F = form(mink, 2, {(0, 2): sin(z - xi)})
        sF = hodge(F)
        (idx, v), = sF.components.items()
        assert idx == (1, 3)
        # *(dx ^ dz) = -dy ^ dxi in this signature and orientation
        assert v.ev((0, 0, 0.5, 0.2)) == pytest.approx(
            -sin(z - xi).ev((0, 0, 0.5, 0.2)))

    def test_position_dependent_metric_needs_point(self):
        th = coord(0)
        g = MetricSpec.matrix([[as_expr(1.0), as_expr(0.0)],
                               [as_expr(0.0), sin(th) * sin(th)]])
        sphere = Chart(("theta", "phi"), g)
        a = form(sphere, 1, {(0,): 1.0})
        out = hodge(a, at=(1.0, 0.0))
        assert out.degree == 1


class TestMusicalTilde:
    def test_minkowski_one_form(self, mink):
        a = form(mink, 1, {(2,): 1.0, (3,): 2.0})
        v = musical_tilde(a)
        assert v.variance == CONTRA
        assert v.components == {(2,): -1.0, (3,): 2.0}

    def test_round_trip(self, mink):
        a = form(mink, 2, {(0, 3): 2.0, (1, 2): -1.0})
        back = musical_tilde(musical_tilde(a))
        assert back.variance == COV
        assert back.ev((0, 0, 0, 0)).components == a.components

    def test_two_form_determinant_convention(self, mink):
        # tilde(dz ^ dxi) = g^zz g^xixi  dz ^ dxi (diagonal cross terms vanish)
        a = form(mink, 2, {(2, 3): 1.0})
        v = musical_tilde(a)
        assert v.components == {(2, 3): -1.0}


def test_volume_form_minkowski(mink):
    vol = volume_form(mink)
    assert vol.components == {(0, 1, 2, 3): pytest.approx(1.0)}


def test_singular_metric(r3):
    g = MetricSpec.matrix([[coord(0), as_expr(0.0), as_expr(0.0)],
                           [as_expr(0.0), as_expr(1.0), as_expr(0.0)],
                           [as_expr(0.0), as_expr(0.0), as_expr(1.0)]])
    chart = Chart(("x", "y", "z"), g)
    with pytest.raises(SingularMetricError):
        chart.metric.inverse_at((0.0, 0.0, 0.0))


def test_metric_pairing_uses_inverse(mink):
    a = form(mink, 1, {(0,): 1.0})
    assert metric_pairing(a, a) == pytest.approx(-1.0)
    t = form(mink, 1, {(3,): 1.0})
    assert metric_pairing(t, t) == pytest.approx(1.0)
