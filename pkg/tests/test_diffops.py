import math

import numpy as np
import pytest

from grs.diffops import (
    ConnectionForm,
    GammaSystem,
    HamiltonianSpec,
    check_idempotent,
    christoffels_from_metric,
    covariant_D,
    curvature,
    d_form,
    dirac_residual,
    exterior_d,
    geodesic_integrate,
    lie_bracket,
    metricity_residual,
    nabla_X,
    projected_lie,
    ricci,
    riemann,
    schrodinger_residual,
)
from grs.errors import (
    DegreeError,
    DimensionError,
    GammaConventionError,
    NonIdempotentProjection,
    StepError,
)
from grs.exterior import COV, Chart, MetricSpec, form
from grs.scalar import ZERO, as_expr, const, coord, cos, exp, sin
from grs.valued import ValueSpace, ValuedForm, su2


x, y, z = coord(0), coord(1), coord(2)


@pytest.fixture
def r3():
    return Chart(("x", "y", "z"), MetricSpec.diagonal([1, 1, 1]))


@pytest.fixture
def sphere():
    th = coord(0)
    g = MetricSpec.matrix([[as_expr(1.0), ZERO], [ZERO, sin(th) * sin(th)]])
    return Chart(("theta", "phi"), g)


@pytest.fixture
def V3():
    return ValueSpace(labels=("e1", "e2", "e3"), lie=su2())


class TestExteriorDerivative:
    def test_basic(self, r3):
        w = form(r3, 1, {(1,): x})
        dw = d_form(w)
        assert set(dw.components) == {(0, 1)}
        assert dw.components[(0, 1)].ev((0, 0, 0)) == 1.0

    def test_dd_is_zero(self, r3):
        w = form(r3, 1, {(0,): sin(x * y), (1,): exp(z) * x, (2,): y * y})
        dd = d_form(d_form(w))
        pt = (0.3, -0.7, 0.4)
        for v in dd.components.values():
            assert abs(v.ev(pt)) < 1e-12

    def test_top_degree_overflow(self, r3):
        vol = form(r3, 3, {(0, 1, 2): x})
        with pytest.raises(DegreeError):
            d_form(vol)

    def test_valued_d_acts_per_label(self, r3, V3):
        vf = ValuedForm(r3, 0, COV, V3, {((), "e1"): x, ((), "e3"): y})
        dvf = exterior_d(vf)
        assert set(dvf.components) == {((0,), "e1"), ((1,), "e3")}


class TestCovariantD:
    def test_trivial_is_d(self, r3, V3):
        vf = ValuedForm(r3, 0, COV, V3, {((), "e2"): x * y})
        a = covariant_D(ConnectionForm.trivial(), vf)
        b = exterior_d(vf)
        assert a.components.keys() == b.components.keys()

    def test_lie_connection_bracket_term(self, r3, V3):
        # omega = dx (x) e1 acting on a constant section e2 contributes
        # [e1, e2] = e3 along dx
        omega = ValuedForm(r3, 1, COV, V3, {((0,), "e1"): 1.0})
        psi = ValuedForm(r3, 0, COV, V3, {((), "e2"): 1.0})
        out = covariant_D(ConnectionForm.from_omega(omega), psi)
        assert set(out.components) == {((0,), "e3")}
        assert out.components[((0,), "e3")].ev((0, 0, 0)) == 1.0

    def test_from_omega_degree_check(self, r3, V3):
        bad = ValuedForm(r3, 2, COV, V3, {((0, 1), "e1"): 1.0})
        with pytest.raises(DegreeError):
            ConnectionForm.from_omega(bad)

    def test_from_omega_needs_lie(self, r3):
        plain = ValueSpace(labels=("a",))
        w = ValuedForm(r3, 1, COV, plain, {((0,), "a"): 1.0})
        with pytest.raises(DimensionError):
            ConnectionForm.from_omega(w)


class TestCurvature:
    def test_abelian_part_is_d_omega(self, r3, V3):
        omega = ValuedForm(r3, 1, COV, V3, {((1,), "e1"): x})
        om = curvature(omega)
        assert set(om.components) == {((0, 1), "e1")}

    def test_bracket_contribution(self, r3, V3):
        # omega = x dy e1 + y dx e2: d-part gives dx^dy (e1 - e2),
        # bracket part gives -xy dx^dy e3
        omega = ValuedForm(r3, 1, COV, V3,
                           {((1,), "e1"): x, ((0,), "e2"): y})
        om = curvature(omega)
        pt = (0.5, 0.8, 0.0)
        assert om.components[((0, 1), "e1")].ev(pt) == pytest.approx(1.0)
        assert om.components[((0, 1), "e2")].ev(pt) == pytest.approx(-1.0)
        assert om.components[((0, 1), "e3")].ev(pt) == pytest.approx(-0.4)

    def test_bianchi_identity(self, r3, V3):
        omega = ValuedForm(r3, 1, COV, V3, {
            ((0,), "e1"): sin(y),
            ((1,), "e2"): x * z,
            ((2,), "e3"): exp(0.3 * x) * y,
        })
        om = curvature(omega)
        res = covariant_D(ConnectionForm.from_omega(omega), om)
        for pt in [(0.2, -0.4, 0.9), (1.1, 0.3, -0.5)]:
            for v in res.components.values():
                assert abs(v.ev(pt)) < 1e-10


class TestMetricGeometry:
    def test_sphere_christoffels(self, sphere):
        gam = christoffels_from_metric(sphere.metric)
        th = 1.0
        pt = (th, 0.3)
        assert gam[0][1][1].ev(pt) == pytest.approx(-math.sin(th) * math.cos(th))
        assert gam[1][0][1].ev(pt) == pytest.approx(math.cos(th) / math.sin(th))
        assert gam[0][0][0].ev(pt) == 0.0

    def test_sphere_is_einstein(self, sphere):
        # unit sphere: Ric = g
        R = ricci(sphere.metric)
        g = sphere.metric.entries()
        for pt in [(0.8, 0.1), (1.9, -0.4)]:
            for i in range(2):
                for j in range(2):
                    assert R[i][j].ev(pt) == pytest.approx(g[i][j].ev(pt))

    def test_flat_riemann_vanishes(self):
        g = MetricSpec.diagonal([1, 1, 1])
        R = riemann(g)
        for a in range(3):
            for b in range(3):
                for c in range(3):
                    for d in range(3):
                        assert R[a][b][c][d].ev((0.4, 0.1, -0.2)) == 0.0

    def test_metricity(self, sphere):
        res = metricity_residual(sphere.metric)
        for v in res:
            assert abs(v.ev((1.2, 0.5))) < 1e-12


class TestVectorOperators:
    def test_lie_bracket(self):
        X = [x, ZERO]
        Y = [ZERO, x]
        out = lie_bracket(X, Y)
        # [x dx, x dy] = x dy
        assert out[0].ev((2.0, 0.0)) == 0.0
        assert out[1].ev((2.0, 0.0)) == 2.0

    def test_lie_bracket_antisymmetric(self):
        X = [sin(y), x]
        Y = [x * y, const(1)]
        ab = lie_bracket(X, Y)
        ba = lie_bracket(Y, X)
        pt = (0.7, -0.3)
        for a, b in zip(ab, ba):
            assert a.ev(pt) == pytest.approx(-b.ev(pt))

    def test_lie_bracket_dimension_check(self):
        with pytest.raises(DimensionError):
            lie_bracket([x], [x, y])

    def test_nabla_flat_directional_derivative(self):
        u = [x * y, sin(x)]
        X = [const(1), ZERO]
        out = nabla_X(None, X, u)
        pt = (0.5, 2.0)
        assert out[0].ev(pt) == pytest.approx(2.0)
        assert out[1].ev(pt) == pytest.approx(math.cos(0.5))

    def test_nabla_with_christoffels(self, sphere):
        gam = christoffels_from_metric(sphere.metric)
        u = [ZERO, const(1)]  # d/dphi
        out = nabla_X(gam, u, u)
        th = 1.1
        # nabla_phi d/dphi = -sin th cos th d/dtheta + 0
        assert out[0].ev((th, 0.0)) == pytest.approx(-math.sin(th) * math.cos(th))
        assert abs(out[1].ev((th, 0.0))) < 1e-12

    def test_check_idempotent(self):
        pi = [[1.0, 0.0], [0.0, 0.0]]
        check_idempotent(pi, [(0.1, 0.2), (1.0, -1.0)])
        with pytest.raises(NonIdempotentProjection):
            check_idempotent([[1.0, 1.0], [1.0, 1.0]], [(0.0, 0.0)])

    def test_projected_lie(self):
        pi = [[1.0, 0.0], [0.0, 0.0]]
        op = projected_lie(pi, [ZERO, x])
        out = op([const(1), ZERO])
        # [X, Y] = (0, -1); projection keeps only the first slot
        assert out[0].ev((0.3, 0.0)) == 0.0
        assert out[1].ev((0.3, 0.0)) == 0.0


class TestSchrodinger:
    def test_plane_wave_dispersion(self):
        # psi = exp(i(kx - w t)) with w = k^2/2 solves the free equation
        k, w = 1.3, 1.3 * 1.3 / 2.0
        xx, t = coord(0), coord(1)
        psi = exp(1j * (k * xx - w * t))
        res = schrodinger_residual(HamiltonianSpec(), psi, dim=2)
        assert abs(res.ev((0.4, 0.9))) < 1e-12

    def test_wrong_frequency_fails(self):
        xx, t = coord(0), coord(1)
        psi = exp(1j * (xx - t))
        res = schrodinger_residual(HamiltonianSpec(), psi, dim=2)
        assert abs(res.ev((0.0, 0.0))) == pytest.approx(0.5)

    def test_potential_term(self):
        xx, t = coord(0), coord(1)
        psi = exp(-1j * t)
        h = HamiltonianSpec(potential=const(1.0))
        res = schrodinger_residual(h, psi, dim=2)
        assert abs(res.ev((0.2, 0.5))) < 1e-12

    def test_invalid_parameters(self):
        with pytest.raises(DimensionError):
            HamiltonianSpec(hbar=0.0)
        with pytest.raises(DimensionError):
            HamiltonianSpec(mass=-1.0)


class TestDirac:
    def test_default_representation_validates(self):
        GammaSystem()  # __post_init__ runs validate()

    def test_broken_gammas_rejected(self):
        gammas = [np.eye(4, dtype=complex)] * 4
        with pytest.raises(GammaConventionError):
            GammaSystem(gammas=gammas)

    def test_parameter_checks(self):
        with pytest.raises(DimensionError):
            GammaSystem(mass=-1.0)
        with pytest.raises(DimensionError):
            GammaSystem(sign=2)

    def test_rest_solution(self):
        xi = coord(3)
        psi = [exp(-1j * xi), ZERO, ZERO, ZERO]
        res = dirac_residual(GammaSystem(mass=1.0, sign=-1), psi)
        for r in res:
            assert abs(r.ev((0.1, 0.2, 0.3, 0.4))) < 1e-14

    def test_mass_mismatch_unit_residual(self):
        xi = coord(3)
        psi = [exp(-1j * xi), ZERO, ZERO, ZERO]
        res = dirac_residual(GammaSystem(mass=2.0, sign=-1), psi)
        mags = [abs(r.ev((0.0, 0.0, 0.0, 0.7))) for r in res]
        assert max(mags) == pytest.approx(1.0, abs=1e-12)

    def test_component_count(self):
        with pytest.raises(DimensionError):
            dirac_residual(GammaSystem(), [ZERO, ZERO])


class TestGeodesics:
    def test_flat_straight_line_exact(self):
        n = 2
        gam = [[[ZERO] * n for _ in range(n)] for _ in range(n)]
        xs, us = geodesic_integrate(gam, (0.0, 0.0), (1.0, 2.0), 100, 0.01)
        assert xs[-1] == pytest.approx([1.0, 2.0])
        assert us[-1] == pytest.approx([1.0, 2.0])

    def test_sphere_equator(self, sphere):
        gam = christoffels_from_metric(sphere.metric)
        xs, us = geodesic_integrate(gam, (math.pi / 2, 0.0), (0.0, 1.0),
                                    1000, 1e-3)
        assert np.max(np.abs(xs[:, 0] - math.pi / 2)) < 1e-12
        # speed stays 1 on the equator
        assert abs(us[-1][1] - 1.0) < 1e-10

    def test_blow_up_raises(self):
        gam = [[[as_expr(-1.0)]]]
        with pytest.raises(StepError):
            geodesic_integrate(gam, (0.0,), (1.0,), 5000, 0.1)
