"""Differential operators: exterior and covariant derivatives, Lie
brackets and projected Lie operators, curvature and Ricci from a metric,
Schrodinger and Dirac residual operators, and a fixed-step geodesic
integrator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DegreeError,
    DimensionError,
    GammaConventionError,
    NonIdempotentProjection,
    StepError,
)
from .exterior import (
    COV,
    AlternatingTensor,
    Chart,
    MetricSpec,
    form,
    sort_sign,
    wedge,
)
from .scalar import Expr, ZERO, as_expr, is_zero
from .valued import ValuedForm

VectorField = List[Expr]  # one Expr per coordinate axis


# ---------------------------------------------------------------------------
# exterior derivative


def d_form(w: AlternatingTensor) -> AlternatingTensor:
    """Exterior derivative of a plain form with symbolic components."""
    chart = w.chart
    n = chart.dim
    if w.degree >= n:
        raise DegreeError("exterior derivative overflows the top degree")
    out: dict = {}
    for idx, v in w.components.items():
        e = as_expr(v)
        for axis in range(n):
            dv = e.diff(axis)
            if is_zero(dv):
                continue
            ss = sort_sign((axis,) + idx)
            if ss is None:
                continue
            key, sign = ss
            term = sign * dv
            out[key] = out[key] + term if key in out else term
    return AlternatingTensor(chart, COV, w.degree + 1,
                             {k: v for k, v in out.items() if not is_zero(v)})


def exterior_d(psi: ValuedForm) -> ValuedForm:
    """d acts per value component: d(psi^i (x) E_i) = (d psi^i) (x) E_i."""
    return ValuedForm.from_slices(psi.space, [d_form(s) for s in psi.slices()],
                                  variance=psi.variance)


# ---------------------------------------------------------------------------
# connections and covariant exterior derivative


@dataclass
class ConnectionForm:
    """Either a Lie-algebra-valued 1-form or connection coefficients.

    kind "trivial": D = d.
    kind "lie": omega in Lambda^1 (x) g, bracket term C^m_jk omega^j ^ psi^k.
    kind "coeffs": Gamma[i][mu][j] with nabla(sigma_j) = Gamma^i_mu_j dx^mu (x) sigma_i.
    """

    kind: str = "trivial"
    omega: Optional[ValuedForm] = None
    coeffs: Optional[list] = None  # [i][mu][j] -> Expr

    @staticmethod
    def trivial() -> "ConnectionForm":
        return ConnectionForm("trivial")

    @staticmethod
    def from_omega(omega: ValuedForm) -> "ConnectionForm":
        if omega.degree != 1:
            raise DegreeError("connection form must have degree 1")
        if omega.space.lie is None:
            raise DimensionError("connection form needs a Lie-structured value space")
        return ConnectionForm("lie", omega=omega)

    @staticmethod
    def from_christoffels(gamma) -> "ConnectionForm":
        return ConnectionForm("coeffs", coeffs=gamma)


def covariant_D(conn: ConnectionForm, psi: ValuedForm) -> ValuedForm:
    """D psi = d psi + connection term."""
    base = exterior_d(psi)
    if conn.kind == "trivial":
        return base
    if conn.kind == "lie":
        omega = conn.omega
        if omega.space.dim != psi.space.dim:
            raise DimensionError("connection and section value spaces differ")
        C = omega.space.lie.constants
        r = psi.space.dim
        omega_slices = omega.slices()
        psi_slices = psi.slices()
        extra = [None] * r
        for m in range(r):
            acc = None
            for j in range(r):
                if not omega_slices[j].components:
                    continue
                for k in range(r):
                    c = C[m][j][k]
                    if c == 0.0 or not psi_slices[k].components:
                        continue
                    t = wedge(omega_slices[j], psi_slices[k]).scale(c)
                    acc = t if acc is None else acc + t
            extra[m] = acc
        out = dict(base.components)
        for m, t in enumerate(extra):
            if t is None:
                continue
            lab = psi.space.labels[m]
            for idx, v in t.components.items():
                key = (idx, lab)
                out[key] = out[key] + v if key in out else as_expr(v)
        return ValuedForm(psi.chart, psi.degree + 1, psi.variance, psi.space, out)
    if conn.kind == "coeffs":
        gamma = conn.coeffs
        r = psi.space.dim
        n = psi.chart.dim
        if len(gamma) != r:
            raise DimensionError("connection coefficients do not match the value space")
        sign = -1.0 if psi.degree % 2 else 1.0
        psi_slices = psi.slices()
        out = dict(base.components)
        for i in range(r):
            acc = None
            for j in range(r):
                if not psi_slices[j].components:
                    continue
                comp = {}
                for mu in range(n):
                    g = as_expr(gamma[i][mu][j])
                    if not is_zero(g):
                        comp[(mu,)] = g
                if not comp:
                    continue
                gform = form(psi.chart, 1, comp)
                t = wedge(psi_slices[j], gform)
                acc = t if acc is None else acc + t
            if acc is None:
                continue
            lab = psi.space.labels[i]
            for idx, v in acc.components.items():
                key = (idx, lab)
                term = sign * v
                out[key] = out[key] + term if key in out else as_expr(term)
        return ValuedForm(psi.chart, psi.degree + 1, psi.variance, psi.space, out)
    raise DimensionError(f"unknown connection kind {conn.kind!r}")


def curvature(omega: ValuedForm) -> ValuedForm:
    """Omega = d omega + 1/2 [omega, omega] in the graded-bracket convention."""
    if omega.space.lie is None:
        raise DimensionError("curvature needs a Lie-structured value space")
    C = omega.space.lie.constants
    r = omega.space.dim
    slices = omega.slices()
    d_slices = [d_form(s) for s in slices]
    out_slices = []
    for m in range(r):
        acc = d_slices[m]
        for j in range(r):
            for k in range(r):
                c = C[m][j][k]
                if c == 0.0:
                    continue
                acc = acc + wedge(slices[j], slices[k]).scale(0.5 * c)
        out_slices.append(acc)
    return ValuedForm.from_slices(omega.space, out_slices, variance=omega.variance)


# ---------------------------------------------------------------------------
# vector-field operators


def nabla_X(gamma, X: VectorField, u: VectorField) -> VectorField:
    """(nabla_X u)^mu = X^nu d_nu u^mu + Gamma^mu_nu_sigma X^nu u^sigma."""
    n = len(X)
    out = []
    for mu in range(n):
        acc: Expr = ZERO
        for nu in range(n):
            acc = acc + X[nu] * u[mu].diff(nu)
            if gamma is not None:
                for s in range(n):
                    g = as_expr(gamma[mu][nu][s])
                    if not is_zero(g):
                        acc = acc + g * X[nu] * u[s]
        out.append(acc)
    return out


def lie_bracket(X: VectorField, Y: VectorField) -> VectorField:
    """[X, Y]^mu = X^nu d_nu Y^mu - Y^nu d_nu X^mu."""
    if len(X) != len(Y):
        raise DimensionError("vector fields have different dimensions")
    n = len(X)
    out = []
    for mu in range(n):
        acc: Expr = ZERO
        for nu in range(n):
            acc = acc + X[nu] * Y[mu].diff(nu) - Y[nu] * X[mu].diff(nu)
        out.append(acc)
    return out


def apply_projection(pi, v: VectorField) -> VectorField:
    n = len(v)
    return [sum((as_expr(pi[i][j]) * v[j] for j in range(n)), start=ZERO) for i in range(n)]


def check_idempotent(pi, pts: Sequence[Sequence[float]], tol: float = 1e-10) -> None:
    """Raise NonIdempotentProjection unless pi*pi == pi at every point."""
    n = len(pi)
    rows = [[as_expr(pi[i][j]) for j in range(n)] for i in range(n)]
    for pt in pts:
        m = np.array([[rows[i][j].ev(pt) for j in range(n)] for i in range(n)])
        if np.max(np.abs(m @ m - m)) > tol:
            raise NonIdempotentProjection(f"pi^2 != pi at {tuple(pt)}")


def projected_lie(pi, X: VectorField) -> Callable[[VectorField], VectorField]:
    """D(X): Y -> pi([X, Y])."""

    def op(Y: VectorField) -> VectorField:
        return apply_projection(pi, lie_bracket(X, Y))

    return op


# ---------------------------------------------------------------------------
# metric geometry


def christoffels_from_metric(metric: MetricSpec):
    """Levi-Civita symbols Gamma^l_mn = 1/2 g^lr (d_m g_rn + d_n g_rm - d_r g_mn)."""
    n = metric.dim
    g = metric.entries()
    ginv = metric.inverse_entries()
    half = as_expr(0.5)
    gamma = [[[ZERO for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for l in range(n):
        for m in range(n):
            for nu in range(m, n):
                acc: Expr = ZERO
                for r in range(n):
                    if is_zero(ginv[l][r]):
                        continue
                    term = g[r][nu].diff(m) + g[r][m].diff(nu) - g[m][nu].diff(r)
                    acc = acc + ginv[l][r] * term
                val = half * acc
                gamma[l][m][nu] = val
                gamma[l][nu][m] = val
    return gamma


def riemann(metric: MetricSpec):
    """R^rho_sigma_mu_nu = d_mu G^rho_nu_sigma - d_nu G^rho_mu_sigma
    + G^rho_mu_lam G^lam_nu_sigma - G^rho_nu_lam G^lam_mu_sigma."""
    n = metric.dim
    gam = christoffels_from_metric(metric)
    R = [[[[ZERO for _ in range(n)] for _ in range(n)] for _ in range(n)] for _ in range(n)]
    for rho in range(n):
        for sig in range(n):
            for mu in range(n):
                for nu in range(n):
                    acc = gam[rho][nu][sig].diff(mu) - gam[rho][mu][sig].diff(nu)
                    for lam in range(n):
                        acc = acc + gam[rho][mu][lam] * gam[lam][nu][sig]
                        acc = acc - gam[rho][nu][lam] * gam[lam][mu][sig]
                    R[rho][sig][mu][nu] = acc
    return R


def ricci(metric: MetricSpec):
    """R_sigma_nu = R^mu_sigma_mu_nu (contraction of the Riemann tensor)."""
    n = metric.dim
    gam = christoffels_from_metric(metric)
    out = [[ZERO for _ in range(n)] for _ in range(n)]
    for sig in range(n):
        for nu in range(sig, n):
            acc: Expr = ZERO
            for mu in range(n):
                acc = acc + gam[mu][nu][sig].diff(mu) - gam[mu][mu][sig].diff(nu)
                for lam in range(n):
                    acc = acc + gam[mu][mu][lam] * gam[lam][nu][sig]
                    acc = acc - gam[mu][nu][lam] * gam[lam][mu][sig]
            out[sig][nu] = acc
            out[nu][sig] = acc
    return out


def metricity_residual(metric: MetricSpec):
    """Components of nabla g; all-zero for the Levi-Civita connection."""
    n = metric.dim
    g = metric.entries()
    gam = christoffels_from_metric(metric)
    out = []
    for lam in range(n):
        for mu in range(n):
            for nu in range(mu, n):
                acc = g[mu][nu].diff(lam)
                for rho in range(n):
                    acc = acc - gam[rho][lam][mu] * g[rho][nu]
                    acc = acc - gam[rho][lam][nu] * g[mu][rho]
                out.append(acc)
    return out


# ---------------------------------------------------------------------------
# Schrodinger operator


@dataclass(frozen=True)
class HamiltonianSpec:
    """H = -hbar^2/(2m) Laplacian + V over the spatial axes (time is last)."""

    hbar: float = 1.0
    mass: float = 1.0
    potential: Expr = ZERO

    def __post_init__(self):
        if self.hbar <= 0 or self.mass <= 0:
            raise DimensionError("hbar and mass must be positive")


def schrodinger_residual(h: HamiltonianSpec, psi: Expr, dim: int) -> Expr:
    """i hbar d_t psi - H psi on a chart whose last axis is time."""
    t_axis = dim - 1
    res = (1j * h.hbar) * psi.diff(t_axis)
    coeff = h.hbar * h.hbar / (2.0 * h.mass)
    for k in range(t_axis):
        res = res + coeff * psi.diff(k).diff(k)
    res = res - h.potential * psi
    return res


# ---------------------------------------------------------------------------
# Dirac operator


def _pauli():
    s1 = np.array([[0, 1], [1, 0]], dtype=complex)
    s2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
    s3 = np.array([[1, 0], [0, -1]], dtype=complex)
    return s1, s2, s3


def dirac_representation() -> List[np.ndarray]:
    """gamma_mu for axes (x, y, z, xi), time last: gamma_xi = diag(1,1,-1,-1)."""
    s = _pauli()
    zeros = np.zeros((2, 2), dtype=complex)
    gammas = []
    for k in range(3):
        gammas.append(np.block([[zeros, s[k]], [-s[k], zeros]]))
    gammas.append(np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex))
    return gammas


MINKOWSKI_SIGNATURE = (-1.0, -1.0, -1.0, 1.0)


@dataclass
class GammaSystem:
    """Dirac data: gamma matrices, mass, mass-term sign, optional EM coupling.

    ``sign`` is the literal sign of the mass term in the residual
    (i gamma^mu (d_mu - i e A_mu) + sign * m) psi.
    """

    gammas: List[np.ndarray] = None
    mass: float = 1.0
    sign: int = -1
    potential: Optional[List[Expr]] = None  # A_mu, one per axis
    charge: float = 0.0

    def __post_init__(self):
        if self.gammas is None:
            self.gammas = dirac_representation()
        if self.mass < 0:
            raise DimensionError("mass must be >= 0")
        if self.sign not in (1, -1):
            raise DimensionError("sign must be +1 or -1")
        self.validate()

    def validate(self):
        """Clifford invariant and the -2 trace identity, both exact."""
        eta = MINKOWSKI_SIGNATURE
        eye = np.eye(4, dtype=complex)
        for mu in range(4):
            for nu in range(4):
                anti = self.gammas[mu] @ self.gammas[nu] + self.gammas[nu] @ self.gammas[mu]
                want = 2.0 * (eta[mu] if mu == nu else 0.0) * eye
                if not np.array_equal(anti, want):
                    raise GammaConventionError(
                        f"anticommutator violated at mu={mu}, nu={nu}")
        # gamma_mu^2 = eta_mm id, so gamma_mu^-1 = eta^mm gamma_mu exactly
        contraction = np.zeros((4, 4), dtype=complex)
        for mu in range(4):
            inv = (1.0 / eta[mu]) * self.gammas[mu]
            if not np.array_equal(self.gammas[mu] @ inv, eye):
                raise GammaConventionError(f"gamma_{mu} inverse is not exact")
            contraction = contraction + (1.0 / eta[mu]) * self.gammas[mu] @ inv
        if not np.array_equal(contraction, -2.0 * eye):
            raise GammaConventionError("eta^mn gamma_m gamma_n^-1 != -2 id")

    def gamma_upper(self, mu: int) -> np.ndarray:
        return MINKOWSKI_SIGNATURE[mu] * self.gammas[mu]


def dirac_residual(gs: GammaSystem, psi: Sequence[Expr]) -> List[Expr]:
    """(i gamma^mu (d_mu - i e A_mu) + sign m) psi, componentwise."""
    if len(psi) != 4:
        raise DimensionError("Dirac section needs 4 components")
    psi = [as_expr(p) for p in psi]
    out = []
    for j in range(4):
        acc: Expr = (gs.sign * gs.mass) * psi[j]
        for mu in range(4):
            gu = gs.gamma_upper(mu)
            for i in range(4):
                coeff = gu[j, i]
                if coeff == 0:
                    continue
                term = psi[i].diff(mu)
                if gs.potential is not None and gs.charge != 0.0:
                    term = term - (1j * gs.charge) * (gs.potential[mu] * psi[i])
                acc = acc + (1j * coeff) * term
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# geodesic integrator


def geodesic_integrate(gamma, x0: Sequence[float], u0: Sequence[float],
                       steps: int, ds: float) -> Tuple[np.ndarray, np.ndarray]:
    """Classical RK4 on x' = u, u' = -Gamma(u, u); returns (xs, us)."""
    n = len(x0)
    fns = [[[as_expr(gamma[l][m][nu]).fn() if not is_zero(as_expr(gamma[l][m][nu])) else None
             for nu in range(n)] for m in range(n)] for l in range(n)]

    def accel(x, u):
        a = [0.0] * n
        for l in range(n):
            s = 0.0
            for m in range(n):
                for nu in range(n):
                    f = fns[l][m][nu]
                    if f is None:
                        continue
                    s += (f(x) * u[m] * u[nu]).real
            a[l] = -s
        return a

    xs = np.empty((steps + 1, n))
    us = np.empty((steps + 1, n))
    x = list(map(float, x0))
    u = list(map(float, u0))
    xs[0], us[0] = x, u
    for step in range(steps):
        k1x, k1u = u, accel(x, u)
        x2 = [x[i] + 0.5 * ds * k1x[i] for i in range(n)]
        u2 = [u[i] + 0.5 * ds * k1u[i] for i in range(n)]
        k2x, k2u = u2, accel(x2, u2)
        x3 = [x[i] + 0.5 * ds * k2x[i] for i in range(n)]
        u3 = [u[i] + 0.5 * ds * k2u[i] for i in range(n)]
        k3x, k3u = u3, accel(x3, u3)
        x4 = [x[i] + ds * k3x[i] for i in range(n)]
        u4 = [u[i] + ds * k3u[i] for i in range(n)]
        k4x, k4u = u4, accel(x4, u4)
        x = [x[i] + ds / 6.0 * (k1x[i] + 2 * k2x[i] + 2 * k3x[i] + k4x[i]) for i in range(n)]
        u = [u[i] + ds / 6.0 * (k1u[i] + 2 * k2u[i] + 2 * k3u[i] + k4u[i]) for i in range(n)]
        if any(not math.isfinite(v) for v in x + u):
            raise StepError(f"non-finite state at step {step + 1}")
        xs[step + 1], us[step + 1] = x, u
    return xs, us
