"""Symbolic scalar fields on a coordinate chart.

Expression trees support exact partial differentiation and pointwise
evaluation in IEEE doubles (complex).  Trees are immutable and are never
rewritten after construction; the only folding happens in the smart
constructors (constants, additive/multiplicative identities), which keeps
derivative trees from blowing up without ever touching an existing node.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .errors import DomainError, EvalSingularity

_DIV_FLOOR = 1e-300


def _is_real(z: complex) -> bool:
    return z.imag == 0.0


class Expr:
    """Base node.  Subclasses implement ``_diff`` and ``_compile``."""

    __slots__ = ("_fn",)

    def diff(self, axis: int) -> "Expr":
        """Exact partial derivative along a 0-based coordinate axis."""
        return self._diff(axis)

    def _diff(self, axis: int) -> "Expr":  # pragma: no cover - abstract
        raise NotImplementedError

    def _compile(self) -> Callable[[Sequence[float]], complex]:  # pragma: no cover
        raise NotImplementedError

    def fn(self) -> Callable[[Sequence[float]], complex]:
        f = getattr(self, "_fn", None)
        if f is None:
            f = self._compile()
            self._fn = f
        return f

    def ev(self, coords: Sequence[float]) -> complex:
        """Evaluate at a sample point (sequence of reals)."""
        return self.fn()(coords)

    # arithmetic sugar; everything funnels through the folding constructors
    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, other):
        return pow_(self, other)


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = complex(value)

    def _diff(self, axis):
        return ZERO

    def _compile(self):
        v = self.value
        return lambda c: v

    def __repr__(self):
        return f"Const({self.value})"


ZERO = Const(0.0)
ONE = Const(1.0)


class Coord(Expr):
    __slots__ = ("axis",)

    def __init__(self, axis: int):
        self.axis = int(axis)

    def _diff(self, axis):
        return ONE if axis == self.axis else ZERO

    def _compile(self):
        k = self.axis
        return lambda c: c[k]

    def __repr__(self):
        return f"Coord({self.axis})"


class _Binary(Expr):
    __slots__ = ("a", "b")

    def __init__(self, a: Expr, b: Expr):
        self.a = a
        self.b = b

    def __repr__(self):
        return f"{type(self).__name__}({self.a!r}, {self.b!r})"


class Add(_Binary):
    __slots__ = ()

    def _diff(self, axis):
        return add(self.a._diff(axis), self.b._diff(axis))

    def _compile(self):
        fa, fb = self.a.fn(), self.b.fn()
        return lambda c: fa(c) + fb(c)


class Sub(_Binary):
    __slots__ = ()

    def _diff(self, axis):
        return sub(self.a._diff(axis), self.b._diff(axis))

    def _compile(self):
        fa, fb = self.a.fn(), self.b.fn()
        return lambda c: fa(c) - fb(c)


class Mul(_Binary):
    __slots__ = ()

    def _diff(self, axis):
        return add(mul(self.a._diff(axis), self.b), mul(self.a, self.b._diff(axis)))

    def _compile(self):
        fa, fb = self.a.fn(), self.b.fn()
        return lambda c: fa(c) * fb(c)


class Div(_Binary):
    __slots__ = ()

    def _diff(self, axis):
        num = sub(mul(self.a._diff(axis), self.b), mul(self.a, self.b._diff(axis)))
        return div(num, mul(self.b, self.b))

    def _compile(self):
        fa, fb = self.a.fn(), self.b.fn()

        def f(c):
            d = fb(c)
            if abs(d) < _DIV_FLOOR:
                raise EvalSingularity(f"division by {d!r}")
            return fa(c) / d

        return f


class Neg(Expr):
    __slots__ = ("a",)

    def __init__(self, a: Expr):
        self.a = a

    def _diff(self, axis):
        return neg(self.a._diff(axis))

    def _compile(self):
        fa = self.a.fn()
        return lambda c: -fa(c)

    def __repr__(self):
        return f"Neg({self.a!r})"


class Pow(Expr):
    """Integer or half-integer power.  Exponent kept exact as a Fraction."""

    __slots__ = ("a", "exponent")

    def __init__(self, a: Expr, exponent: Fraction):
        if exponent.denominator not in (1, 2):
            raise DomainError(f"exponent {exponent} is not integer or half-integer")
        self.a = a
        self.exponent = exponent

    def _diff(self, axis):
        e = self.exponent
        return mul(mul(Const(float(e)), pow_(self.a, e - 1)), self.a._diff(axis))

    def _compile(self):
        fa = self.a.fn()
        e = self.exponent
        if e.denominator == 1:
            k = int(e)

            def f(c):
                v = fa(c)
                if k < 0 and abs(v) < _DIV_FLOOR:
                    raise EvalSingularity(f"{v!r} ** {k}")
                return v ** k

            return f

        ef = float(e)

        def f(c):
            v = fa(c)
            if ef < 0 and abs(v) < _DIV_FLOOR:
                raise EvalSingularity(f"{v!r} ** {ef}")
            if _is_real(v) and v.real < 0.0:
                raise DomainError(f"negative base {v.real} under half-integer power {e}")
            return v ** ef

        return f

    def __repr__(self):
        return f"Pow({self.a!r}, {self.exponent})"


class _Unary(Expr):
    __slots__ = ("a",)

    def __init__(self, a: Expr):
        self.a = a

    def __repr__(self):
        return f"{type(self).__name__}({self.a!r})"


class Sin(_Unary):
    __slots__ = ()

    def _diff(self, axis):
        return mul(cos(self.a), self.a._diff(axis))

    def _compile(self):
        fa = self.a.fn()
        return lambda c: cmath.sin(fa(c))


class Cos(_Unary):
    __slots__ = ()

    def _diff(self, axis):
        return neg(mul(sin(self.a), self.a._diff(axis)))

    def _compile(self):
        fa = self.a.fn()
        return lambda c: cmath.cos(fa(c))


class Exp(_Unary):
    __slots__ = ()

    def _diff(self, axis):
        return mul(self, self.a._diff(axis))

    def _compile(self):
        fa = self.a.fn()
        return lambda c: cmath.exp(fa(c))


class Sqrt(_Unary):
    __slots__ = ()

    def _diff(self, axis):
        return div(self.a._diff(axis), mul(Const(2.0), self))

    def _compile(self):
        fa = self.a.fn()

        def f(c):
            v = fa(c)
            if _is_real(v) and v.real < 0.0:
                raise DomainError(f"sqrt of negative real {v.real}")
            return cmath.sqrt(v)

        return f


class Bump(Expr):
    """``order``-th derivative of the C-infinity bump profile.

    Profile: exp(-1/(1-s^2)) on |s| < 1, identically 0 outside.  The
    derivative prefactors are hard-coded so the closed support boundary
    never produces 0*inf; outside the open support every order returns an
    exact 0.0.  Orders above 2 are not needed anywhere and are rejected.
    """

    __slots__ = ("a", "order")

    def __init__(self, a: Expr, order: int = 0):
        if order not in (0, 1, 2):
            raise DomainError("bump derivatives supported up to order 2")
        self.a = a
        self.order = order

    def _diff(self, axis):
        return mul(Bump(self.a, self.order + 1), self.a._diff(axis))

    def _compile(self):
        fa = self.a.fn()
        k = self.order

        def f(c):
            s = fa(c).real
            w = 1.0 - s * s
            if w <= 0.0:
                return 0.0
            try:
                e = math.exp(-1.0 / w)
            except OverflowError:
                return 0.0
            if k == 0:
                return e
            w1 = -2.0 * s / (w * w)
            if k == 1:
                return w1 * e
            w2 = -2.0 / (w * w) - 8.0 * s * s / (w * w * w)
            return (w2 + w1 * w1) * e

        return f

    def __repr__(self):
        return f"Bump({self.a!r}, {self.order})"


# ---------------------------------------------------------------------------
# folding constructors


def as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    return Const(v)


def _const_val(e: Expr) -> Optional[complex]:
    return e.value if isinstance(e, Const) else None


def is_zero(e: Expr) -> bool:
    return isinstance(e, Const) and e.value == 0


def add(a: Expr, b: Expr) -> Expr:
    va, vb = _const_val(a), _const_val(b)
    if va is not None and vb is not None:
        return Const(va + vb)
    if va == 0:
        return b
    if vb == 0:
        return a
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    va, vb = _const_val(a), _const_val(b)
    if va is not None and vb is not None:
        return Const(va - vb)
    if vb == 0:
        return a
    if va == 0:
        return neg(b)
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    va, vb = _const_val(a), _const_val(b)
    if va is not None and vb is not None:
        return Const(va * vb)
    if va == 0 or vb == 0:
        return ZERO
    if va == 1:
        return b
    if vb == 1:
        return a
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    va, vb = _const_val(a), _const_val(b)
    if vb is not None and vb != 0:
        if va is not None:
            return Const(va / vb)
        if vb == 1:
            return a
    if va == 0 and (vb is None or vb != 0):
        return ZERO
    return Div(a, b)


def neg(a: Expr) -> Expr:
    va = _const_val(a)
    if va is not None:
        return Const(-va)
    if isinstance(a, Neg):
        return a.a
    return Neg(a)


def pow_(a: Expr, exponent) -> Expr:
    e = exponent if isinstance(exponent, Fraction) else Fraction(exponent)
    if e == 0:
        return ONE
    if e == 1:
        return a
    va = _const_val(a)
    if va is not None and not (va == 0 and e < 0):
        if e.denominator == 1:
            return Const(va ** int(e))
        if not (_is_real(va) and va.real < 0):
            return Const(va ** float(e))
    return Pow(a, e)


def sin(a) -> Expr:
    return Sin(as_expr(a))


def cos(a) -> Expr:
    return Cos(as_expr(a))


def exp(a) -> Expr:
    return Exp(as_expr(a))


def sqrt(a) -> Expr:
    return Sqrt(as_expr(a))


def bump(a) -> Expr:
    """C-infinity bump of the argument: exp(-1/(1-s^2)) on |s|<1, else 0."""
    return Bump(as_expr(a), 0)


def coord(axis: int) -> Expr:
    return Coord(axis)


def const(v) -> Expr:
    return Const(v)


# ---------------------------------------------------------------------------
# finite-difference oracle


def fd_diff(e: Expr, axis: int, pt: Sequence[float], h: float = 1e-3) -> complex:
    """4th-order central difference; independent cross-check for ``diff``."""
    if h <= 0:
        raise DomainError("step must be positive")
    f = e.fn()

    def at(delta: float) -> complex:
        shifted = list(pt)
        shifted[axis] += delta
        return f(shifted)

    return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h)


# ---------------------------------------------------------------------------
# sample sets

SamplePoint = tuple


@dataclass(frozen=True)
class SampleSet:
    """Deterministic collection of sample points on a chart domain.

    ``kind`` is "grid" (tensor grid, ``counts`` points per axis) or
    "random" (uniform box, ``count`` draws from a seeded generator).
    ``exclude`` skips points (e.g. metric singularities); skipped points
    are counted by the caller.
    """

    kind: str
    bounds: tuple  # ((lo, hi), ...) per axis
    counts: tuple = ()  # grid: per-axis point counts
    count: int = 0  # random: number of draws
    seed: int = 0
    exclude: Optional[Callable[[tuple], bool]] = field(default=None, compare=False)

    @staticmethod
    def grid(bounds: Iterable, points_per_axis) -> "SampleSet":
        bounds = tuple((float(a), float(b)) for a, b in bounds)
        if isinstance(points_per_axis, int):
            counts = (points_per_axis,) * len(bounds)
        else:
            counts = tuple(int(k) for k in points_per_axis)
        if any(k < 1 for k in counts):
            raise DomainError("grid needs at least one point per axis")
        return SampleSet(kind="grid", bounds=bounds, counts=counts)

    @staticmethod
    def random_box(bounds: Iterable, count: int, seed: int) -> "SampleSet":
        bounds = tuple((float(a), float(b)) for a, b in bounds)
        if count < 1:
            raise DomainError("sample count must be >= 1")
        return SampleSet(kind="random", bounds=bounds, count=int(count), seed=int(seed))

    def with_exclusion(self, pred: Callable[[tuple], bool]) -> "SampleSet":
        return SampleSet(self.kind, self.bounds, self.counts, self.count, self.seed, pred)

    @property
    def requested(self) -> int:
        if self.kind == "grid":
            n = 1
            for k in self.counts:
                n *= k
            return n
        return self.count

    def points(self) -> Iterator[tuple]:
        """All points in a fixed, seed-deterministic order (pre-exclusion)."""
        if self.kind == "grid":
            axes = []
            for (lo, hi), k in zip(self.bounds, self.counts):
                if k == 1:
                    axes.append([0.5 * (lo + hi)])
                else:
                    step = (hi - lo) / (k - 1)
                    axes.append([lo + i * step for i in range(k)])
            import itertools

            yield from itertools.product(*axes)
        else:
            import numpy as np

            rng = np.random.default_rng(self.seed)
            lows = np.array([b[0] for b in self.bounds])
            highs = np.array([b[1] for b in self.bounds])
            draws = rng.uniform(lows, highs, size=(self.count, len(self.bounds)))
            for row in draws:
                yield tuple(float(v) for v in row)

    def describe(self) -> dict:
        d = {"kind": self.kind, "bounds": [list(b) for b in self.bounds]}
        if self.kind == "grid":
            d["counts"] = list(self.counts)
        else:
            d["count"] = self.count
            d["seed"] = self.seed
        return d
