"""Bind (Phi, phi; D, sigma, sigma~) into labeled residual fields and
evaluate them over sample sets.

Binding is fully symbolic: the differential operator and both bilinear
maps are expanded into one expression tree per (value label, form
component) at bind time, so evaluation is exhaustive-checked once and
per-point work is pure arithmetic.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .errors import (
    DegreeError,
    EmptySampleSet,
    EvalSingularity,
    SingularMetricError,
    UnknownOperator,
    VarianceError,
)
from .exterior import (
    AlternatingTensor,
    Chart,
    MultiIndex,
    interior,
    metric_pairing,
    musical_tilde,
    wedge,
)
from .scalar import Expr, SampleSet, as_expr
from .valued import PhiMap, ValuedForm, lift_pointwise


def _phi_interior_after_tilde(a: AlternatingTensor, b: AlternatingTensor):
    return interior(musical_tilde(a), b)


def _phi_interior(a: AlternatingTensor, b: AlternatingTensor):
    return interior(a, b)


def _phi_scalar_multiply(a: AlternatingTensor, b: AlternatingTensor):
    if a.degree != 0:
        raise DegreeError("scalar multiplier must be a 0-form")
    return b.scale(a.get(()))


def _phi_metric_pairing(a: AlternatingTensor, b: AlternatingTensor):
    return metric_pairing(a, b)


PHI_FORM = {
    "interior_after_tilde": _phi_interior_after_tilde,
    "interior": _phi_interior,
    "wedge": wedge,
    "scalar_multiply": _phi_scalar_multiply,
    "metric_pairing": _phi_metric_pairing,
}


@dataclass
class GrCondition:
    """A bound, immutable residual condition with labeled components."""

    name: str
    chart: Chart
    entry: str = ""
    # label -> [(form multi-index, residual expression), ...]
    residuals: "OrderedDict[str, List[Tuple[MultiIndex, Expr]]]" = field(
        default_factory=OrderedDict)
    _compiled: dict = field(default_factory=dict, repr=False, compare=False)

    def labels(self) -> List[str]:
        return list(self.residuals.keys())

    def add_valued(self, vf: ValuedForm, prefix: str = "") -> "GrCondition":
        for lab in vf.space.labels:
            t = vf.label_slice(lab)
            key = f"{prefix}{lab}" if (prefix and lab != "1") else (prefix or lab)
            comps = [(idx, as_expr(v)) for idx, v in sorted(t.components.items())]
            self.residuals.setdefault(key, []).extend(comps)
        return self

    def add_exprs(self, items: Sequence[Tuple[str, Expr]]) -> "GrCondition":
        for lab, e in items:
            self.residuals.setdefault(lab, []).append(((), as_expr(e)))
        return self

    def _fns(self, label: str):
        fns = self._compiled.get(label)
        if fns is None:
            fns = [e.fn() for _idx, e in self.residuals[label]]
            self._compiled[label] = fns
        return fns

    def residual(self, pt: Sequence[float]) -> Dict[str, List[complex]]:
        """Labeled residual component values at one sample point."""
        out: Dict[str, List[complex]] = {}
        for label in self.residuals:
            out[label] = [f(pt) for f in self._fns(label)]
        return out


def bind(name: str, chart: Chart, phi_form: str, phi_value: PhiMap,
         operator: Callable[[ValuedForm], ValuedForm],
         sigma, sigma_tilde: ValuedForm,
         rhs: Optional[ValuedForm] = None,
         sigma_rule: str = "given", entry: str = "") -> GrCondition:
    """Assemble Phi(sigma, D sigma~) (x) phi minus rhs into a condition.

    sigma_rule: "given" uses sigma as passed; "same" sets sigma = sigma~
    (autoparallel); "tilde" sets sigma = musical tilde of sigma~ per label.
    Degree and dimension mismatches surface here, not at evaluation.
    """
    try:
        phi_fn = PHI_FORM[phi_form]
    except KeyError:
        raise UnknownOperator(f"unknown form-level map {phi_form!r}") from None
    d_sigma_tilde = operator(sigma_tilde)
    if sigma_rule == "same":
        sigma = sigma_tilde
    elif sigma_rule == "tilde":
        sigma = ValuedForm.from_slices(
            sigma_tilde.space,
            [musical_tilde(s) for s in sigma_tilde.slices()])
    elif sigma_rule != "given":
        raise UnknownOperator(f"unknown sigma rule {sigma_rule!r}")
    result = lift_pointwise(phi_fn, phi_value, sigma, d_sigma_tilde)
    if rhs is not None:
        if rhs.space.labels != result.space.labels:
            raise VarianceError("rhs labels do not match the condition output")
        result = result + rhs.scale(-1.0)
    cond = GrCondition(name=name, chart=chart, entry=entry)
    cond.add_valued(result)
    return cond


@dataclass
class ResidualReport:
    """Per-check verification record."""

    condition: str
    entry: str
    sample: dict
    requested: int
    excluded: int
    evaluated: int
    norms: "OrderedDict[str, dict]"
    tol: float
    passed: bool
    worst_point: Optional[list]

    def to_dict(self) -> dict:
        return {
            "name": self.condition,
            "entry": self.entry,
            "samples": {
                "requested": self.requested,
                "excluded": self.excluded,
                "seed": self.sample.get("seed"),
            },
            "norms": {lab: {"linf": n["linf"], "rms": n["rms"]}
                      for lab, n in self.norms.items()},
            "tol": self.tol,
            "pass": self.passed,
            "worst_point": self.worst_point,
        }

    @property
    def linf(self) -> float:
        return max((n["linf"] for n in self.norms.values()), default=0.0)

    @property
    def rms(self) -> float:
        return max((n["rms"] for n in self.norms.values()), default=0.0)


DEFAULT_TOL = 1e-9


def verify(c: GrCondition, sample: SampleSet, tol: float = DEFAULT_TOL) -> ResidualReport:
    """Evaluate the condition over the sample set and reduce to norms.

    Points hitting evaluation or metric singularities are recorded as
    excluded rather than fatal.  The pass criterion is max-over-labels of
    the L-infinity norm against ``tol``.
    """
    labels = c.labels()
    linf = {lab: 0.0 for lab in labels}
    sumsq = {lab: 0.0 for lab in labels}
    evaluated = 0
    excluded = 0
    worst_point = None
    worst_mag = -1.0
    for pt in sample.points():
        if sample.exclude is not None and sample.exclude(pt):
            excluded += 1
            continue
        try:
            values = c.residual(pt)
        except (EvalSingularity, SingularMetricError):
            excluded += 1
            continue
        evaluated += 1
        point_max = 0.0
        for lab in labels:
            for v in values[lab]:
                m = abs(v)
                if m > linf[lab]:
                    linf[lab] = m
                if m > point_max:
                    point_max = m
                sumsq[lab] += m * m
        if point_max > worst_mag:
            worst_mag = point_max
            worst_point = [float(x) for x in pt]
    if evaluated == 0:
        raise EmptySampleSet(f"no points left for {c.name!r} after exclusions")
    norms = OrderedDict()
    for lab in labels:
        norms[lab] = {"linf": linf[lab], "rms": (sumsq[lab] / evaluated) ** 0.5}
    passed = all(n["linf"] <= tol for n in norms.values())
    return ResidualReport(
        condition=c.name,
        entry=c.entry,
        sample=sample.describe(),
        requested=sample.requested,
        excluded=excluded,
        evaluated=evaluated,
        norms=norms,
        tol=tol,
        passed=passed,
        worst_point=worst_point,
    )
