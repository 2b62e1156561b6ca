"""Affine maps induced by the slow flow along critical-manifold segments.

Along a normally hyperbolic segment the rescaled slow variable obeys the
linear equation dZ/dx = p(x) Z + q(x), whose exact solution from x_start to
x_end is an affine map in Z. Branch composition of these segment maps yields
the piecewise affine map associated with the vector field.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp

from scipy.integrate import quad

from .errors import DomainError, MethodMismatch, QuadratureFailure
from .family import CanonicalParams, ManifoldGeometry, eval_P, eval_pq
from .pam import PamCoefficients

SHEET_LABELS = ("S_a1", "S_a2", "S_a3")


@dataclass(frozen=True)
class SegmentSpec:
    x_start: float
    x_end: float
    sheet_label: str

    def __post_init__(self):
        if self.sheet_label not in SHEET_LABELS:
            raise DomainError(f"unknown sheet label {self.sheet_label!r}")
        if self.x_start == self.x_end:
            raise DomainError("segment endpoints must differ")


@dataclass(frozen=True)
class AffineMap:
    slope: float
    offset: float

    def __call__(self, Z: float) -> float:
        return self.slope * Z + self.offset


IDENTITY = AffineMap(1.0, 0.0)


def compose(outer: AffineMap, inner: AffineMap) -> AffineMap:
    """outer after inner."""
    return AffineMap(outer.slope * inner.slope, outer.slope * inner.offset + outer.offset)


def segment_affine(
    params: CanonicalParams,
    seg: SegmentSpec,
    method: str = "closed_form",
    check_tol: float = 1e-8,
) -> AffineMap:
    """Affine map of one segment, by closed form or by adaptive quadrature.

    Closed form: with P the antiderivative of p (P = alpha Q^2/2 + beta Q and
    q = (kappa + lambda P) P'), substitution v = P(u) collapses both integrals:

        slope  = exp(vb - va)
        offset = (kappa + lambda (va + 1)) e^{vb - va} - (kappa + lambda (vb + 1))

    with va = P(x_start), vb = P(x_end). method="self_check" computes both
    routes and raises MethodMismatch beyond check_tol relative deviation.
    """
    if method == "closed_form":
        return _segment_closed_form(params, seg)
    if method == "quadrature":
        return _segment_quadrature(params, seg)
    if method == "self_check":
        cf = _segment_closed_form(params, seg)
        qd = _segment_quadrature(params, seg)
        dev = max(
            abs(cf.slope - qd.slope) / max(1.0, abs(qd.slope)),
            abs(cf.offset - qd.offset) / max(1.0, abs(qd.offset)),
        )
        if dev > check_tol:
            raise MethodMismatch(f"closed form deviates from quadrature by {dev:.2e} on {seg}")
        return cf
    raise DomainError(f"unknown method {method!r}")


def _segment_closed_form(params: CanonicalParams, seg: SegmentSpec) -> AffineMap:
    va = eval_P(params, seg.x_start)
    vb = eval_P(params, seg.x_end)
    slope = exp(vb - va)
    ka, la = params.kappa, params.lam
    offset = (ka + la * (va + 1.0)) * slope - (ka + la * (vb + 1.0))
    return AffineMap(slope, offset)


def _segment_quadrature(params: CanonicalParams, seg: SegmentSpec) -> AffineMap:
    xs, xe = seg.x_start, seg.x_end

    def p_of(x):
        return eval_pq(params, x)[0]

    def q_of(x):
        return eval_pq(params, x)[1]

    def integrate(f, a, b):
        val, err = quad(f, a, b, epsabs=1e-12, epsrel=1e-12, limit=500)
        if err > max(1e-10, 1e-9 * abs(val)):
            raise QuadratureFailure(f"segment integral error estimate {err:.2e}")
        return val

    slope = exp(integrate(p_of, xs, xe))

    def offset_integrand(u):
        inner, _ = quad(p_of, u, xe, epsabs=1e-12, epsrel=1e-12, limit=500)
        return q_of(u) * exp(inner)

    offset = integrate(offset_integrand, xs, xe)
    return AffineMap(slope, offset)


def lao_branch(params: CanonicalParams, geom: ManifoldGeometry, method: str = "closed_form") -> AffineMap:
    """Z < 0 branch: S_a1 passage xhat4 -> x1, then S_a3 passage xhat1 -> x4."""
    first = segment_affine(params, SegmentSpec(geom.xhat4, geom.x1, "S_a1"), method)
    second = segment_affine(params, SegmentSpec(geom.xhat1, geom.x4, "S_a3"), method)
    return compose(second, first)


def sao_branch(params: CanonicalParams, geom: ManifoldGeometry, method: str = "closed_form") -> AffineMap:
    """Z > 0 branch: S_a2 passage x2 -> x3, then S_a3 passage xhat3 -> x4."""
    first = segment_affine(params, SegmentSpec(geom.x2, geom.x3, "S_a2"), method)
    second = segment_affine(params, SegmentSpec(geom.xhat3, geom.x4, "S_a3"), method)
    return compose(second, first)


def associated_pam(
    params: CanonicalParams, geom: ManifoldGeometry, method: str = "closed_form"
) -> PamCoefficients:
    """The piecewise affine map associated with the canonical vector field."""
    m1 = lao_branch(params, geom, method)
    m2 = sao_branch(params, geom, method)
    return PamCoefficients(a11=m1.slope, a12=m1.offset, a21=m2.slope, a22=m2.offset)
