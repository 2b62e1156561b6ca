"""Canonical degree-9 slow-fast vector-field family and its critical-manifold geometry.

The fast nullcline is y = F(x, z) with F a fixed degree-9 polynomial whose
coefficients are linear in z and stored as exact rationals. The slow drift is
g1 = J(x) = 1/2 - x and g2 = delta*G(x) + (z - z0)*H(x), where G and H are
built from a weight function rho and the accumulated integral
Q(x) = int_0^x rho(s) F_s(s, z0) ds.

Two rho families are supported: Quadratic rho(x) = p + x + q x^2, and the
fixed rational rho whose reciprocal is a specific quartic. For both, the
product rho * F_x(., 0) reduces to a polynomial (exactly, for the fixed
rational choice), so Q has a closed polynomial form; an adaptive-quadrature
evaluator is kept alongside as an independent oracle and fallback.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import (
    DomainError,
    FoldPointEvaluation,
    GeometryFailure,
    QuadratureFailure,
)

X_MIN, X_MAX = -3.0, 2.0
FOLD_TOL = 1e-12
_QUAD_ABS_TOL = 1e-12

# --- exact coefficients of F(x, z) = sum_k (C_k + D_k z) x^k -----------------

_C = [Fraction(0)] * 10
_D = [Fraction(0)] * 10
_C[9] = Fraction(184180, 67741437)
_C[8] = Fraction(3558512, 22580479 * 8)
_D[8] = Fraction(138135, 90321916 * 8)
_C[7] = Fraction(212863, 22580479 * 7)
_D[7] = Fraction(751493, 90321916 * 7)
_C[6] = -Fraction(23361467, 22580479 * 6)
_D[6] = -Fraction(2793109, 361287664 * 6)
_C[5] = -Fraction(1224990, 22580479 * 5)
_D[5] = -Fraction(10284179, 180643832 * 5)
_C[4] = Fraction(64963913, 22580479 * 4)
_D[4] = Fraction(2417921, 45160958 * 4)
_C[3] = Fraction(459587, 22580479 * 3)
_D[3] = Fraction(45620545, 361287664 * 3)
_C[2] = -Fraction(1)
_D[2] = -Fraction(1, 16)

_CF = np.array([float(c) for c in _C])
_DF = np.array([float(d) for d in _D])

# reciprocal of the fixed rational rho, exact quartic coefficients (descending)
_RHO_DEN_EXACT = [
    Fraction(552540, 22580479),
    Fraction(2453432, 22580479),
    Fraction(-4141461, 22580479),
    Fraction(-11520033, 22580479),
    Fraction(1),
]
_RHO_DEN = np.array([float(c) for c in _RHO_DEN_EXACT])


def eval_F(x, z):
    """F(x, z) by Horner's scheme; accepts scalars or arrays."""
    acc = np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
    for k in range(9, 1, -1):
        acc = (acc + (_CF[k] + _DF[k] * z)) * x
    return acc * x


def eval_Fx(x, z):
    """Analytic dF/dx."""
    acc = np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
    for k in range(9, 1, -1):
        acc = acc * x + k * (_CF[k] + _DF[k] * z)
    return acc * x


def eval_Fxx(x, z):
    acc = np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
    for k in range(9, 2, -1):
        acc = acc * x + k * (k - 1) * (_CF[k] + _DF[k] * z)
    return acc * x + 2.0 * (_CF[2] + _DF[2] * z)


def eval_Fz(x, z):
    acc = np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
    for k in range(9, 1, -1):
        acc = (acc + _DF[k]) * x
    return acc * x


def eval_Fxz(x, z):
    acc = np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
    for k in range(9, 1, -1):
        acc = acc * x + k * _DF[k]
    return acc * x


def eval_J(x):
    return 0.5 - x


# --- rho specification -------------------------------------------------------


@dataclass(frozen=True)
class RhoSpec:
    """Weight function: either rho = p + x + q x^2 or the fixed rational choice."""

    variant: str  # "quadratic" | "fixed_rational"
    p: float | None = None
    q: float | None = None

    def __post_init__(self):
        if self.variant == "quadratic":
            if self.p is None or self.q is None:
                raise DomainError("quadratic rho needs p and q")
            self._check_nonzero_on_interval(np.array([self.q, 1.0, self.p]), "rho")
        elif self.variant == "fixed_rational":
            if self.p is not None or self.q is not None:
                raise DomainError("fixed_rational rho takes no (p, q)")
            # rho is the reciprocal of a quartic, hence never zero; its pole
            # at the quartic's real root left of the folds cancels against a
            # root of F_x in every product this package evaluates.
        else:
            raise DomainError(f"unknown rho variant {self.variant!r}")

    @staticmethod
    def _check_nonzero_on_interval(poly: np.ndarray, name: str) -> None:
        # dense sampling plus explicit root check on the working interval
        xs = np.linspace(X_MIN, X_MAX, 2001)
        vals = np.polyval(poly, xs)
        roots = np.roots(poly) if len(poly) > 1 else np.array([])
        real = roots[np.abs(roots.imag) < 1e-10].real
        bad = real[(real >= X_MIN - 1e-9) & (real <= X_MAX + 1e-9)]
        if np.any(vals == 0.0) or bad.size:
            raise DomainError(f"{name} vanishes on [{X_MIN}, {X_MAX}]")

    def rho(self, x):
        if self.variant == "quadratic":
            return self.p + x + self.q * x * x
        return 1.0 / np.polyval(_RHO_DEN, x)

    def drho(self, x):
        """d(rho)/dx, needed for analytic Jacobians of the slow drift."""
        if self.variant == "quadratic":
            return 1.0 + 2.0 * self.q * x
        den = np.polyval(_RHO_DEN, x)
        return -np.polyval(np.polyder(_RHO_DEN), x) / (den * den)

    def to_json_obj(self):
        if self.variant == "quadratic":
            return {"quadratic": {"p": self.p, "q": self.q}}
        return "fixed_rational"

    @classmethod
    def from_json_obj(cls, obj) -> "RhoSpec":
        if obj == "fixed_rational":
            return cls("fixed_rational")
        if isinstance(obj, dict) and "quadratic" in obj:
            return cls("quadratic", p=float(obj["quadratic"]["p"]), q=float(obj["quadratic"]["q"]))
        raise DomainError(f"unrecognized rho specification {obj!r}")


QUADRATIC = "quadratic"
FIXED_RATIONAL = "fixed_rational"

_w_poly_cache: dict[RhoSpec, np.ndarray | None] = {}
_w_poly_lock = threading.Lock()


def _rho_fx_polynomial(rho: RhoSpec) -> np.ndarray | None:
    """Polynomial coefficients (descending) of rho(x) * F_x(x, 0), if exact.

    For quadratic rho the product is trivially polynomial. For the fixed
    rational rho, F_x(., 0) is divisible by 1/rho in exact arithmetic; a
    nonzero remainder (never hit for the paper's F) returns None and sends
    callers down the quadrature path.
    """
    with _w_poly_lock:
        if rho in _w_poly_cache:
            return _w_poly_cache[rho]
    fx_desc = [Fraction(k) * _C[k] for k in range(9, 0, -1)]  # F_x(., 0), descending x^8..x^0
    if rho.variant == "quadratic":
        rho_desc = [Fraction(rho.q).limit_denominator(10**15), Fraction(1), Fraction(rho.p).limit_denominator(10**15)]
        prod = _poly_mul(rho_desc, fx_desc)
        out = np.array([float(c) for c in prod])
    else:
        quot, rem = _poly_divmod(fx_desc, _RHO_DEN_EXACT)
        out = None if any(rem) else np.array([float(c) for c in quot])
    with _w_poly_lock:
        _w_poly_cache[rho] = out
    return out


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return out


def _poly_divmod(num, den):
    num = list(num)
    out = []
    for i in range(len(num) - len(den) + 1):
        c = num[i] / den[0]
        out.append(c)
        for j, d in enumerate(den):
            num[i + j] -= c * d
    return out, num[len(out):]


def q_polynomial(rho: RhoSpec) -> np.ndarray | None:
    """Descending coefficients of Q(x) = int_0^x rho F_s, when closed form exists."""
    w = _rho_fx_polynomial(rho)
    if w is None:
        return None
    return np.polyint(w)  # constant term 0: Q(0) = 0


# --- canonical parameters ----------------------------------------------------


@dataclass(frozen=True)
class CanonicalParams:
    """Parameters (alpha, beta, kappa, lambda) plus the rho choice; z0 is fixed at 0."""

    alpha: float
    beta: float
    kappa: float
    lam: float
    rho: RhoSpec
    z0: float = 0.0

    def to_json(self) -> str:
        return json.dumps(
            {
                "alpha": self.alpha,
                "beta": self.beta,
                "kappa": self.kappa,
                "lambda": self.lam,
                "rho": self.rho.to_json_obj(),
                "z0": self.z0,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "CanonicalParams":
        obj = json.loads(text)
        return cls(
            alpha=float(obj["alpha"]),
            beta=float(obj["beta"]),
            kappa=float(obj["kappa"]),
            lam=float(obj["lambda"]),
            rho=RhoSpec.from_json_obj(obj["rho"]),
            z0=float(obj.get("z0", 0.0)),
        )


def eval_Q(params: CanonicalParams, x):
    """Q(x) via the polynomial fast path, falling back to adaptive quadrature."""
    qp = q_polynomial(params.rho)
    if qp is not None:
        return np.polyval(qp, x)
    return eval_Q_quadrature(params, x)


def eval_Q_quadrature(params: CanonicalParams, x: float) -> float:
    """Q(x) by adaptive quadrature; the independent oracle for the closed form."""
    z0 = params.z0
    rho = params.rho

    def integrand(s):
        return rho.rho(s) * eval_Fx(s, z0)

    val, err = quad(integrand, 0.0, float(x), epsabs=_QUAD_ABS_TOL, epsrel=1e-12, limit=10_000)
    if err > max(_QUAD_ABS_TOL * 10.0, 1e-10 * abs(val)):
        raise QuadratureFailure(f"Q({x}): error estimate {err:.2e} above tolerance")
    return val


def eval_P(params: CanonicalParams, x):
    """P(x) = alpha*Q^2/2 + beta*Q, the antiderivative of p(x)."""
    Qx = eval_Q(params, x)
    return params.alpha * Qx * Qx / 2.0 + params.beta * Qx


def eval_G(params: CanonicalParams, x):
    Qx = eval_Q(params, x)
    return (
        (params.kappa + params.lam * (params.alpha * Qx * Qx / 2.0 + params.beta * Qx))
        * (params.alpha * Qx + params.beta)
        * params.rho.rho(x)
        * eval_J(x)
    )


def eval_H(params: CanonicalParams, x):
    Qx = eval_Q(params, x)
    return params.rho.rho(x) * (params.alpha * Qx + params.beta) * eval_J(x)


def eval_pq(params: CanonicalParams, x: float) -> tuple[float, float]:
    """Coefficients of the segment equation dZ/dx = p(x) Z + q(x).

    The g1 = J factor cancels between G, H and the slow drift, leaving
    p = rho*(alpha Q + beta)*F_x and q = (kappa + lambda P)*rho*(alpha Q + beta)*F_x.
    """
    fx = eval_Fx(x, params.z0)
    if abs(fx) < FOLD_TOL:
        raise FoldPointEvaluation(f"F_x vanishes at x = {x}")
    Qx = eval_Q(params, x)
    lin = params.alpha * Qx + params.beta
    r = params.rho.rho(x)
    p = r * lin * fx
    q = (params.kappa + params.lam * (params.alpha * Qx * Qx / 2.0 + params.beta * Qx)) * lin * r * fx
    return p, q


def eval_vector_field(
    params: CanonicalParams, x: float, y: float, z: float, eps: float, delta: float
) -> tuple[float, float, float]:
    """Fast-time right-hand side (x', y', z')."""
    if eps < 0.0 or delta < 0.0:
        raise DomainError("eps and delta must be nonnegative")
    dx = y - eval_F(x, z)
    dy = eps * eval_J(x)
    dz = eps * (delta * eval_G(params, x) + (z - params.z0) * eval_H(params, x))
    return dx, dy, dz


# --- critical-manifold geometry ----------------------------------------------


@dataclass(frozen=True)
class ManifoldGeometry:
    """Fold abscissas x1 < x2 < x3 < x4, their heights, and projection abscissas."""

    x1: float
    x2: float
    x3: float
    x4: float
    xhat1: float
    xhat3: float
    xhat4: float
    y1: float
    y2: float
    y3: float
    y4: float

    @property
    def folds(self) -> tuple[float, float, float, float]:
        return (self.x1, self.x2, self.x3, self.x4)

    @property
    def lao_threshold(self) -> float:
        """Midpoint of xhat4 and x2; LAO cycles fall left of it, SAO cycles never do."""
        return 0.5 * (self.xhat4 + self.x2)


_geometry_cache: dict[float, ManifoldGeometry] = {}
_geometry_lock = threading.Lock()


def compute_geometry(params: CanonicalParams, scan_step: float = 1e-3) -> ManifoldGeometry:
    """Extract folds and projections of F(., z0) on the working interval.

    F_x(., 0) has five simple real roots in [-3, 2]; the Bactrian profile is
    carried by the four rightmost, and the extra root brackets the xhat4
    search from the left.
    """
    z0 = params.z0
    with _geometry_lock:
        cached = _geometry_cache.get(z0)
    if cached is not None:
        return cached

    xs = np.arange(X_MIN, X_MAX + scan_step, scan_step)
    vals = eval_Fx(xs, z0)
    roots = []
    for i in range(len(xs) - 1):
        if vals[i] == 0.0:
            roots.append(xs[i])
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(brentq(lambda x: eval_Fx(x, z0), xs[i], xs[i + 1], xtol=1e-14, rtol=1e-15))
    if len(roots) < 4:
        raise GeometryFailure(f"found only {len(roots)} fold candidates in [{X_MIN}, {X_MAX}]")
    roots = sorted(roots)
    x1, x2, x3, x4 = roots[-4:]
    left_bracket = roots[-5] if len(roots) >= 5 else X_MIN

    for xi in (x1, x2, x3, x4):
        if abs(eval_Fxx(xi, z0)) < 1e-8:
            raise GeometryFailure(f"degenerate fold at x = {xi}")
    # attracting/repelling alternation: F_x > 0 left of x1, < 0 on (x1, x2), ...
    probes = [0.5 * (left_bracket + x1), 0.5 * (x1 + x2), 0.5 * (x2 + x3), 0.5 * (x3 + x4), 0.5 * (x4 + X_MAX)]
    signs = [np.sign(eval_Fx(p, z0)) for p in probes]
    if signs != [1.0, -1.0, 1.0, -1.0, 1.0]:
        raise GeometryFailure("fold candidates do not alternate attracting/repelling sheets")

    y1, y2, y3, y4 = (eval_F(xi, z0) for xi in (x1, x2, x3, x4))

    def project(target_y: float, lo: float, hi: float, label: str) -> float:
        f = lambda x: eval_F(x, z0) - target_y
        a, b = lo + 1e-9, hi - 1e-9
        if f(a) * f(b) > 0.0:
            raise GeometryFailure(f"no projection {label} in ({lo}, {hi})")
        return brentq(f, a, b, xtol=1e-14, rtol=1e-15)

    xhat4 = project(y4, left_bracket, x1, "xhat4")
    xhat3 = project(y3, x4, X_MAX, "xhat3")
    xhat1 = project(y1, x4, X_MAX, "xhat1")

    geom = ManifoldGeometry(x1, x2, x3, x4, xhat1, xhat3, xhat4, y1, y2, y3, y4)
    with _geometry_lock:
        _geometry_cache[z0] = geom
    return geom
