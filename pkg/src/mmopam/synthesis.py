"""Inverse direction: solve for vector-field parameters realizing a target map.

The branch slopes depend on (alpha, beta) only, through a 2x2 linear system in
log-slope space built from Q at the pivot abscissas. With (alpha, beta) fixed,
the branch offsets are affine in (kappa, lambda); that system is assembled by
probing the closed-form offsets at basis points rather than expanding the
symbolic determinant.
"""

from __future__ import annotations

from math import log

import numpy as np

from .errors import DomainError, SingularSystem, SynthesisVerificationFailure
from .family import CanonicalParams, ManifoldGeometry, RhoSpec, compute_geometry, eval_Q
from .pam import PamCoefficients
from .segments import associated_pam

DET_THRESHOLD = 1e-10


def slope_matrix(rho: RhoSpec, geom: ManifoldGeometry) -> np.ndarray:
    """2x2 matrix A with (log a11, log a21) = A @ (alpha, beta)."""
    probe = CanonicalParams(0.0, 0.0, 0.0, 0.0, rho)
    Q = {x: eval_Q(probe, x) for x in (geom.xhat4, geom.x1, geom.x2, geom.x3, geom.x4, geom.xhat3, geom.xhat1)}
    q_h4, q_1, q_2, q_3, q_4, q_h3, q_h1 = (
        Q[geom.xhat4], Q[geom.x1], Q[geom.x2], Q[geom.x3], Q[geom.x4], Q[geom.xhat3], Q[geom.xhat1],
    )
    return np.array(
        [
            [0.5 * (q_1**2 - q_h4**2 + q_4**2 - q_h1**2), q_1 - q_h4 + q_4 - q_h1],
            [0.5 * (q_3**2 - q_2**2 + q_4**2 - q_h3**2), q_3 - q_2 + q_4 - q_h3],
        ]
    )


def solve_alpha_beta(a11: float, a21: float, rho: RhoSpec, geom: ManifoldGeometry) -> tuple[float, float]:
    if a11 <= 0.0 or a21 <= 0.0:
        raise DomainError("branch slopes must be positive")
    A = slope_matrix(rho, geom)
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if abs(det) < DET_THRESHOLD:
        raise SingularSystem(f"slope system determinant {det:.2e} below threshold")
    rhs = np.array([log(a11), log(a21)])
    alpha, beta = np.linalg.solve(A, rhs)
    return float(alpha), float(beta)


def solve_kappa_lambda(
    a12: float,
    a22: float,
    alpha: float,
    beta: float,
    rho: RhoSpec,
    geom: ManifoldGeometry,
) -> tuple[float, float]:
    """Solve the offset system, assembled by probing (kappa, lambda) basis points."""

    def offsets(kappa, lam):
        pam = associated_pam(CanonicalParams(alpha, beta, kappa, lam, rho), geom)
        return np.array([pam.a12, pam.a22])

    base = offsets(0.0, 0.0)
    col_k = offsets(1.0, 0.0) - base
    col_l = offsets(0.0, 1.0) - base
    B = np.column_stack([col_k, col_l])
    det = B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]
    if abs(det) < DET_THRESHOLD:
        raise SingularSystem(f"offset system determinant {det:.2e} below threshold")
    kappa, lam = np.linalg.solve(B, np.array([a12, a22]) - base)
    return float(kappa), float(lam)


def synthesize(
    target: PamCoefficients,
    rho: RhoSpec,
    verify_tol: float = 1e-8,
) -> CanonicalParams:
    """Full pipeline: geometry, (alpha, beta), then (kappa, lambda), with roundtrip check."""
    probe = CanonicalParams(0.0, 0.0, 0.0, 0.0, rho)
    geom = compute_geometry(probe)
    alpha, beta = solve_alpha_beta(target.a11, target.a21, rho, geom)
    kappa, lam = solve_kappa_lambda(target.a12, target.a22, alpha, beta, rho, geom)
    params = CanonicalParams(alpha, beta, kappa, lam, rho)
    got = associated_pam(params, geom)
    dev = max(
        abs(g - t) / max(1.0, abs(t)) for g, t in zip(got.as_tuple(), target.as_tuple())
    )
    if dev > verify_tol:
        raise SynthesisVerificationFailure(
            f"roundtrip residual {dev:.2e} exceeds {verify_tol:.1e} (got {got}, target {target})"
        )
    return params
