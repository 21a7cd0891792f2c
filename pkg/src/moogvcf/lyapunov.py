"""Lyapunov candidates, their decay rates, and definiteness certification.

Three candidate energies are implemented: the plain quadratic 0.5*x'x, the
scaled quadratic 0.5*w'w, and the saturation energy built from log-cosh
stage potentials whose gradient is exactly the saturation vector z.  A
matrix family is certified negative (semi)definite through the eigenvalues
of its omega0-normalized symmetrization, computed by a cyclic Jacobi
rotation solver.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import model
from .model import FilterParams

_SQRT2 = math.sqrt(2.0)
_LN2 = math.log(2.0)


def log_cosh(u: float) -> float:
    """ln(cosh(u)) without overflow: |u| + log1p(exp(-2|u|)) - ln 2."""
    a = abs(float(u))
    return a + math.log1p(math.exp(-2.0 * a)) - _LN2


def log_cosh_diff(a: float, h: float) -> float:
    """ln(cosh(a+h)) - ln(cosh(a)), stable across step sizes.

    For |h| <= 1 uses cosh(a+h)/cosh(a) = cosh(h) + sinh(h) tanh(a), i.e.
    log1p(2 sinh(h/2)^2 + sinh(h) tanh(a)), which avoids cancelling the
    large log-cosh values; the ratio stays well above -1 there.  For larger
    h the two exponential-like terms of the ratio can cancel instead, so
    the direct difference (then benign) is used.
    """
    if abs(h) <= 1.0:
        sh = math.sinh(0.5 * h)
        return math.log1p(2.0 * sh * sh + math.sinh(h) * math.tanh(a))
    return log_cosh(a + h) - log_cosh(a)


def V_quadratic_x(x) -> float:
    """Stored-energy quadratic 0.5 * x'x."""
    v = np.asarray(x, dtype=float)
    return 0.5 * float(v @ v)


def V_quadratic_w(w) -> float:
    """Scaled quadratic 0.5 * w'w = 0.5 * x' D^2 x."""
    v = np.asarray(w, dtype=float)
    return 0.5 * float(v @ v)


def V_nonlinear(w, p: FilterParams) -> float:
    """Saturation energy in scaled coordinates (requires r > 0).

    V(w) = lncosh(w1) + d^2 lncosh(w2/d) + d^4 lncosh(w3/d^2)
           + (d^2/(4r)) lncosh(4r * w4/d^3)

    Zero at the origin, positive elsewhere, radially unbounded.
    """
    if p.r == 0.0:
        raise ValueError("V_nonlinear undefined for r=0; use V_zero_feedback")
    w1, w2, w3, w4 = (float(v) for v in w)
    d = p.d
    d2 = d * d
    d3 = d2 * d
    a4 = p.feedback_gain
    return (
        log_cosh(w1)
        + d2 * log_cosh(w2 / d)
        + d2 * d2 * log_cosh(w3 / d2)
        + (d2 / a4) * log_cosh(a4 * w4 / d3)
    )


def V_zero_feedback(w) -> float:
    """Feedback-free energy sum(lncosh(w_i)); the r = 0 branch (d = 1)."""
    return sum(log_cosh(float(v)) for v in w)


def grad_V(w, p: FilterParams) -> np.ndarray:
    """Gradient of V_nonlinear with respect to w; identically the
    saturation vector z (same code path)."""
    if p.r == 0.0:
        raise ValueError("grad_V undefined for r=0; use tanh(w) on that branch")
    return model.saturation_vector(w, p)


def Vdot_nonlinear(w, p: FilterParams) -> float:
    """Decay rate of V_nonlinear along the flow: omega0 * z' sym(Q) z
    with the feedback ratio evaluated at w4."""
    if p.r == 0.0:
        raise ValueError("Vdot_nonlinear undefined for r=0; use Vdot_zero_feedback")
    z1, z2, z3, z4 = model.saturation_vector(w, p)
    g = model.feedback_ratio(float(w[3]), p)
    d = p.d
    return p.omega0 * (
        -z1 * z1 - z2 * z2 - z3 * z3 - g * z4 * z4
        + d * (z1 * z2 + z2 * z3 + z3 * z4 - z1 * z4)
    )


def Vdot_zero_feedback(w, p: FilterParams) -> float:
    """Decay rate of the feedback-free energy along the r = 0 cascade."""
    t1, t2, t3, t4 = (math.tanh(float(v)) for v in w)
    return p.omega0 * (
        -t1 * t1 - t2 * t2 - t3 * t3 - t4 * t4 + t1 * t2 + t2 * t3 + t3 * t4
    )


def lyapunov_value(w, p: FilterParams) -> float:
    """Branch-aware energy: saturation energy for r > 0, feedback-free sum
    for r = 0."""
    if p.r == 0.0:
        return V_zero_feedback(w)
    return V_nonlinear(w, p)


def lyapunov_rate(w, p: FilterParams) -> float:
    """Branch-aware decay rate matching lyapunov_value."""
    if p.r == 0.0:
        return Vdot_zero_feedback(w, p)
    return Vdot_nonlinear(w, p)


class LyapunovKind(Enum):
    """The three candidate energies.  LOG_COSH needs r > 0 unless the
    feedback-free branch is taken."""

    QUADRATIC_X = "QuadraticX"
    QUADRATIC_W = "QuadraticW"
    LOG_COSH = "LogCosh"


def candidate_value(kind: LyapunovKind, state, p: FilterParams) -> float:
    """Evaluate one candidate energy.

    QUADRATIC_X takes the state in x coordinates; the other two take w.
    LOG_COSH dispatches to the feedback-free sum when r = 0.
    """
    if kind is LyapunovKind.QUADRATIC_X:
        return V_quadratic_x(state)
    if kind is LyapunovKind.QUADRATIC_W:
        return V_quadratic_w(state)
    if kind is LyapunovKind.LOG_COSH:
        return lyapunov_value(state, p)
    raise ValueError(f"unknown Lyapunov kind {kind!r}")


def symmetrize(M) -> np.ndarray:
    """0.5 * (M + M'); idempotent on symmetric input."""
    A = np.asarray(M, dtype=float)
    return 0.5 * (A + A.T)


def sym_eigvals(M, tol: float = 1e-10) -> np.ndarray:
    """Eigenvalues of a symmetric 4x4 matrix, ascending.

    Cyclic Jacobi rotations, iterated until the off-diagonal Frobenius norm
    falls below 1e-14 * max(1, ||M||_F); convergence is guaranteed for
    symmetric input.  Rejects matrices with ||M - M'||_inf >= tol.
    """
    A = np.array(M, dtype=float)
    if A.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {A.shape}")
    if np.abs(A - A.T).max() >= tol:
        raise ValueError("matrix is not symmetric within tolerance")
    A = 0.5 * (A + A.T)
    scale = max(1.0, float(np.linalg.norm(A)))
    target = 1e-14 * scale
    for _ in range(60):
        off = math.sqrt(sum(A[i, j] ** 2 for i in range(4) for j in range(4) if i != j))
        if off <= target:
            break
        for i in range(3):
            for j in range(i + 1, 4):
                if A[i, j] == 0.0:
                    continue
                theta = 0.5 * math.atan2(2.0 * A[i, j], A[j, j] - A[i, i])
                c, s = math.cos(theta), math.sin(theta)
                rot = np.eye(4)
                rot[i, i] = c
                rot[j, j] = c
                rot[i, j] = s
                rot[j, i] = -s
                A = rot.T @ A @ rot
                A = 0.5 * (A + A.T)
    return np.sort(np.diag(A))


def structure_max_eigenvalue(corner: float) -> float:
    """Largest eigenvalue of coupling_structure(f):
    max(sqrt(2), (f + sqrt(f^2 + 8)) / 2)."""
    f = float(corner)
    return max(_SQRT2, 0.5 * (f + math.sqrt(f * f + 8.0)))


class Verdict(Enum):
    NEGATIVE_DEFINITE = "NegativeDefinite"
    NEGATIVE_SEMIDEFINITE = "NegativeSemidefinite"
    INDEFINITE = "Indefinite"


class MatrixFamily(Enum):
    AS = "As"
    BS = "Bs"
    QS_WORST_CASE = "QsWorstCase"


@dataclass(frozen=True)
class CertificateReport:
    """Definiteness verdict for one matrix family at one parameter point.

    Eigenvalues are of the omega0-normalized symmetrized family member, so
    the verdict tolerance is scale-free (omega0 > 0 cannot change
    definiteness).
    """

    omega0: float
    r: float
    family: MatrixFamily
    min_eig: float
    max_eig: float
    verdict: Verdict
    tol: float


def _verdict_from_max_eig(max_eig: float, tol: float) -> Verdict:
    if max_eig < -tol:
        return Verdict.NEGATIVE_DEFINITE
    if abs(max_eig) <= tol:
        return Verdict.NEGATIVE_SEMIDEFINITE
    return Verdict.INDEFINITE


def _normalized_family_matrix(family: MatrixFamily, r: float) -> np.ndarray:
    """Symmetrized family member at resonance r, divided by omega0.

    Accepts r slightly above 1 so threshold bisection can bracket the
    boundary of the valid range.
    """
    p = model._derive(1.0, r)
    if family is MatrixFamily.AS:
        return symmetrize(model.linearized_matrix(p))
    if family is MatrixFamily.BS:
        return symmetrize(model.scaled_linearized_matrix(p))
    if family is MatrixFamily.QS_WORST_CASE:
        if r == 0.0:
            raise ValueError("QsWorstCase certification undefined for r=0")
        g_lo, _ = model.feedback_ratio_bounds(p)
        return symmetrize(model.coupling_matrix(p, g_lo))
    raise ValueError(f"unknown family {family!r}")


def certify(family: MatrixFamily, p: FilterParams, tol: float = 1e-10) -> CertificateReport:
    """Definiteness certificate for one family at parameters p.

    For QsWorstCase the coupling matrix is evaluated at the smallest
    attainable feedback ratio; since the ratio only enters the (4,4) entry
    with a minus sign, a negative-definite verdict there covers every
    attainable ratio (larger ratios subtract a positive rank-one term).
    """
    eigs = sym_eigvals(_normalized_family_matrix(family, p.r), tol=1e-8)
    max_eig = float(eigs[-1])
    return CertificateReport(
        omega0=p.omega0,
        r=p.r,
        family=family,
        min_eig=float(eigs[0]),
        max_eig=max_eig,
        verdict=_verdict_from_max_eig(max_eig, tol),
        tol=tol,
    )


def definiteness_threshold(
    family: MatrixFamily,
    r_lo: float,
    r_hi: float,
    tol: float = 1e-8,
    verdict_tol: float = 1e-10,
) -> float:
    """Bisect the resonance at which the family stops being negative
    definite (max eigenvalue crosses -verdict_tol).

    Requires the definiteness predicate to differ at r_lo and r_hi; r_hi may
    sit slightly above 1 to bracket a boundary at r = 1 itself.
    """
    if not (0.0 <= r_lo < r_hi):
        raise ValueError(f"need 0 <= r_lo < r_hi, got ({r_lo}, {r_hi})")

    def is_definite(r: float) -> bool:
        eigs = sym_eigvals(_normalized_family_matrix(family, r), tol=1e-8)
        return float(eigs[-1]) < -verdict_tol

    lo_def = is_definite(r_lo)
    if lo_def == is_definite(r_hi):
        raise ValueError(
            f"no definiteness change for {family.value} on [{r_lo}, {r_hi}]"
        )
    lo, hi = float(r_lo), float(r_hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_definite(mid) == lo_def:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
