"""Eigenvalue analysis of the linearized ladder system.

The closed form puts the four eigenvalues at omega0 * (-1 +- r^(1/4)) +-
j * omega0 * r^(1/4) (all four sign combinations).  The numerical oracle
finds roots of the exact characteristic polynomial by Durand-Kerner
simultaneous iteration; when the float64 iteration stalls or the roots
cluster (multiple eigenvalues are infinitely ill-conditioned through the
coefficients) it escalates to high-precision arithmetic on exactly computed
rational coefficients.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import FilterParams


class RootFindingError(RuntimeError):
    """Root iteration failed to converge; carries the last residual."""

    def __init__(self, message: str, residual: float):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e})")


@dataclass(frozen=True)
class Spectrum:
    """Four complex eigenvalues sorted by argument in [0, 2pi) then by
    magnitude, plus the largest real part."""

    eigenvalues: np.ndarray
    max_real_part: float


def _sorted_spectrum(vals) -> Spectrum:
    z = np.asarray(vals, dtype=complex)
    ang = np.mod(np.angle(z), 2.0 * np.pi)
    order = np.lexsort((np.abs(z), ang))
    z = z[order]
    return Spectrum(eigenvalues=z, max_real_part=float(z.real.max()))


def eigvals_closed_form(p: FilterParams) -> Spectrum:
    """Closed-form spectrum of the linearized system.

    The four eigenvalues are -omega0 + omega0 * alpha * exp(j (2k+1) pi/4);
    since alpha cos(pi/4) = r^(1/4) exactly, they are built as
    omega0 * (-1 +- m) +- j * omega0 * m with m = r^(1/4), which keeps the
    maximal real part omega0 * (m - 1) exactly nonpositive for r <= 1.
    """
    m = p.r ** 0.25
    w0 = p.omega0
    re_hi = w0 * (m - 1.0)
    re_lo = w0 * (-m - 1.0)
    im = w0 * m
    return _sorted_spectrum([
        complex(re_hi, im),
        complex(re_lo, im),
        complex(re_lo, -im),
        complex(re_hi, -im),
    ])


def stability_margin(p: FilterParams) -> float:
    """Distance of the rightmost eigenvalue from the imaginary axis:
    omega0 * (1 - r^(1/4)) >= 0 for r <= 1."""
    return p.omega0 * (1.0 - p.r ** 0.25)


def characteristic_coeffs(M) -> list[Fraction]:
    """Monic characteristic polynomial coefficients of a 4x4 matrix,
    computed exactly over the rationals (Faddeev-LeVerrier recursion)."""
    F = [[Fraction(float(M[i][j])) for j in range(4)] for i in range(4)]

    def matmul(A, B):
        return [
            [sum(A[i][k] * B[k][j] for k in range(4)) for j in range(4)]
            for i in range(4)
        ]

    def trace(A):
        return sum(A[i][i] for i in range(4))

    coeffs = [Fraction(1)]
    Mk = F
    coeffs.append(-trace(Mk))
    for k in range(2, 5):
        shifted = [
            [Mk[i][j] + (coeffs[-1] if i == j else 0) for j in range(4)]
            for i in range(4)
        ]
        Mk = matmul(F, shifted)
        coeffs.append(-trace(Mk) / k)
    return coeffs


def _poly_eval(coeffs, z):
    v = coeffs[0]
    for c in coeffs[1:]:
        v = v * z + c
    return v


def _durand_kerner_f64(coeffs, tol, max_iter):
    """Float64 simultaneous iteration.  Returns (roots, converged)."""
    cs = [complex(c) for c in coeffs]
    radius = 1.0 + max(abs(c) for c in cs[1:])
    base = complex(0.4, 0.9)
    roots = [radius ** 0.25 * base ** k for k in range(1, 5)]
    for _ in range(max_iter):
        max_upd = 0.0
        new = []
        for i in range(4):
            den = 1.0 + 0.0j
            for j in range(4):
                if j != i:
                    den *= roots[i] - roots[j]
            upd = _poly_eval(cs, roots[i]) / den
            new.append(roots[i] - upd)
            max_upd = max(max_upd, abs(upd) / (1.0 + abs(roots[i])))
        roots = new
        if max_upd < tol:
            return roots, True
    return roots, False


def _durand_kerner_mp(coeffs, max_iter=600):
    """High-precision iteration on exact rational coefficients; used when
    the float64 path stalls on clustered roots."""
    import mpmath as mp

    with mp.workdps(60):
        cs = [mp.mpf(c.numerator) / mp.mpf(c.denominator) for c in coeffs]
        radius = 1 + max(abs(c) for c in cs[1:])
        base = mp.mpc(0.4, 0.9)
        roots = [radius ** (mp.mpf(1) / 4) * base ** k for k in range(1, 5)]
        tol = mp.mpf("1e-15")
        for _ in range(max_iter):
            max_upd = mp.mpf(0)
            new = []
            for i in range(4):
                den = mp.mpc(1)
                for j in range(4):
                    if j != i:
                        den *= roots[i] - roots[j]
                upd = _poly_eval(cs, roots[i]) / den
                new.append(roots[i] - upd)
                max_upd = max(max_upd, abs(upd) / (1 + abs(roots[i])))
            roots = new
            if max_upd < tol:
                break
        return [complex(r) for r in roots]


def _roots_clustered(roots) -> bool:
    scale = 1.0 + max(abs(r) for r in roots)
    for i in range(4):
        for j in range(i + 1, 4):
            if abs(roots[i] - roots[j]) < 1e-3 * scale:
                return True
    return False


def eigvals_numeric(M, tol: float = 1e-12, max_iter: int = 200) -> Spectrum:
    """Spectrum of a 4x4 matrix via characteristic-polynomial roots.

    Raises RootFindingError carrying the last residual if neither the
    float64 nor the high-precision iteration converges.
    """
    exact = characteristic_coeffs(M)
    cs64 = [float(c) for c in exact]
    roots, converged = _durand_kerner_f64(cs64, tol, max_iter)
    if not converged or _roots_clustered(roots):
        roots = _durand_kerner_mp(exact, max_iter=3 * max_iter)
    # Backward-error residual: |p(root)| relative to sum |c_k| |root|^k.
    worst = 0.0
    for root in roots:
        scale = sum(abs(c) * abs(root) ** (4 - k) for k, c in enumerate(cs64))
        worst = max(worst, abs(_poly_eval(cs64, root)) / max(scale, 1e-300))
    if worst > 1e-10:
        raise RootFindingError("characteristic polynomial roots did not converge", worst)
    return _sorted_spectrum(roots)
