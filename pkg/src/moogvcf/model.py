"""Nonlinear four-stage ladder filter model and its scaled-coordinate algebra.

State convention: ``x`` is the 4-vector of nondimensionalized capacitor
voltages of the ladder, ``w = D x`` its diagonally rescaled image with
``D = diag(1, d, d^2, d^3)``.  All matrices are dense 4x4 float arrays;
the system is exactly four-dimensional, so no general-N machinery is used.
"""

import math
from dataclasses import dataclass

import numpy as np

ALPHA_MAX = math.sqrt(2.0)

# Below this magnitude of the feedback tanh argument the damping/feedback
# ratio is evaluated by its small-argument limit.  The threshold only has to
# guard the 0/0 case and denormal division; the direct ratio is accurate to
# a few ulp everywhere else because numerator and denominator share sign.
_RATIO_LIMIT_CUTOFF = 1e-285


class ParameterRangeError(ValueError):
    """A filter parameter is outside its allowed range."""

    def __init__(self, field: str, value, allowed: str):
        self.field = field
        self.value = value
        super().__init__(f"{field}={value!r} outside allowed range {allowed}")


@dataclass(frozen=True)
class FilterParams:
    """Cutoff/resonance pair plus the derived gain and scaling base.

    omega0: angular cutoff frequency in rad/s, > 0.
    r:      resonance in [0, 1].
    alpha:  per-stage feedback gain base, sqrt(2) * r**(1/4), in [0, sqrt(2)].
    d:      diagonal scaling base, max(1, alpha).

    The fed-back state is multiplied by alpha**4 = 4*r; formulas use 4*r
    directly since it is exact in floating point.
    """

    omega0: float
    r: float
    alpha: float
    d: float

    @property
    def feedback_gain(self) -> float:
        """alpha**4, represented exactly as 4*r."""
        return 4.0 * self.r


def _derive(omega0: float, r: float) -> FilterParams:
    # No range validation: the definiteness bisection probes r slightly
    # beyond 1.  Public construction goes through make_params.
    alpha = ALPHA_MAX * r ** 0.25
    return FilterParams(omega0=float(omega0), r=float(r), alpha=alpha, d=max(1.0, alpha))


def make_params(omega0: float, r: float) -> FilterParams:
    """Validate (omega0, r) and derive alpha and d.

    Raises ParameterRangeError naming the offending field if omega0 <= 0
    or r lies outside [0, 1].
    """
    if not (omega0 > 0.0) or math.isinf(omega0):
        raise ParameterRangeError("omega0", omega0, "(0, inf)")
    if not (0.0 <= r <= 1.0):
        raise ParameterRangeError("r", r, "[0, 1]")
    return _derive(omega0, r)


def rhs_nonlinear(x, p: FilterParams) -> np.ndarray:
    """Autonomous vector field dx/dt of the four-stage ladder.

    dx/dt = omega0 * [-tanh(x1) - tanh(4r * x4),
                      -tanh(x2) + tanh(x1),
                      -tanh(x3) + tanh(x2),
                      -tanh(x4) + tanh(x3)]
    """
    x1, x2, x3, x4 = (float(v) for v in x)
    t1, t2, t3, t4 = math.tanh(x1), math.tanh(x2), math.tanh(x3), math.tanh(x4)
    fb = math.tanh(p.feedback_gain * x4)
    w0 = p.omega0
    return np.array([
        w0 * (-t1 - fb),
        w0 * (-t2 + t1),
        w0 * (-t3 + t2),
        w0 * (-t4 + t3),
    ])


def rhs_scaled(w, p: FilterParams) -> np.ndarray:
    """Vector field dw/dt in scaled coordinates w = D x.

    Identical to D @ rhs_nonlinear(D^-1 w, p), written out stage by stage.
    """
    w1, w2, w3, w4 = (float(v) for v in w)
    d = p.d
    t1 = math.tanh(w1)
    t2 = math.tanh(w2 / d)
    t3 = math.tanh(w3 / (d * d))
    t4 = math.tanh(w4 / (d * d * d))
    fb = math.tanh(p.feedback_gain * w4 / (d * d * d))
    w0 = p.omega0
    return np.array([
        w0 * (-t1 - fb),
        w0 * d * (-t2 + t1),
        w0 * d * d * (-t3 + t2),
        w0 * d * d * d * (-t4 + t3),
    ])


def linearized_matrix(p: FilterParams) -> np.ndarray:
    """Jacobian of rhs_nonlinear at the origin (tanh u ~ u)."""
    w0 = p.omega0
    a4 = p.feedback_gain
    return w0 * np.array([
        [-1.0, 0.0, 0.0, -a4],
        [1.0, -1.0, 0.0, 0.0],
        [0.0, 1.0, -1.0, 0.0],
        [0.0, 0.0, 1.0, -1.0],
    ])


def scaled_linearized_matrix(p: FilterParams) -> np.ndarray:
    """Jacobian of the scaled system at the origin, with the alpha scaling.

    Equals D A D^-1 for D built from d = alpha (the linear-analysis choice);
    every off-diagonal gain becomes alpha.
    """
    w0 = p.omega0
    a = p.alpha
    return w0 * np.array([
        [-1.0, 0.0, 0.0, -a],
        [a, -1.0, 0.0, 0.0],
        [0.0, a, -1.0, 0.0],
        [0.0, 0.0, a, -1.0],
    ])


def scaling_matrix(d: float) -> np.ndarray:
    """D = diag(1, d, d^2, d^3) for d > 0."""
    if not d > 0.0:
        raise ParameterRangeError("d", d, "(0, inf)")
    return np.diag([1.0, d, d * d, d * d * d])


def to_scaled(x, d: float) -> np.ndarray:
    """w = D x."""
    if not d > 0.0:
        raise ParameterRangeError("d", d, "(0, inf)")
    x1, x2, x3, x4 = (float(v) for v in x)
    return np.array([x1, d * x2, d * d * x3, d * d * d * x4])


def from_scaled(w, d: float) -> np.ndarray:
    """x = D^-1 w; exact inverse of to_scaled up to rounding."""
    if not d > 0.0:
        raise ParameterRangeError("d", d, "(0, inf)")
    w1, w2, w3, w4 = (float(v) for v in w)
    return np.array([w1, w2 / d, w3 / (d * d), w4 / (d * d * d)])


def saturation_vector(w, p: FilterParams) -> np.ndarray:
    """Scaled stage saturations z(w).

    z = [tanh(w1), d tanh(w2/d), d^2 tanh(w3/d^2), (1/d) tanh(4r * w4/d^3)].
    For r = 0 the fourth component vanishes identically (tanh 0 = 0).
    """
    w1, w2, w3, w4 = (float(v) for v in w)
    d = p.d
    return np.array([
        math.tanh(w1),
        d * math.tanh(w2 / d),
        d * d * math.tanh(w3 / (d * d)),
        (1.0 / d) * math.tanh(p.feedback_gain * w4 / (d * d * d)),
    ])


def feedback_ratio(w4: float, p: FilterParams) -> float:
    """State-dependent ratio g of stage-4 damping to feedback saturation.

    g(w4) = d^4 * tanh(w4/d^3) / tanh(4r * w4/d^3); the removable 0/0 at
    w4 = 0 is filled with the small-argument limit d^4 / (4r).  The value
    always lies between d^4 and d^4/(4r).

    Raises ValueError for r = 0, where the ratio is meaningless (the caller
    must branch to the feedback-free model).
    """
    if p.r == 0.0:
        raise ValueError("feedback_ratio undefined for r=0 (feedback-free branch)")
    d = p.d
    d3 = d * d * d
    u = float(w4) / d3
    a4 = p.feedback_gain
    den_arg = a4 * u
    d4 = d * d3
    if abs(den_arg) < _RATIO_LIMIT_CUTOFF:
        return d4 / a4
    return d4 * math.tanh(u) / math.tanh(den_arg)


def feedback_ratio_bounds(p: FilterParams) -> tuple[float, float]:
    """Closed interval (lo, hi) containing feedback_ratio for every w4."""
    if p.r == 0.0:
        raise ValueError("feedback_ratio undefined for r=0 (feedback-free branch)")
    d4 = p.d ** 4
    other = d4 / p.feedback_gain
    return (min(d4, other), max(d4, other))


def corner_gain(ratio: float, base: float) -> float:
    """Corner parameter f = (2/d)(1 - g) of the symmetrized coupling."""
    return (2.0 / base) * (1.0 - ratio)


def coupling_matrix(p: FilterParams, ratio: float) -> np.ndarray:
    """Coefficient matrix Q with dw/dt = omega0 * Q @ saturation_vector(w).

    Q = [[-1, 0, 0, -d], [d, -1, 0, 0], [0, d, -1, 0], [0, 0, d, -g]]
    where g is the feedback ratio at the current w4.
    """
    d = p.d
    return np.array([
        [-1.0, 0.0, 0.0, -d],
        [d, -1.0, 0.0, 0.0],
        [0.0, d, -1.0, 0.0],
        [0.0, 0.0, d, -float(ratio)],
    ])


def coupling_structure(corner: float) -> np.ndarray:
    """Symmetric structure matrix G with sym(Q) = -I + (d/2) G.

    G = [[0, 1, 0, -1], [1, 0, 1, 0], [0, 1, 0, 1], [-1, 0, 1, f]].
    """
    f = float(corner)
    return np.array([
        [0.0, 1.0, 0.0, -1.0],
        [1.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 1.0],
        [-1.0, 0.0, 1.0, f],
    ])
