"""Closed-form geometry of rotational minimal profile curves.

A profile curve ``(f1(u), f2(u))`` is an arc-length parametrized curve in
the open unit disk with ``f2 > 0``; rotating it by ``S^k x S^l`` produces a
hypersurface of the unit sphere ``S^(n+1)`` with ``n = k + l + 1``.  This
module evaluates every pointwise quantity of that construction: the support
function ``g``, the radial gap ``f``, the turning rate ``K`` forced by
minimality, principal curvatures, the squared shape-operator norm, and the
trace ``n*H`` of the shape operator.

All functions are pure, operate on a single state, and raise
:class:`~rotspec.errors.DomainGuardError` rather than produce non-finite
values, since they sit in the integrator's inner loop.
"""

from dataclasses import dataclass
from math import cos, sin, sqrt

from .errors import DomainGuardError

# The profile ODE is singular on the unit circle and on the rotation axis;
# states closer than these margins are rejected outright.
MIN_RADIAL_GAP_SQ = 1e-12
MIN_AXIS_DISTANCE = 1e-12


@dataclass(frozen=True)
class RotationParams:
    """Integer triple fixing the rotation factors ``S^k x S^l`` and ``n``.

    ``n = k + l + 1`` is the dimension of the generated hypersurface,
    which sits inside ``S^(n+1)``.
    """

    k: int
    l: int
    n: int

    def __post_init__(self):
        if self.k < 1 or self.l < 1:
            raise ValueError(f"k and l must be >= 1, got k={self.k}, l={self.l}")
        if self.n != self.k + self.l + 1:
            raise ValueError(
                f"n must equal k + l + 1, got n={self.n}, k={self.k}, l={self.l}"
            )

    @property
    def equilibrium_radius(self) -> float:
        """Radius sqrt(l/n) of the straight-line (cylinder) solution f2 = const."""
        return sqrt(self.l / self.n)


@dataclass(frozen=True)
class ProfileState:
    """One point of the profile curve: position (f1, f2) and tangent angle.

    The tangent is ``(f1', f2') = (cos(theta), sin(theta))``; valid states
    satisfy ``f2 > 0`` and ``f1**2 + f2**2 < 1``.
    """

    f1: float
    f2: float
    theta: float


@dataclass(frozen=True)
class CurvatureBundle:
    """All pointwise curvature data of the generated hypersurface.

    ``lambda0``, ``lambda_mid``, ``lambda_last`` are the principal
    curvatures with multiplicities ``k``, ``l`` and ``1``; their weighted
    sum is ``nH`` and their weighted square sum is ``shape_norm_sq``.
    """

    f: float            # radial gap sqrt(1 - f1^2 - f2^2), radius of the S^k factor
    g: float            # support function f2*cos(theta) - f1*sin(theta)
    h: float            # sqrt(1 - g^2)
    xi1: float          # tangential position component f1*cos(theta) + f2*sin(theta)
    K: float            # turning rate theta' forced by minimality
    kappa1: float       # curvature -cos(theta)/f2 of the rotated meridian
    lambda0: float
    lambda_mid: float
    lambda_last: float
    shape_norm_sq: float
    nH: float


def _guard(f1: float, f2: float) -> float:
    """Validate a raw state, returning 1 - f1^2 - f2^2."""
    fsq = 1.0 - f1 * f1 - f2 * f2
    if f2 <= MIN_AXIS_DISTANCE:
        raise DomainGuardError(
            f"profile touched the rotation axis: f2={float(f2):.6g}")
    if fsq <= MIN_RADIAL_GAP_SQ:
        raise DomainGuardError(
            f"profile touched the unit circle: f1={float(f1):.6g}, "
            f"f2={float(f2):.6g}")
    return fsq


def fgh(state: ProfileState) -> tuple[float, float, float]:
    """Radial gap ``f``, support function ``g`` and ``h = sqrt(1 - g^2)``.

    Raises :class:`DomainGuardError` outside the admissible region.  Inside
    it, ``|g| < 1`` holds automatically (Cauchy-Schwarz), so ``f`` and ``h``
    are real and positive.
    """
    fsq = _guard(state.f1, state.f2)
    g = state.f2 * cos(state.theta) - state.f1 * sin(state.theta)
    hsq = 1.0 - g * g
    if hsq <= 0.0:
        raise DomainGuardError(f"support function left (-1, 1): g={g!r}")
    return sqrt(fsq), g, sqrt(hsq)


def turning_rate(state: ProfileState, params: RotationParams) -> float:
    """Tangent-angle derivative ``K = theta'`` that makes the rotation minimal.

    ``K = ((l - n*f2^2)*cos(theta) + n*f1*f2*sin(theta)) * (1 - g^2)
    / (f2 * (1 - f1^2 - f2^2))``.
    """
    fsq = _guard(state.f1, state.f2)
    c = cos(state.theta)
    s = sin(state.theta)
    g = state.f2 * c - state.f1 * s
    num = ((params.l - params.n * state.f2 * state.f2) * c
           + params.n * state.f1 * state.f2 * s) * (1.0 - g * g)
    return num / (state.f2 * fsq)


def curvature_bundle(state: ProfileState, params: RotationParams) -> CurvatureBundle:
    """Evaluate every curvature quantity at one state.

    The last principal curvature of the generating hypersurface equals the
    turning rate ``K`` (arc-length parametrization makes the meridian
    curvature ``f2''*f1' - f1''*f2'`` collapse to ``theta'``), and the
    squared tangential position ``xi1^2`` stands in for ``(f*f')^2``.
    """
    f, g, h = fgh(state)
    K = turning_rate(state, params)
    c = cos(state.theta)
    s = sin(state.theta)
    xi1 = state.f1 * c + state.f2 * s
    kappa1 = -c / state.f2
    h3 = h * h * h
    lambda0 = g / h
    lambda_mid = (g + kappa1) / h
    lambda_last = (g + K) / h - K * xi1 * xi1 / h3
    nH = (params.n * g + params.l * kappa1 + K) / h - K * xi1 * xi1 / h3
    shape_norm_sq = (params.k * lambda0 * lambda0
                     + params.l * lambda_mid * lambda_mid
                     + lambda_last * lambda_last)
    return CurvatureBundle(
        f=f, g=g, h=h, xi1=xi1, K=K, kappa1=kappa1,
        lambda0=lambda0, lambda_mid=lambda_mid, lambda_last=lambda_last,
        shape_norm_sq=shape_norm_sq, nH=nH,
    )


def f_derivatives(state: ProfileState, K: float) -> tuple[float, float, float]:
    """Arc-length derivatives of the radial gap ``f`` at one state.

    Returns ``(f', f'', 1 + f'^2)`` with

    * ``f' = -xi1 / f``,
    * ``1 + f'^2 = (1 - g^2) / f^2``,
    * ``f'' = -((1 - g^2) + g*K*f^2) / f^3``.

    These are the directly differentiated forms (``xi1' = 1 + g*K`` along
    an arc-length solution with turning rate ``K``); they are validated by
    finite differences in the test suite.
    """
    f, g, h = fgh(state)
    xi1 = state.f1 * cos(state.theta) + state.f2 * sin(state.theta)
    fsq = f * f
    hsq = h * h
    fprime = -xi1 / f
    one_plus_fp2 = hsq / fsq
    fsecond = -(hsq + g * K * fsq) / (fsq * f)
    return fprime, fsecond, one_plus_fp2
