"""Spectra of the Laplace and stability operators on a periodic profile.

Separation of variables reduces both operators to a two-parameter family of
second-order periodic ODEs indexed by the harmonic levels ``(i, j)`` of the
two rotation spheres.  A number ``lambda`` belongs to the spectrum of mode
``(i, j)`` exactly when the Floquet discriminant

    ``delta0(lambda) = 1 + W(T) - (z1(T) + z2'(T))``

vanishes, where ``z1, z2`` are the canonical solutions of the mode equation
over one period ``T`` and ``W`` their Wronskian.  Each mode equation is
integrated as one coupled system with the profile ODE itself (the profile
is re-flown, never interpolated), scanning a lambda grid, bisecting sign
changes, and polishing tangential near-zeros.  Global multiplicities follow
from the per-root count of periodic solutions times the harmonic
multiplicities of the sphere factors; monotonicity of the mode operators in
``(i, j)`` truncates the infinite mode family.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from math import comb

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DomainGuardError
from .geometry import (
    MIN_AXIS_DISTANCE,
    MIN_RADIAL_GAP_SQ,
    ProfileState,
    RotationParams,
    curvature_bundle,
    f_derivatives,
    fgh,
    turning_rate,
)
from .ivp import IntegratorConfig, OdeSystem, integrate
from .profile import PeriodicProfile

# Scan defaults: the grid step used throughout, eigenvalue grouping width,
# and the band around zero that counts toward the nullity.
DEFAULT_STEP = 0.025
GROUP_TOL = 1e-3
NULL_BAND = 1e-4

# Root hunting: bisection width target, duplicate-merge width, the grid
# value treated as "a root landed on a grid point", the |delta0| level
# that triggers local grid refinement, and the acceptance threshold for
# tangential (double) roots.
ROOT_XTOL = 1e-9
DEDUPE_TOL = 1e-6
GRID_ZERO_TOL = 1e-6
NEAR_MISS_TOL = 0.05
TANGENT_MIN_TOL = 1e-3
DOUBLE_ROOT_TOL = 1e-8

# Canonical solutions are renormalized by an exact power of two whenever
# they pass this magnitude, with the common exponent tracked.  The
# threshold sits far below representational overflow on purpose: once the
# solutions grow past ~1/sqrt(eps) the Wronskian product loses the sign
# information of the discriminant, so renormalization has to engage long
# before 1e308.
RESCALE_THRESHOLD = 1e10

# Growth allowed within one integration segment (in nats) between
# renormalization checks; together with RESCALE_THRESHOLD this keeps the
# discriminant sign exact at any depth of the scan.
_SEGMENT_GROWTH_NATS = 8.0
_MIN_SEGMENTS = 8

# Relative singular-value threshold deciding the periodic-solution count.
KERNEL_SV_REL = 1e-5

_BRENTQ_RTOL = 4 * np.finfo(float).eps


class OperatorKind(Enum):
    LAPLACE = "laplace"
    JACOBI = "jacobi"


def sphere_eigen(level: int, dim: int) -> tuple[float, int]:
    """Eigenvalue and multiplicity of harmonic ``level`` on the unit ``S^dim``.

    The value is ``level * (dim + level - 1)``; multiplicities are 1 for the
    constants, ``dim + 1`` for the linear harmonics, and the binomial
    difference ``C(dim+level, level) - C(dim+level-2, level-2)`` above that.
    """
    if level < 0 or dim < 1:
        raise ValueError(f"need level >= 0 and dim >= 1, got {level}, {dim}")
    value = float(level * (dim + level - 1))
    if level == 0:
        return value, 1
    if level == 1:
        return value, dim + 1
    return value, comb(dim + level, level) - comb(dim + level - 2, level - 2)


@dataclass(frozen=True)
class ModeIndex:
    """Harmonic levels ``(i, j)`` on the two sphere factors.

    ``alpha`` and ``beta`` are the corresponding sphere eigenvalues and
    ``mult_k``, ``mult_l`` the harmonic multiplicities entering the total
    eigenvalue multiplicity.
    """

    i: int
    j: int
    alpha: float
    beta: float
    mult_k: int
    mult_l: int

    @property
    def pair(self) -> tuple[int, int]:
        return (self.i, self.j)


def mode_index(i: int, j: int, params: RotationParams) -> ModeIndex:
    alpha, mult_k = sphere_eigen(i, params.k)
    beta, mult_l = sphere_eigen(j, params.l)
    return ModeIndex(i=i, j=j, alpha=alpha, beta=beta,
                     mult_k=mult_k, mult_l=mult_l)


@dataclass(frozen=True)
class MonodromyMatrix:
    """Endpoint data of the canonical solution pair over one period.

    When ``scale_exponent`` is nonzero the stored values carry a common
    factor ``2**-scale_exponent`` from overflow rescaling; the discriminant
    sign is unaffected.  ``abel_prediction`` is ``exp(-integral of P)``,
    which the Wronskian must reproduce.
    """

    z1T: float
    z2T: float
    dz1T: float
    dz2T: float
    wronskianT: float
    abel_prediction: float
    scale_exponent: int = 0

    def matrix(self) -> np.ndarray:
        return np.array([[self.z1T, self.z2T], [self.dz1T, self.dz2T]])


@dataclass(frozen=True)
class EigenRecord:
    """One root of one mode's discriminant with its multiplicity data."""

    value: float
    mode: ModeIndex
    kernel_dim: int                # periodic solutions at this root (1 or 2)
    ode_multiplicity: int          # = kernel_dim
    total_multiplicity: int        # kernel_dim * mult_k * mult_l


@dataclass(frozen=True)
class SpectrumGroup:
    """Eigenvalues from different modes that coincide within GROUP_TOL."""

    value: float                   # multiplicity-weighted representative
    members: tuple[EigenRecord, ...]
    multiplicity: int


@dataclass(frozen=True)
class SpectrumReport:
    """Grouped spectrum of one operator plus index/nullity bookkeeping."""

    operator: OperatorKind
    params: RotationParams
    a0: float
    T: float
    lambda_min: float
    lambda_max: float              # scan ceiling; the grid is [min, max)
    step: float
    groups: tuple[SpectrumGroup, ...]
    scanned_modes: tuple[ModeIndex, ...]
    frontier_modes: tuple[ModeIndex, ...]     # scanned, rootless: prune witnesses
    skipped_modes: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    stability_index: int | None    # Jacobi only
    nullity: int | None            # Jacobi only

    def records(self) -> list[EigenRecord]:
        return [rec for grp in self.groups for rec in grp.members]


def coefficients(mode: ModeIndex, kind: OperatorKind, lam: float,
                 state: ProfileState, params: RotationParams,
                 ) -> tuple[float, float]:
    """Normalized mode-equation coefficients ``z'' + P z' + Q z = 0``.

    ``P = k f'/f + l f2'/f2 - f' f''/(1+f'^2)`` and
    ``Q = (1+f'^2) (lambda - alpha/f^2 - beta/f2^2)``, with the stability
    operator adding ``(1+f'^2) (n + |A|^2)``.
    """
    f, g, h = fgh(state)
    K = turning_rate(state, params)
    fp, fpp, one_plus = f_derivatives(state, K)
    P = (params.k * fp / f
         + params.l * math.sin(state.theta) / state.f2
         - fp * fpp / one_plus)
    q_base = lam - mode.alpha / (f * f) - mode.beta / (state.f2 * state.f2)
    if kind is OperatorKind.JACOBI:
        q_base += params.n + curvature_bundle(state, params).shape_norm_sq
    return P, one_plus * q_base


def _extended_system(params: RotationParams, mode: ModeIndex,
                     kind: OperatorKind, lam: float) -> OdeSystem:
    """Profile ODE coupled with both canonical solutions and the P integral.

    State layout: ``(f1, f2, theta, z1, z1', z2, z2', w)`` with ``w' = P``.
    """

    def rhs(u, y):
        state = ProfileState(y[0], y[1], y[2])
        P, Q = coefficients(mode, kind, lam, state, params)
        z1, dz1, z2, dz2 = y[3], y[4], y[5], y[6]
        return np.array([
            math.cos(state.theta), math.sin(state.theta),
            turning_rate(state, params),
            dz1, -P * dz1 - Q * z1,
            dz2, -P * dz2 - Q * z2,
            P,
        ])

    return OdeSystem(dimension=8, rhs=rhs)


def _max_q_bound(profile: PeriodicProfile, mode: ModeIndex,
                 kind: OperatorKind, lams: np.ndarray,
                 samples: int = 33) -> float:
    """Upper bound for |Q| along the period over all grid lambdas.

    ``Q`` is affine in lambda with positive slope, so its extremes over the
    grid sit at the grid ends; the profile states are sampled from the
    stored half trajectory (the second half visits mirror states with the
    same coefficients).
    """
    t_half = profile.half_trajectory.u_end
    lo, hi = float(np.min(lams)), float(np.max(lams))
    worst = 1.0
    for idx in range(samples):
        state = profile.state_at(t_half * idx / (samples - 1))
        for lam in (lo, hi):
            _, q = coefficients(mode, kind, lam, state, profile.params)
            worst = max(worst, abs(q))
    return worst


def _segment_bounds(profile, mode, kind, lams) -> np.ndarray:
    """Split the period so per-segment growth stays renormalizable."""
    omega = math.sqrt(_max_q_bound(profile, mode, kind, np.asarray(lams)))
    count = max(_MIN_SEGMENTS,
                int(math.ceil(omega * profile.T / _SEGMENT_GROWTH_NATS)))
    return np.linspace(0.0, profile.T, count + 1)


def _delta0_from_endpoint(z1, dz1, z2, dz2, exponent, abel):
    """Discriminant from (possibly renormalized) endpoint values.

    Without renormalization this is the exact ``1 + W - (z1 + z2')``.  With
    a common factor ``2**-e`` applied en route the stored components no
    longer carry the Wronskian (its value sits below their rounding
    noise), so the analytically equal ``exp(-integral P)`` stands in and
    the returned value is ``delta0 * 2**-e``: same sign, scaled magnitude.
    """
    if exponent == 0:
        return 1.0 + (z1 * dz2 - z2 * dz1) - (z1 + dz2)
    return math.ldexp(1.0 + abel, -exponent) - (z1 + dz2)


def discriminant(profile: PeriodicProfile, mode: ModeIndex,
                 kind: OperatorKind, lam: float,
                 config: IntegratorConfig = IntegratorConfig(),
                 ) -> tuple[float, MonodromyMatrix]:
    """Floquet discriminant of one mode equation at one ``lambda``.

    Integrates the coupled system over the full period from
    ``(0, a0, 0, 1, 0, 0, 1, 0)``.  Whenever the canonical solutions pass
    ``RESCALE_THRESHOLD`` they are renormalized by a common power of two;
    the returned discriminant is then the scaled-form value (same sign,
    magnitude divided by ``2**scale_exponent``) and the exponent is
    recorded on the monodromy record.
    """
    system = _extended_system(profile.params, mode, kind, lam)
    y = np.array([0.0, profile.a0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0])
    exponent = 0
    bounds = _segment_bounds(profile, mode, kind, np.array([lam]))
    for u_a, u_b in zip(bounds[:-1], bounds[1:]):
        traj = integrate(system, float(u_a), y, float(u_b), config, dense=False)
        y = traj.states[-1].copy()
        peak = np.max(np.abs(y[3:7]))
        if peak > RESCALE_THRESHOLD:
            shift = int(math.ceil(math.log2(peak)))
            y[3:7] = np.ldexp(y[3:7], -shift)
            exponent += shift
    z1, dz1, z2, dz2, w_int = y[3], y[4], y[5], y[6], y[7]
    abel = math.exp(-w_int)
    mono = MonodromyMatrix(
        z1T=z1, z2T=z2, dz1T=dz1, dz2T=dz2,
        wronskianT=z1 * dz2 - z2 * dz1,
        abel_prediction=abel,
        scale_exponent=exponent,
    )
    return _delta0_from_endpoint(z1, dz1, z2, dz2, exponent, abel), mono


def _batched_system(params: RotationParams, mode: ModeIndex,
                    kind: OperatorKind, lams: np.ndarray) -> OdeSystem:
    """Extended system carrying one canonical pair per grid ``lambda``.

    Layout: ``(f1, f2, theta, w)`` followed by the blocks ``z1``, ``z1'``,
    ``z2``, ``z2'`` of length ``len(lams)`` each.  The profile is shared;
    every column evolves under its own ``Q(lambda)``.
    """
    m = len(lams)
    n, k, l = params.n, params.k, params.l
    alpha, beta = mode.alpha, mode.beta
    jacobi = kind is OperatorKind.JACOBI

    def rhs(u, y):
        f1, f2, th = y[0], y[1], y[2]
        fsq = 1.0 - f1 * f1 - f2 * f2
        if f2 <= MIN_AXIS_DISTANCE or fsq <= MIN_RADIAL_GAP_SQ:
            raise DomainGuardError(
                f"profile left the admissible region: f1={f1!r}, f2={f2!r}")
        c, s = math.cos(th), math.sin(th)
        g = f2 * c - f1 * s
        hsq = 1.0 - g * g
        K = ((l - n * f2 * f2) * c + n * f1 * f2 * s) * hsq / (f2 * fsq)
        xi1 = f1 * c + f2 * s
        f = math.sqrt(fsq)
        fp = -xi1 / f
        one_plus = hsq / fsq
        fpp = -(hsq + g * K * fsq) / (fsq * f)
        P = k * fp / f + l * s / f2 - fp * fpp / one_plus
        q_base = lams - alpha / fsq - beta / (f2 * f2)
        if jacobi:
            h = math.sqrt(hsq)
            lam0 = g / h
            lam_mid = (g - c / f2) / h
            lam_last = (g + K) / h - K * xi1 * xi1 / (hsq * h)
            a2 = k * lam0 * lam0 + l * lam_mid * lam_mid + lam_last * lam_last
            q_base = q_base + (n + a2)
        Q = one_plus * q_base
        z1 = y[4:4 + m]
        dz1 = y[4 + m:4 + 2 * m]
        z2 = y[4 + 2 * m:4 + 3 * m]
        dz2 = y[4 + 3 * m:4 + 4 * m]
        out = np.empty_like(y)
        out[0], out[1], out[2], out[3] = c, s, K, P
        out[4:4 + m] = dz1
        out[4 + m:4 + 2 * m] = -P * dz1 - Q * z1
        out[4 + 2 * m:4 + 3 * m] = dz2
        out[4 + 3 * m:4 + 4 * m] = -P * dz2 - Q * z2
        return out

    return OdeSystem(dimension=4 + 4 * m, rhs=rhs)


@dataclass(frozen=True)
class DiscriminantCurve:
    """Sampled discriminant of one mode/operator over a lambda grid."""

    mode: ModeIndex
    operator: OperatorKind
    lams: np.ndarray
    delta0: np.ndarray
    z1T: np.ndarray
    z2T: np.ndarray
    dz1T: np.ndarray
    dz2T: np.ndarray
    scale_exponents: np.ndarray
    abel_prediction: float


def discriminant_curve(profile: PeriodicProfile, mode: ModeIndex,
                       kind: OperatorKind, lams: np.ndarray,
                       config: IntegratorConfig = IntegratorConfig(),
                       ) -> DiscriminantCurve:
    """Evaluate the discriminant on a whole grid in one coupled flight.

    Identical model to :func:`discriminant` (the profile is integrated
    within the same system), with all grid columns sharing the adaptive
    steps.  Columns are rescaled individually on overflow.
    """
    lams = np.asarray(lams, dtype=float)
    m = len(lams)
    system = _batched_system(profile.params, mode, kind, lams)
    y = np.zeros(4 + 4 * m)
    y[1] = profile.a0
    y[4:4 + m] = 1.0          # z1(0) = 1
    y[4 + 3 * m:] = 1.0       # z2'(0) = 1
    exponents = np.zeros(m, dtype=int)
    bounds = _segment_bounds(profile, mode, kind, lams)
    for u_a, u_b in zip(bounds[:-1], bounds[1:]):
        traj = integrate(system, float(u_a), y, float(u_b), config, dense=False)
        y = traj.states[-1].copy()
        blocks = y[4:].reshape(4, m)
        peaks = np.max(np.abs(blocks), axis=0)
        over = peaks > RESCALE_THRESHOLD
        if np.any(over):
            shifts = np.ceil(np.log2(peaks[over])).astype(int)
            blocks[:, over] = np.ldexp(blocks[:, over], -shifts)
            exponents[over] += shifts
    z1 = y[4:4 + m]
    dz1 = y[4 + m:4 + 2 * m]
    z2 = y[4 + 2 * m:4 + 3 * m]
    dz2 = y[4 + 3 * m:4 + 4 * m]
    abel = math.exp(-y[3])
    plain = 1.0 + (z1 * dz2 - z2 * dz1) - (z1 + dz2)
    scaled = np.ldexp(np.full(m, 1.0 + abel), -exponents) - (z1 + dz2)
    delta = np.where(exponents == 0, plain, scaled)
    return DiscriminantCurve(
        mode=mode, operator=kind, lams=lams, delta0=delta,
        z1T=z1, z2T=z2, dz1T=dz1, dz2T=dz2,
        scale_exponents=exponents, abel_prediction=abel,
    )


def lambda_grid(lambda_min: float, lambda_max: float,
                step: float = DEFAULT_STEP) -> np.ndarray:
    """Uniform grid on the half-open interval ``[lambda_min, lambda_max)``."""
    if step <= 0:
        raise ValueError("step must be positive")
    count = int(math.ceil((lambda_max - lambda_min) / step - 1e-12))
    if count < 1:
        raise ValueError(f"empty range [{lambda_min}, {lambda_max})")
    return lambda_min + step * np.arange(count)


def _continuity_refined(profile, mode, kind, lams, deltas, step, config):
    """Insert step/5 subgrids where the sampled curve jumps implausibly.

    A gap more than ten times both neighboring gaps signals an unresolved
    feature between two grid points; one refinement level is added there.
    """
    gaps = np.abs(np.diff(deltas))
    scale = max(1.0, float(np.max(np.abs(deltas))))
    suspects = []
    for idx in range(1, len(gaps) - 1):
        local = max(gaps[idx - 1], gaps[idx + 1], 1e-9 * scale)
        if gaps[idx] > 10.0 * local:
            suspects.append(idx)
    if not suspects:
        return lams, deltas
    extra = np.concatenate([
        lams[idx] + (step / 5.0) * np.arange(1, 5) for idx in suspects])
    curve = discriminant_curve(profile, mode, kind, extra, config)
    lams_all = np.concatenate([lams, extra])
    deltas_all = np.concatenate([deltas, curve.delta0])
    order = np.argsort(lams_all)
    return lams_all[order], deltas_all[order]


def _kernel_dim(mono: MonodromyMatrix) -> int:
    """Dimension of the periodic solution space at a discriminant root.

    Counted as the singular values of ``M - I`` lying below
    ``KERNEL_SV_REL * ||M||``; a converged root always contributes at
    least one.
    """
    m_mat = mono.matrix()
    sv = np.linalg.svd(m_mat - np.eye(2), compute_uv=False)
    thresh = KERNEL_SV_REL * np.linalg.norm(m_mat, 2)
    return int(min(2, max(1, np.sum(sv < thresh))))


def _polish_bracket(fn, lo, hi):
    return float(brentq(fn, lo, hi, xtol=ROOT_XTOL, rtol=_BRENTQ_RTOL))


def _tangential_root(fn, lo, hi) -> float | None:
    """Minimize |delta0| on [lo, hi]; accept only a genuine double zero."""
    res = minimize_scalar(lambda x: abs(fn(x)), bounds=(lo, hi),
                          method="bounded", options={"xatol": ROOT_XTOL})
    if abs(res.fun) < DOUBLE_ROOT_TOL:
        return float(res.x)
    return None


def scan_and_refine(profile: PeriodicProfile, mode: ModeIndex,
                    kind: OperatorKind, lambda_range: tuple[float, float],
                    step: float = DEFAULT_STEP,
                    config: IntegratorConfig = IntegratorConfig(),
                    ) -> list[EigenRecord]:
    """All discriminant roots of one mode on ``[lambda_min, lambda_max)``.

    Sign changes on the grid are bisected to ``ROOT_XTOL``; grid values at
    rounding level count as roots directly; local minima of ``|delta0|``
    below ``NEAR_MISS_TOL`` without a sign change get one step/5 refinement
    pass and, failing a crossing, a bounded minimization that only accepts
    a tangential root when ``|delta0|`` actually reaches ``DOUBLE_ROOT_TOL``.
    """
    lo, hi = lambda_range
    lams = lambda_grid(lo, hi, step)
    curve = discriminant_curve(profile, mode, kind, lams, config)
    lams, deltas = _continuity_refined(
        profile, mode, kind, lams, curve.delta0, step, config)

    def delta_at(x: float) -> float:
        return discriminant(profile, mode, kind, x, config)[0]

    roots: list[float] = []
    crossing_ivals: list[int] = []
    for idx in range(len(lams) - 1):
        d_a, d_b = deltas[idx], deltas[idx + 1]
        if d_a == 0.0:
            roots.append(float(lams[idx]))
        elif d_a * d_b < 0.0:
            roots.append(_polish_bracket(delta_at, float(lams[idx]),
                                         float(lams[idx + 1])))
            crossing_ivals.append(idx)
    if deltas[-1] == 0.0:
        roots.append(float(lams[-1]))

    near_change = set()
    for idx in crossing_ivals:
        near_change.update((idx, idx + 1))

    # Tangential candidates: interior |delta0| minima with no crossing nearby.
    for idx in range(len(lams)):
        if idx in near_change:
            continue
        d_abs = abs(deltas[idx])
        if d_abs == 0.0 or d_abs > NEAR_MISS_TOL:
            continue
        left = abs(deltas[idx - 1]) if idx > 0 else math.inf
        right = abs(deltas[idx + 1]) if idx < len(lams) - 1 else math.inf
        if d_abs > left or d_abs > right:
            continue
        lo_b = float(lams[idx - 1]) if idx > 0 else float(lams[idx]) - step
        hi_b = float(lams[idx + 1]) if idx < len(lams) - 1 else float(lams[idx]) + step
        lo_b, hi_b = max(lo_b, lo), min(hi_b, hi)
        fine = np.linspace(lo_b, hi_b, 11)
        fine_curve = discriminant_curve(profile, mode, kind, fine, config)
        fd = fine_curve.delta0
        found = False
        for f_idx in range(len(fine) - 1):
            if fd[f_idx] == 0.0:
                roots.append(float(fine[f_idx]))
                found = True
            elif fd[f_idx] * fd[f_idx + 1] < 0.0:
                roots.append(_polish_bracket(delta_at, float(fine[f_idx]),
                                             float(fine[f_idx + 1])))
                found = True
        if not found and (d_abs < GRID_ZERO_TOL
                          or float(np.min(np.abs(fd))) < TANGENT_MIN_TOL):
            tangential = _tangential_root(delta_at, lo_b, hi_b)
            if tangential is not None:
                roots.append(tangential)

    roots.sort()
    merged: list[float] = []
    for r in roots:
        if merged and r - merged[-1] < DEDUPE_TOL:
            continue
        merged.append(r)

    records = []
    for r in merged:
        _, mono = discriminant(profile, mode, kind, r, config)
        kdim = _kernel_dim(mono)
        records.append(EigenRecord(
            value=r, mode=mode, kernel_dim=kdim, ode_multiplicity=kdim,
            total_multiplicity=kdim * mode.mult_k * mode.mult_l))
    return records


def _dominating_witness(witnesses, i: int, j: int) -> tuple[int, int] | None:
    for (a, b) in witnesses:
        if a <= i and b <= j:
            return (a, b)
    return None


def _scan_mode_task(args):
    profile, i, j, kind, lambda_range, step, config = args
    mode = mode_index(i, j, profile.params)
    return (i, j), scan_and_refine(profile, mode, kind, lambda_range,
                                   step, config)


def _group_records(records: list[EigenRecord]) -> tuple[SpectrumGroup, ...]:
    ordered = sorted(records, key=lambda r: (r.value, r.mode.i, r.mode.j))
    groups: list[SpectrumGroup] = []
    bucket: list[EigenRecord] = []
    for rec in ordered:
        if bucket and rec.value - bucket[0].value >= GROUP_TOL:
            groups.append(_finish_group(bucket))
            bucket = []
        bucket.append(rec)
    if bucket:
        groups.append(_finish_group(bucket))
    return tuple(groups)


def _finish_group(bucket: list[EigenRecord]) -> SpectrumGroup:
    mult = sum(r.total_multiplicity for r in bucket)
    value = sum(r.value * r.total_multiplicity for r in bucket) / mult
    return SpectrumGroup(value=value, members=tuple(bucket), multiplicity=mult)


def assemble_spectrum(profile: PeriodicProfile, kind: OperatorKind,
                      lambda_range: tuple[float, float],
                      step: float = DEFAULT_STEP,
                      config: IntegratorConfig = IntegratorConfig(),
                      jobs: int = 1) -> SpectrumReport:
    """Scan modes in diagonal order, prune by monotonicity, group the roots.

    Modes are visited by increasing ``i + j``.  A scanned mode with no root
    below the ceiling becomes a prune witness: every mode dominating it
    componentwise is skipped (first eigenvalues are monotone in each
    index).  Enumeration stops at the first fully-skipped diagonal.  For
    the stability operator the report carries the count of negative
    eigenvalues and the multiplicity of the zero group.
    """
    witnesses: list[tuple[int, int]] = []
    scanned: list[ModeIndex] = []
    frontier: list[ModeIndex] = []
    skipped: list[tuple[tuple[int, int], tuple[int, int]]] = []
    all_records: list[EigenRecord] = []

    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        diag = 0
        while True:
            pairs = [(i, diag - i) for i in range(diag, -1, -1)]
            actionable = []
            for (i, j) in pairs:
                witness = _dominating_witness(witnesses, i, j)
                if witness is not None:
                    skipped.append(((i, j), witness))
                else:
                    actionable.append((i, j))
            if not actionable:
                break
            tasks = [(profile, i, j, kind, lambda_range, step, config)
                     for (i, j) in actionable]
            if pool is not None and len(tasks) > 1:
                results = list(pool.map(_scan_mode_task, tasks))
            else:
                results = [_scan_mode_task(t) for t in tasks]
            for (i, j), records in results:
                mode = mode_index(i, j, profile.params)
                scanned.append(mode)
                if records:
                    all_records.extend(records)
                else:
                    frontier.append(mode)
                    witnesses.append((i, j))
            diag += 1
            if diag > 64:
                raise RuntimeError("mode enumeration failed to terminate")
    finally:
        if pool is not None:
            pool.shutdown()

    groups = _group_records(all_records)
    stability_index = nullity = None
    if kind is OperatorKind.JACOBI:
        stability_index = sum(g.multiplicity for g in groups
                              if g.value < -NULL_BAND)
        nullity = sum(g.multiplicity for g in groups
                      if abs(g.value) <= NULL_BAND)
    return SpectrumReport(
        operator=kind, params=profile.params, a0=profile.a0, T=profile.T,
        lambda_min=lambda_range[0], lambda_max=lambda_range[1], step=step,
        groups=groups,
        scanned_modes=tuple(scanned), frontier_modes=tuple(frontier),
        skipped_modes=tuple(skipped),
        stability_index=stability_index, nullity=nullity,
    )


@dataclass(frozen=True)
class ModeAudit:
    pair: tuple[int, int]
    roots: tuple[float, ...]
    sample_lams: tuple[float, ...]
    sample_delta0: tuple[float, ...]
    sign_changes: int


@dataclass(frozen=True)
class AuditResult:
    """Re-examination of everything the pruning step did not scan fully."""

    frontier: tuple[ModeAudit, ...]
    skipped: tuple[ModeAudit, ...]


def audit_pruned(profile: PeriodicProfile, report: SpectrumReport,
                 config: IntegratorConfig = IntegratorConfig(),
                 ) -> AuditResult:
    """Re-scan the prune witnesses and spot-check every skipped mode.

    Frontier modes get a full second scan (their root lists should stay
    empty below the ceiling); skipped modes get a ten-point discriminant
    sample across the range, whose sign-change count should be zero.
    """
    lambda_range = (report.lambda_min, report.lambda_max)
    frontier_audits = []
    for mode in report.frontier_modes:
        records = scan_and_refine(profile, mode, report.operator,
                                  lambda_range, report.step, config)
        frontier_audits.append(ModeAudit(
            pair=mode.pair, roots=tuple(r.value for r in records),
            sample_lams=(), sample_delta0=(), sign_changes=0))
    skipped_audits = []
    sample = np.linspace(report.lambda_min, report.lambda_max, 10)
    for (pair, _witness) in report.skipped_modes:
        mode = mode_index(pair[0], pair[1], profile.params)
        curve = discriminant_curve(profile, mode, report.operator,
                                   sample, config)
        signs = np.sign(curve.delta0)
        changes = int(np.sum(signs[:-1] * signs[1:] < 0))
        skipped_audits.append(ModeAudit(
            pair=pair, roots=(),
            sample_lams=tuple(float(x) for x in sample),
            sample_delta0=tuple(float(d) for d in curve.delta0),
            sign_changes=changes))
    return AuditResult(frontier=tuple(frontier_audits),
                       skipped=tuple(skipped_audits))


_ANALYTIC_BRANCHES = ("constant", "f1_mode00", "f_mode10", "f2_mode01")


def analytic_eigenfunction_residual(profile: PeriodicProfile, which: str,
                                    samples: int = 200) -> float:
    """Max ODE residual of a closed-form eigenfunction along the profile.

    The constant solves mode (0,0) at ``lambda = 0`` identically; the
    coordinate-built functions ``f1``, ``f``, ``f2`` solve modes (0,0),
    (1,0), (0,1) at ``lambda = n`` (restrictions of ambient coordinates to
    a minimal hypersurface).  The residual is returned, not asserted.
    """
    if which not in _ANALYTIC_BRANCHES:
        raise ValueError(f"unknown branch {which!r}; pick one of "
                         f"{_ANALYTIC_BRANCHES}")
    params = profile.params
    n = params.n
    t_half = profile.half_trajectory.u_end
    worst = 0.0
    for idx in range(samples + 1):
        state = profile.state_at(t_half * idx / samples)
        K = turning_rate(state, params)
        c, s = math.cos(state.theta), math.sin(state.theta)
        if which == "constant":
            mode = mode_index(0, 0, params)
            lam, z, zp, zpp = 0.0, 1.0, 0.0, 0.0
        elif which == "f1_mode00":
            mode = mode_index(0, 0, params)
            lam, z, zp, zpp = float(n), state.f1, c, -K * s
        elif which == "f_mode10":
            mode = mode_index(1, 0, params)
            f, _, _ = fgh(state)
            fp, fpp, _ = f_derivatives(state, K)
            lam, z, zp, zpp = float(n), f, fp, fpp
        else:
            mode = mode_index(0, 1, params)
            lam, z, zp, zpp = float(n), state.f2, s, K * c
        P, Q = coefficients(mode, OperatorKind.LAPLACE, lam, state, params)
        worst = max(worst, abs(zpp + P * zp + Q * z))
    return worst
