"""Flat parameter vectors for scenario search, with batched evaluation.

A general scenario is a 16-vector: four (phi, nu) setting pairs followed by
the eight POVM angles. Rank-restricted classes use shorter layouts: the four
setting pairs plus, when the class has a free rank-1 element, one (phi, nu)
pair for its projector. Evaluation is row-wise over parameter batches and
runs in a compiled kernel; one call per batch, no temporaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .inequality import OUTCOME1_WEIGHT, RankClass, Scenario, projective_variant_params
from .quantum import (
    Basis,
    PovmAngles,
    ProjectiveSetting,
    TwoQubitPureState,
    povm_from_angles,
)

GENERAL_PARAM_NAMES = (
    "phi1", "nu1", "phi2", "nu2", "phi3", "nu3", "phi4", "nu4",
    "theta", "varphi", "eta_p", "gamma", "chi", "mu", "omega0", "omega1",
)
SETTING_PARAM_NAMES = GENERAL_PARAM_NAMES[:8]
PROJECTOR_PARAM_NAMES = SETTING_PARAM_NAMES + ("phi_p", "nu_p")

_FREE_PROJECTOR_CLASSES = (RankClass.R01, RankClass.R10, RankClass.R11)

_CLASS_CODE = {
    RankClass.GENERAL: 0,
    RankClass.R10: 1,
    RankClass.R01: 2,
    RankClass.R11: 3,
    RankClass.R00: 4,
    RankClass.R02: 5,
    RankClass.R20: 6,
}

_PI = math.pi
_TWO_PI = 2.0 * math.pi

#: objective value standing in for a forbidden point in barrier searches
BARRIER_SENTINEL = 1e12


def n_params(measurement_class: RankClass) -> int:
    if measurement_class is RankClass.GENERAL:
        return 16
    if measurement_class in _FREE_PROJECTOR_CLASSES:
        return 10
    return 8


def param_names(measurement_class: RankClass) -> tuple[str, ...]:
    if measurement_class is RankClass.GENERAL:
        return GENERAL_PARAM_NAMES
    if measurement_class in _FREE_PROJECTOR_CLASSES:
        return PROJECTOR_PARAM_NAMES
    return SETTING_PARAM_NAMES


def start_ranges(measurement_class: RankClass) -> np.ndarray:
    """Per-coordinate sampling interval, shape (D, 2)."""
    ranges = [(0.0, _PI), (0.0, _TWO_PI)] * 4
    if measurement_class is RankClass.GENERAL:
        ranges += [(0.0, _TWO_PI)] * 8
    elif measurement_class in _FREE_PROJECTOR_CLASSES:
        ranges += [(0.0, _PI), (0.0, _TWO_PI)]
    return np.asarray(ranges, dtype=float)


def random_starts(measurement_class: RankClass, n: int, seed: int) -> np.ndarray:
    """Uniform starts; row i is drawn from the stream keyed by (seed, i)."""
    if n < 1:
        raise ValueError("need at least one start")
    ranges = start_ranges(measurement_class)
    lo, span = ranges[:, 0], ranges[:, 1] - ranges[:, 0]
    out = np.empty((n, ranges.shape[0]), dtype=float)
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        out[i] = lo + span * rng.random(ranges.shape[0])
    return out


def canonicalize(params: np.ndarray, measurement_class: RankClass) -> np.ndarray:
    """Reduce angles to their canonical ranges without changing the scenario."""
    p = np.array(params, dtype=float)
    squeeze = p.ndim == 1
    p = np.atleast_2d(p)
    p[:, 0:8:2] %= _PI
    p[:, 1:8:2] %= _TWO_PI
    if measurement_class is RankClass.GENERAL:
        p[:, 8:16] %= _TWO_PI
    elif measurement_class in _FREE_PROJECTOR_CLASSES:
        p[:, 8] %= _PI
        p[:, 9] %= _TWO_PI
    return p[0] if squeeze else p


def scenario_from_params(
    params: np.ndarray,
    c: float,
    state: TwoQubitPureState,
    measurement_class: RankClass,
) -> Scenario:
    """Typed scenario for one parameter row."""
    p = np.asarray(params, dtype=float).reshape(-1)
    if p.shape[0] != n_params(measurement_class):
        raise ValueError(
            f"{measurement_class.value} expects {n_params(measurement_class)} parameters, got {p.shape[0]}"
        )
    settings = {
        "alice0": ProjectiveSetting(p[0], p[1]),
        "alice1": ProjectiveSetting(p[2], p[3]),
        "bob0": ProjectiveSetting(p[4], p[5]),
        "bob1": ProjectiveSetting(p[6], p[7]),
    }
    if measurement_class is RankClass.GENERAL:
        alice2 = povm_from_angles(PovmAngles(*p[8:16]))
        return Scenario(c=c, state=state, alice2=alice2, **settings)
    extra = {}
    if measurement_class in _FREE_PROJECTOR_CLASSES:
        extra["m0_setting" if measurement_class is not RankClass.R01 else "m1_setting"] = (
            ProjectiveSetting(p[8], p[9])
        )
    return projective_variant_params(measurement_class, c=c, state=state, **settings, **extra)


# columns of the kernel output
_CH_JOINT, _PA00, _PB00, _EXTRA_JOINT, _PA02, _PA12, _PB01 = range(7)
_EIG0, _EIG1, _EIG2 = 7, 8, 9


@njit(cache=True)
def _terms_kernel(p, code, w_aa, w_bb, w_ab, phi_plus):  # pragma: no cover - compiled
    n = p.shape[0]
    out = np.empty((n, 10))
    for i in range(n):
        # outcome-0 projector entries (diag0, offdiag re/im, diag1) per setting
        sa = np.empty(4)
        szr = np.empty(4)
        szi = np.empty(4)
        sd = np.empty(4)
        for k in range(4):
            phi = p[i, 2 * k]
            nu = p[i, 2 * k + 1]
            s2 = math.sin(2.0 * phi)
            cn = math.cos(nu)
            sa[k] = 0.5 * (1.0 + s2 * cn)
            sd[k] = 0.5 * (1.0 - s2 * cn)
            szr[k] = -0.5 * math.cos(2.0 * phi)
            szi[k] = 0.5 * s2 * math.sin(nu)

        # third-setting elements, entries (a, zr, zi, d) each
        if code == 0:
            ct2 = math.cos(p[i, 8]) ** 2
            st2 = math.sin(p[i, 8]) ** 2
            cv2 = math.cos(p[i, 9]) ** 2
            ce2 = math.cos(p[i, 10]) ** 2
            cg2 = math.cos(p[i, 11]) ** 2
            cx2 = math.cos(p[i, 12]) ** 2
            sx2 = math.sin(p[i, 12]) ** 2
            cm2 = math.cos(p[i, 13]) ** 2
            r0 = ce2 * cg2
            m0a = ct2 * cv2
            m0zr = -math.cos(p[i, 14]) * r0
            m0zi = -math.sin(p[i, 14]) * r0
            m0d = cx2 * cm2
            m1a = st2
            m1zr = math.cos(p[i, 15]) * ce2
            m1zi = math.sin(p[i, 15]) * ce2
            m1d = sx2
        elif code <= 3:
            s2 = math.sin(2.0 * p[i, 8])
            cn = math.cos(p[i, 9])
            pa = 0.5 * (1.0 + s2 * cn)
            pd = 0.5 * (1.0 - s2 * cn)
            pzr = -0.5 * math.cos(2.0 * p[i, 8])
            pzi = 0.5 * s2 * math.sin(p[i, 9])
            if code == 1:  # rank-1 first element, zero second
                m0a, m0zr, m0zi, m0d = pa, pzr, pzi, pd
                m1a, m1zr, m1zi, m1d = 0.0, 0.0, 0.0, 0.0
            elif code == 2:  # zero first, rank-1 second
                m0a, m0zr, m0zi, m0d = 0.0, 0.0, 0.0, 0.0
                m1a, m1zr, m1zi, m1d = pa, pzr, pzi, pd
            else:  # orthogonal rank-1 pair
                m0a, m0zr, m0zi, m0d = pa, pzr, pzi, pd
                m1a, m1zr, m1zi, m1d = 1.0 - pa, -pzr, -pzi, 1.0 - pd
        elif code == 4:  # both zero
            m0a = m0zr = m0zi = m0d = 0.0
            m1a = m1zr = m1zi = m1d = 0.0
        elif code == 5:  # identity second element
            m0a = m0zr = m0zi = m0d = 0.0
            m1a, m1zr, m1zi, m1d = 1.0, 0.0, 0.0, 1.0
        else:  # identity first element
            m0a, m0zr, m0zi, m0d = 1.0, 0.0, 0.0, 1.0
            m1a = m1zr = m1zi = m1d = 0.0
        m2a = 1.0 - m0a - m1a
        m2zr = -(m0zr + m1zr)
        m2zi = -(m0zi + m1zi)
        m2d = 1.0 - m0d - m1d

        ch = 0.0
        extra = 0.0
        for k in range(4):
            left = k // 2  # 0: alice0, 1: alice1
            bob = 2 + (k % 2)
            aa_, azr, azi, ad = sa[left], szr[left], szi[left], sd[left]
            if k < 3:
                sign = 1.0
            else:
                sign = -1.0
            if phi_plus:
                pj = 0.5 * (aa_ * sa[bob] + ad * sd[bob]) + (azr * szr[bob] - azi * szi[bob])
            else:
                pj = w_aa * aa_ * sd[bob] + w_bb * ad * sa[bob] + w_ab * (azr * szr[bob] + azi * szi[bob])
            pj = min(max(pj, 0.0), 1.0)
            ch += sign * pj
        for k in range(4):
            if k < 2:
                aa_, azr, azi, ad = m0a, m0zr, m0zi, m0d
            else:
                aa_, azr, azi, ad = m1a, m1zr, m1zi, m1d
            bob = 2 + (k % 2)
            if k < 3:
                sign = 1.0
            else:
                sign = -1.0
            if phi_plus:
                pj = 0.5 * (aa_ * sa[bob] + ad * sd[bob]) + (azr * szr[bob] - azi * szi[bob])
            else:
                pj = w_aa * aa_ * sd[bob] + w_bb * ad * sa[bob] + w_ab * (azr * szr[bob] + azi * szi[bob])
            pj = min(max(pj, 0.0), 1.0)
            extra += sign * pj

        if phi_plus:
            pa00 = 0.5 * (sa[0] + sd[0])
            pa02 = 0.5 * (m0a + m0d)
            pa12 = 0.5 * (m1a + m1d)
            pb00 = 0.5 * (sa[2] + sd[2])
            pb01 = 0.5 * (sa[3] + sd[3])
        else:
            pa00 = w_aa * sa[0] + w_bb * sd[0]
            pa02 = w_aa * m0a + w_bb * m0d
            pa12 = w_aa * m1a + w_bb * m1d
            pb00 = w_aa * sd[2] + w_bb * sa[2]
            pb01 = w_aa * sd[3] + w_bb * sa[3]

        out[i, 0] = ch
        out[i, 1] = min(max(pa00, 0.0), 1.0)
        out[i, 2] = min(max(pb00, 0.0), 1.0)
        out[i, 3] = extra
        out[i, 4] = min(max(pa02, 0.0), 1.0)
        out[i, 5] = min(max(pa12, 0.0), 1.0)
        out[i, 6] = min(max(pb01, 0.0), 1.0)
        out[i, 7] = 0.5 * (m0a + m0d) - math.sqrt(0.25 * (m0a - m0d) ** 2 + m0zr * m0zr + m0zi * m0zi)
        out[i, 8] = 0.5 * (m1a + m1d) - math.sqrt(0.25 * (m1a - m1d) ** 2 + m1zr * m1zr + m1zi * m1zi)
        out[i, 9] = 0.5 * (m2a + m2d) - math.sqrt(0.25 * (m2a - m2d) ** 2 + m2zr * m2zr + m2zi * m2zi)
    return out


def _terms_matrix(
    params: np.ndarray, state: TwoQubitPureState, measurement_class: RankClass
) -> np.ndarray:
    p = np.ascontiguousarray(np.atleast_2d(np.asarray(params, dtype=float)))
    if p.shape[1] != n_params(measurement_class):
        raise ValueError(
            f"{measurement_class.value} expects {n_params(measurement_class)} parameters, got {p.shape[1]}"
        )
    return _terms_kernel(
        p,
        _CLASS_CODE[measurement_class],
        state.alpha * state.alpha,
        state.beta * state.beta,
        2.0 * state.alpha * state.beta,
        state.basis is Basis.PHI_PLUS,
    )


@dataclass(frozen=True)
class BatchTerms:
    """Row-wise probability aggregates and element eigenvalue minima."""

    ch_joint: np.ndarray
    pa00: np.ndarray
    pb00: np.ndarray
    extra_joint: np.ndarray
    pa02: np.ndarray
    pa12: np.ndarray
    pb01: np.ndarray
    eig_min: np.ndarray  # (N, 3)


def batch_terms(
    params: np.ndarray, state: TwoQubitPureState, measurement_class: RankClass
) -> BatchTerms:
    """Evaluate all functional ingredients for a batch of parameter rows."""
    t = _terms_matrix(params, state, measurement_class)
    return BatchTerms(
        ch_joint=t[:, _CH_JOINT],
        pa00=t[:, _PA00],
        pb00=t[:, _PB00],
        extra_joint=t[:, _EXTRA_JOINT],
        pa02=t[:, _PA02],
        pa12=t[:, _PA12],
        pb01=t[:, _PB01],
        eig_min=t[:, _EIG0:],
    )


def _bell_cols(t: np.ndarray, c: float) -> np.ndarray:
    return (
        c * (t[:, _CH_JOINT] - t[:, _PA00] - t[:, _PB00])
        + t[:, _EXTRA_JOINT]
        - t[:, _PA02]
        - OUTCOME1_WEIGHT * t[:, _PA12]
    )


def bell_value(
    params: np.ndarray, c: float, state: TwoQubitPureState, measurement_class: RankClass
) -> np.ndarray:
    """Functional value per row (no positivity penalty)."""
    return _bell_cols(_terms_matrix(params, state, measurement_class), c)


def min_eigs(params: np.ndarray, measurement_class: RankClass) -> np.ndarray:
    """Smallest eigenvalue of each third-setting element, shape (N, 3)."""
    # state enters no eigenvalue; any valid state works here
    t = _terms_matrix(params, _EIG_STATE, measurement_class)
    return t[:, _EIG0:]


_EIG_STATE = TwoQubitPureState(alpha=math.sqrt(0.5), beta=math.sqrt(0.5))


def penalty_from_eigs(eig_min: np.ndarray) -> np.ndarray:
    """Quadratic positivity penalty, zero on the feasible set."""
    return (np.minimum(eig_min, 0.0) ** 2).sum(axis=1)


def objective_value(
    params: np.ndarray,
    c: float,
    state: TwoQubitPureState,
    measurement_class: RankClass,
    penalty_weight: float,
) -> np.ndarray:
    """Functional minus the weighted positivity penalty, per row."""
    t = _terms_matrix(params, state, measurement_class)
    return _bell_cols(t, c) - penalty_weight * penalty_from_eigs(t[:, _EIG0:])


def eta_ratio_value(
    params: np.ndarray,
    c: float,
    state: TwoQubitPureState,
    measurement_class: RankClass,
    psd_tol: float = 1e-9,
) -> np.ndarray:
    """Threshold-efficiency ratio per row, barrier sentinel where undefined.

    The sentinel marks rows whose third setting is not positive semidefinite,
    whose joint-term denominator is nonpositive, or which do not violate the
    local bound at full efficiency.
    """
    t = _terms_matrix(params, state, measurement_class)
    denom = c * t[:, _CH_JOINT] + t[:, _EXTRA_JOINT]
    numer = (
        c * t[:, _PA00]
        + t[:, _PA02]
        + OUTCOME1_WEIGHT * t[:, _PA12]
        + (c + 1.0) * t[:, _PB00]
        + t[:, _PB01]
    )
    valid = (
        (t[:, _EIG0:].min(axis=1) >= -psd_tol)
        & (denom > 0.0)
        & (_bell_cols(t, c) > 1.0)
    )
    return np.where(valid, numer / np.where(denom > 0.0, denom, 1.0), BARRIER_SENTINEL)
