"""Two-qubit pure states, binary projective settings, and three-element POVMs.

All operators are 2x2 complex numpy arrays in the computational basis, with
the logical basis fixed as ``|+-> = (|0> +- |1>)/sqrt(2)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

HERMITICITY_TOL = 1e-9
COMPLETENESS_TOL = 1e-10
PSD_TOL = 1e-9

IDENTITY = np.eye(2, dtype=complex)
ZERO_OP = np.zeros((2, 2), dtype=complex)

_SQRT_HALF = math.sqrt(0.5)
_TWO_PI = 2.0 * math.pi


class Basis(enum.Enum):
    """Which two-qubit product basis carries the amplitudes of a pure state."""

    SCHMIDT_01_10 = "schmidt"
    PHI_PLUS = "phi_plus"


@dataclass(frozen=True)
class TwoQubitPureState:
    """Pure state ``alpha|01> + beta|10>``, or ``(|00> + |11>)/sqrt(2)``.

    ``alpha`` and ``beta`` are real and nonnegative; the PHI_PLUS tag pins
    both to ``1/sqrt(2)`` on the |00>,|11> pair instead.
    """

    alpha: float
    beta: float
    basis: Basis = Basis.SCHMIDT_01_10

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("state amplitudes must be finite")
        if self.alpha < 0.0 or self.beta < 0.0:
            raise ValueError("state amplitudes must be nonnegative")
        if abs(self.alpha * self.alpha + self.beta * self.beta - 1.0) > 1e-12:
            raise ValueError("state amplitudes must be normalized")
        if self.basis is Basis.PHI_PLUS and abs(self.alpha - _SQRT_HALF) > 1e-12:
            raise ValueError("the phi-plus tag fixes both amplitudes to 1/sqrt(2)")

    def concurrence(self) -> float:
        return 2.0 * self.alpha * self.beta

    def ratio(self) -> float:
        """Amplitude ratio alpha/beta parametrizing the entanglement degree."""
        if self.beta == 0.0:
            return math.inf
        return self.alpha / self.beta

    def state_vector(self) -> np.ndarray:
        """Length-4 amplitude vector ordered ``|00>, |01>, |10>, |11>``."""
        if self.basis is Basis.PHI_PLUS:
            return np.array([_SQRT_HALF, 0.0, 0.0, _SQRT_HALF], dtype=complex)
        return np.array([0.0, self.alpha, self.beta, 0.0], dtype=complex)


def make_state(ratio: float) -> TwoQubitPureState:
    """State with amplitude ratio ``alpha/beta``; ratio 1 is maximally entangled."""
    if not math.isfinite(ratio) or ratio < 0.0:
        raise ValueError(f"amplitude ratio must be finite and nonnegative, got {ratio!r}")
    norm = math.hypot(1.0, ratio)
    return TwoQubitPureState(alpha=ratio / norm, beta=1.0 / norm)


def make_phi_plus() -> TwoQubitPureState:
    return TwoQubitPureState(alpha=_SQRT_HALF, beta=_SQRT_HALF, basis=Basis.PHI_PLUS)


@dataclass(frozen=True)
class ProjectiveSetting:
    """Orientation ``phi`` and phase ``nu`` of one binary projective measurement.

    Outcome 0 projects on ``sin(phi)|+> + e^{i nu} cos(phi)|->``; angles are
    stored reduced to ``phi in [0, pi)``, ``nu in [0, 2 pi)``.
    """

    phi: float
    nu: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.phi) and math.isfinite(self.nu)):
            raise ValueError("setting angles must be finite")
        object.__setattr__(self, "phi", self.phi % math.pi)
        object.__setattr__(self, "nu", self.nu % _TWO_PI)

    def outcome0_vector(self) -> np.ndarray:
        """Computational-basis components of the outcome-0 state."""
        s, c = math.sin(self.phi), math.cos(self.phi)
        phase = complex(math.cos(self.nu), math.sin(self.nu))
        return np.array([(s + phase * c) * _SQRT_HALF, (s - phase * c) * _SQRT_HALF])


def projector_pair(setting: ProjectiveSetting) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal rank-1 projectors for outcomes 0 and 1 of one setting."""
    s, c = math.sin(setting.phi), math.cos(setting.phi)
    phase = complex(math.cos(setting.nu), math.sin(setting.nu))
    v = np.array([(s + phase * c) * _SQRT_HALF, (s - phase * c) * _SQRT_HALF])
    u = np.array([(c - phase * s) * _SQRT_HALF, (c + phase * s) * _SQRT_HALF])
    return np.outer(v, v.conj()), np.outer(u, u.conj())


@dataclass(frozen=True)
class PovmAngles:
    """Eight angles parametrizing the first two elements of a three-element POVM.

    ``eta_p`` is the POVM shape angle (distinct from any detection efficiency).
    All angles are stored reduced modulo 2 pi.
    """

    theta: float
    varphi: float
    eta_p: float
    gamma: float
    chi: float
    mu: float
    omega0: float
    omega1: float

    def __post_init__(self) -> None:
        for name in ("theta", "varphi", "eta_p", "gamma", "chi", "mu", "omega0", "omega1"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"POVM angle {name} must be finite")
            object.__setattr__(self, name, value % _TWO_PI)

    def as_tuple(self) -> tuple[float, ...]:
        return (self.theta, self.varphi, self.eta_p, self.gamma,
                self.chi, self.mu, self.omega0, self.omega1)


@dataclass(frozen=True)
class Povm3:
    """Three 2x2 Hermitian elements; completeness/positivity checked separately."""

    m0: np.ndarray
    m1: np.ndarray
    m2: np.ndarray

    @property
    def elements(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.m0, self.m1, self.m2)

    def completeness_defect(self) -> float:
        """Largest entry magnitude of ``m0 + m1 + m2 - identity``."""
        return float(np.abs(self.m0 + self.m1 + self.m2 - IDENTITY).max())

    def min_eigenvalues(self) -> tuple[float, float, float]:
        return tuple(min_eigenvalue(m) for m in self.elements)

    def is_feasible(self, tol: float = PSD_TOL) -> bool:
        return (self.completeness_defect() <= COMPLETENESS_TOL
                and min(self.min_eigenvalues()) >= -tol)


def povm_from_angles(angles: PovmAngles) -> Povm3:
    """Build the three POVM elements from their angle parametrization.

    Construction is total: the returned elements are Hermitian and complete
    by construction, but positivity is not enforced here.
    """
    ct2 = math.cos(angles.theta) ** 2
    st2 = math.sin(angles.theta) ** 2
    cv2 = math.cos(angles.varphi) ** 2
    ce2 = math.cos(angles.eta_p) ** 2
    cg2 = math.cos(angles.gamma) ** 2
    cx2 = math.cos(angles.chi) ** 2
    sx2 = math.sin(angles.chi) ** 2
    cm2 = math.cos(angles.mu) ** 2
    ph0 = complex(math.cos(angles.omega0), math.sin(angles.omega0))
    ph1 = complex(math.cos(angles.omega1), math.sin(angles.omega1))

    z0 = -ph0 * ce2 * cg2
    m0 = np.array([[ct2 * cv2, z0], [z0.conjugate(), cx2 * cm2]])
    z1 = ph1 * ce2
    m1 = np.array([[st2, z1], [z1.conjugate(), sx2]])
    m2 = IDENTITY - m0 - m1
    return Povm3(m0=m0, m1=m1, m2=m2)


def positivity_residuals(angles: PovmAngles) -> tuple[float, float, float]:
    """Signed slack of the three determinant conditions, one per POVM element.

    Each residual is det of the corresponding element expressed in the angle
    variables; all three nonnegative is equivalent to positivity because the
    diagonals are squares. The third condition carries the prefactor cos^4(eta)
    of the actual off-diagonal modulus of the completing element.
    """
    ct2 = math.cos(angles.theta) ** 2
    st2 = math.sin(angles.theta) ** 2
    cv2 = math.cos(angles.varphi) ** 2
    sv2 = math.sin(angles.varphi) ** 2
    ce2 = math.cos(angles.eta_p) ** 2
    cg2 = math.cos(angles.gamma) ** 2
    cx2 = math.cos(angles.chi) ** 2
    sx2 = math.sin(angles.chi) ** 2
    cm2 = math.cos(angles.mu) ** 2
    sm2 = math.sin(angles.mu) ** 2

    r1 = ct2 * cv2 * cx2 * cm2 - (ce2 * cg2) ** 2
    r2 = st2 * sx2 - ce2 ** 2
    cross = complex(math.cos(angles.omega0), math.sin(angles.omega0)) * cg2 \
        - complex(math.cos(angles.omega1), math.sin(angles.omega1))
    r3 = ct2 * sv2 * cx2 * sm2 - ce2 ** 2 * (cross * cross.conjugate()).real
    return (r1, r2, r3)


def hermiticity_defect(op: np.ndarray) -> float:
    """Largest entry magnitude of ``op - op^dagger``."""
    return float(np.abs(op - op.conj().T).max())


def eigenvalue_pair(op: np.ndarray) -> tuple[float, float]:
    """Both eigenvalues (ascending) of a 2x2 Hermitian operator, closed form."""
    if hermiticity_defect(op) > HERMITICITY_TOL:
        raise ValueError("operator is not Hermitian within tolerance")
    a = op[0, 0].real
    d = op[1, 1].real
    mid = 0.5 * (a + d)
    rad = math.hypot(0.5 * (a - d), abs(op[0, 1]))
    return (mid - rad, mid + rad)


def min_eigenvalue(op: np.ndarray) -> float:
    """Smaller eigenvalue of a 2x2 Hermitian operator."""
    return eigenvalue_pair(op)[0]


def born_probability(psi: np.ndarray, op_a: np.ndarray, op_b: np.ndarray) -> float:
    """``<psi| op_a (x) op_b |psi>`` for a raw two-qubit amplitude vector."""
    value = np.vdot(psi, np.kron(op_a, op_b) @ psi).real
    return float(min(max(value, 0.0), 1.0))


def joint_probability(state: TwoQubitPureState, op_a: np.ndarray, op_b: np.ndarray) -> float:
    """Joint outcome probability of two local measurement operators.

    Operators must be Hermitian and positive semidefinite within tolerance;
    pass the identity on either side for a marginal. The result is clamped
    to [0, 1] against floating-point round-off.
    """
    if hermiticity_defect(op_a) > HERMITICITY_TOL or hermiticity_defect(op_b) > HERMITICITY_TOL:
        raise ValueError("measurement operators must be Hermitian within tolerance")
    return born_probability(state.state_vector(), op_a, op_b)
