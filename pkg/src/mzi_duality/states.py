"""Path-qubit states of the interferometer: general inputs, the four-state
preparation family, Bloch coordinates and trace distances.

Path basis ordering is ``(|A>, |B>)``; ``|A>`` sits at the north pole of the
Bloch sphere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .qmath import PreconditionError, ket_to_density, trace_norm

NORM_TOL = 1e-12


@dataclass(frozen=True)
class PathState:
    """Normalized amplitudes on arms A and B."""

    amp_A: complex
    amp_B: complex

    def __post_init__(self):
        object.__setattr__(self, "amp_A", complex(self.amp_A))
        object.__setattr__(self, "amp_B", complex(self.amp_B))
        norm = abs(self.amp_A) ** 2 + abs(self.amp_B) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise PreconditionError(f"path state not normalized (|A|^2+|B|^2 = {norm!r})")

    @classmethod
    def from_weights(cls, w1: float, phi0: float = 0.0) -> "PathState":
        """``sqrt(w1)|A> + exp(-i phi0) sqrt(1-w1)|B>``."""
        if not 0.0 <= w1 <= 1.0:
            raise PreconditionError(f"arm weight w1 must lie in [0, 1], got {w1}")
        return cls(math.sqrt(w1), np.exp(-1j * phi0) * math.sqrt(1.0 - w1))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.amp_A, self.amp_B], dtype=complex)

    @property
    def weights(self) -> tuple[float, float]:
        return abs(self.amp_A) ** 2, abs(self.amp_B) ** 2

    def density(self) -> np.ndarray:
        return ket_to_density(self.vector)


@dataclass(frozen=True)
class InputLabel:
    """One of Alice's four preparations: the bit pair plus the family parameters."""

    b_ww: int
    b_wp: int
    alpha: float
    phi: float

    def __post_init__(self):
        for name in ("b_ww", "b_wp"):
            if getattr(self, name) not in (1, -1):
                raise PreconditionError(f"{name} must be +1 or -1, got {getattr(self, name)!r}")
        check_family_params(self.alpha, self.phi)


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    @property
    def length(self) -> float:
        return math.sqrt(self.x**2 + self.y**2 + self.z**2)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


def check_family_params(alpha: float, phi: float) -> None:
    if not 0.0 <= alpha <= math.pi / 2:
        raise PreconditionError(f"alpha must lie in [0, pi/2], got {alpha}")
    if not 0.0 <= phi <= math.pi:
        raise PreconditionError(f"phi must lie in [0, pi], got {phi}")


def family_amplitude(sign: int, alpha: float) -> float:
    """Real input amplitude ``cos(pi/4 + sign*alpha/2)``."""
    return math.cos(math.pi / 4 + sign * alpha / 2)


def make_input_state(label: InputLabel) -> PathState:
    amp_A = family_amplitude(label.b_ww, label.alpha)
    amp_B = np.exp(1j * label.b_wp * label.phi) * family_amplitude(-label.b_ww, label.alpha)
    return PathState(amp_A, amp_B)


def family_states(alpha: float, phi: float) -> dict[tuple[int, int], PathState]:
    """All four preparations keyed by ``(b_ww, b_wp)``."""
    return {
        (b_ww, b_wp): make_input_state(InputLabel(b_ww, b_wp, alpha, phi))
        for b_ww in (1, -1)
        for b_wp in (1, -1)
    }


def to_bloch(s: PathState) -> BlochVector:
    # a* b is invariant under a global phase, which fixes the azimuth gauge
    cross = np.conj(s.amp_A) * s.amp_B
    return BlochVector(
        x=float(2 * cross.real),
        y=float(2 * cross.imag),
        z=float(abs(s.amp_A) ** 2 - abs(s.amp_B) ** 2),
    )


StateLike = Union[PathState, np.ndarray]


def _to_density(s: StateLike) -> np.ndarray:
    if isinstance(s, PathState):
        return s.density()
    return np.asarray(s, dtype=complex)


def trace_distance_states(s1: StateLike, s2: StateLike) -> float:
    """Trace distance between two path states (kets or density matrices).

    Two pure states use ``sqrt(1 - |<s1|s2>|^2)``; anything else goes through
    half the trace norm of the density-matrix difference.
    """
    if isinstance(s1, PathState) and isinstance(s2, PathState):
        # for normalized qubits |<s1|s2>|^2 + |det[s1 s2]|^2 = 1; the determinant
        # form keeps full precision for nearly equal states
        return abs(s1.amp_A * s2.amp_B - s1.amp_B * s2.amp_A)
    return 0.5 * trace_norm(_to_density(s1) - _to_density(s2))


def family_distances(alpha: float, phi: float) -> tuple[float, float]:
    """``(d_WW, d_WP)`` for the four-state family, evaluated on the constructed states.

    d_WW flips b_ww at fixed b_wp and d_WP flips b_wp at fixed b_ww; both are
    checked to be independent of the bit held fixed.
    """
    check_family_params(alpha, phi)
    st = family_states(alpha, phi)
    d_ww = [trace_distance_states(st[(1, b)], st[(-1, b)]) for b in (1, -1)]
    d_wp = [trace_distance_states(st[(b, 1)], st[(b, -1)]) for b in (1, -1)]
    if abs(d_ww[0] - d_ww[1]) > 1e-12 or abs(d_wp[0] - d_wp[1]) > 1e-12:
        raise ArithmeticError(f"family distances not symmetric: d_WW={d_ww}, d_WP={d_wp}")
    return d_ww[0], d_wp[0]
