"""Optical train of the interferometer acting on path (x) polarization.

Joint kets are ordered path-major: index ``2*path + pol``. Path index 0/1 is
arm A/B before the output beam splitter and port +/- after it. Polarization
vectors are written in the circular basis ``(|R>, |L>)``, in which the
Faraday rotator is diagonal.

The which-way pointer outcome is reported as a bit giving the arm the
Helstrom vector favours: ``-1`` for ``|a'>`` (arm A), ``+1`` for ``|b'>``
(arm B). This matches the sign of ``b_ww``, which biases the photon towards
arm B when positive.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .qmath import (
    PreconditionError,
    dagger,
    eig_hermitian,
    is_unitary,
    ket_to_density,
    tensor,
    trace_norm,
)
from .states import InputLabel, PathState

POINTER_DEGENERACY_TOL = 1e-12

# port |+> is row 0, port |-> is row 1: <+-| = (<A| -+ i<B|)/sqrt(2)
BS_OUT_PATH = np.array([[1, -1j], [1, 1j]], dtype=complex) / math.sqrt(2)

OUTCOMES = (("a'", 1), ("a'", -1), ("b'", 1), ("b'", -1))
"""Fixed outcome order ``(pointer, port)`` used by every probability table."""

POINTER_BIT = {"a'": -1, "b'": 1}


def linear_polarization(angle: float = 0.0) -> np.ndarray:
    """Linear polarization at ``angle`` from horizontal, in the circular basis."""
    return np.array([cmath.exp(-1j * angle), cmath.exp(1j * angle)]) / math.sqrt(2)


def faraday_pol(beta: float) -> np.ndarray:
    """Polarization map of the Faraday rotator: ``diag(1, exp(2i beta))``."""
    return np.diag([1.0, cmath.exp(2j * beta)])


@dataclass(frozen=True, eq=False)
class DetectorModel:
    """Polarization which-way marker: Faraday angle, arm-A delay and pointer states."""

    beta: float
    theta: float
    pointer_in: np.ndarray
    pointer_a: np.ndarray
    pointer_b: np.ndarray

    @property
    def overlap(self) -> complex:
        return complex(np.vdot(self.pointer_a, self.pointer_b))

    @property
    def efficiency(self) -> float:
        """``sqrt(1 - |<a|b>|^2)``, evaluated as ``|det[a b]|`` to avoid cancellation near E = 0."""
        a, b = self.pointer_a, self.pointer_b
        return float(abs(a[0] * b[1] - a[1] * b[0]))

    @property
    def rho_a(self) -> np.ndarray:
        return ket_to_density(self.pointer_a)

    @property
    def rho_b(self) -> np.ndarray:
        return ket_to_density(self.pointer_b)


@dataclass(frozen=True, eq=False)
class DetectorMixture:
    """Classical mixture of pure detectors, e.g. a Faraday angle that fluctuates shot to shot.

    The pointer states become mixed, so the predictive duality turns into a
    strict inequality in general.
    """

    components: tuple

    def __post_init__(self):
        total = sum(w for w, _ in self.components)
        if abs(total - 1.0) > 1e-12 or any(w < 0 for w, _ in self.components):
            raise PreconditionError("mixture weights must be non-negative and sum to 1")

    @property
    def rho_a(self) -> np.ndarray:
        return sum(w * d.rho_a for w, d in self.components)

    @property
    def rho_b(self) -> np.ndarray:
        return sum(w * d.rho_b for w, d in self.components)

    @property
    def efficiency(self) -> float:
        return 0.5 * trace_norm(self.rho_a - self.rho_b)


def build_detector(beta: float, pointer_in=None, theta: float = 0.0) -> DetectorModel:
    """Detector with the Faraday rotator in arm A; arm B leaves the polarization alone."""
    if pointer_in is None:
        pointer_in = linear_polarization()
    pointer_in = np.asarray(pointer_in, dtype=complex)
    if pointer_in.shape != (2,) or abs(np.linalg.norm(pointer_in) - 1.0) > 1e-12:
        raise PreconditionError("pointer_in must be a normalized polarization 2-vector")
    pointer_a = faraday_pol(beta) @ pointer_in
    return DetectorModel(beta, theta, pointer_in, pointer_a, pointer_in.copy())


def detector_for_efficiency(E: float, theta: float = 0.0) -> DetectorModel:
    """Linear-polarization detector with ``beta = asin(E)``."""
    if not 0.0 <= E <= 1.0:
        raise PreconditionError(f"efficiency must lie in [0, 1], got {E}")
    return build_detector(math.asin(E), theta=theta)


# -- optical elements --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OpticalElement:
    name: str
    params: dict
    unitary: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not is_unitary(self.unitary):
            raise ArithmeticError(f"{self.name} is not unitary")

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return psi @ self.unitary.T


def bs_in(split: float) -> OpticalElement:
    """Variable input splitter sending the source mode into ``cos(pi/4 + split/2)|A> + cos(pi/4 - split/2)|B>``."""
    c = math.cos(math.pi / 4 + split / 2)
    s = math.sin(math.pi / 4 + split / 2)
    path = np.array([[c, -s], [s, c]], dtype=complex)
    return OpticalElement("BS_in", {"split": split}, tensor(path, np.eye(2)))


def faraday(beta: float) -> OpticalElement:
    proj_a = np.diag([1.0, 0.0]).astype(complex)
    proj_b = np.diag([0.0, 1.0]).astype(complex)
    u = tensor(proj_a, faraday_pol(beta)) + tensor(proj_b, np.eye(2, dtype=complex))
    return OpticalElement("Faraday", {"beta": beta}, u)


def phase_delay(phase: float) -> OpticalElement:
    """Relative phase ``exp(i phase)`` on arm B."""
    path = np.diag([1.0, cmath.exp(1j * phase)])
    return OpticalElement("PhaseDelay", {"phase": phase}, tensor(path, np.eye(2)))


def bs_out() -> OpticalElement:
    return OpticalElement("BS_out", {}, tensor(BS_OUT_PATH, np.eye(2)))


def pbs(basis: np.ndarray) -> OpticalElement:
    """Polarization analyzer rotating ``basis`` columns onto the two detector outputs."""
    return OpticalElement("PBS", {}, tensor(np.eye(2, dtype=complex), dagger(np.asarray(basis, dtype=complex))))


def prepare_joint(label: InputLabel, det: DetectorModel) -> np.ndarray:
    """Realize Alice's preparation with the optics: source in arm A, BS_in, then the phase delay."""
    source = tensor(np.array([1, 0], dtype=complex), det.pointer_in)
    psi = bs_in(label.b_ww * label.alpha).apply(source)
    return phase_delay(label.b_wp * label.phi).apply(psi)


# -- evolution ---------------------------------------------------------------


def _relative_phases(det: DetectorModel, phase_knob) -> np.ndarray:
    # the arm-A delay theta is equivalent to -theta on arm B
    return np.asarray(phase_knob, dtype=float) - det.theta


def evolve(state_in: PathState, det: DetectorModel, phase_knob) -> np.ndarray:
    """Joint output ket (port (x) circular polarization) after the full train.

    ``phase_knob`` may be a scalar or an array, in which case the result has
    shape ``phase_knob.shape + (4,)``.
    """
    psi = tensor(state_in.vector, det.pointer_in)
    psi = faraday(det.beta).apply(psi)
    rel = _relative_phases(det, phase_knob)
    # phase_delay elementwise so arrays of knobs broadcast
    arm_b = np.array([0, 0, 1, 1], dtype=float)
    psi = psi * np.exp(1j * np.multiply.outer(rel, arm_b))
    return bs_out().apply(psi)


def compensating_phase(det: DetectorModel) -> float:
    """Phase knob that removes the pointer-overlap phase, putting the fringe extremum at zero."""
    ov = det.overlap
    gamma = -cmath.phase(ov) if abs(ov) > POINTER_DEGENERACY_TOL else 0.0
    return gamma + det.theta


def port_probabilities(state_in: PathState, det, phase_knob) -> np.ndarray:
    """``(P_+, P_-)`` at the output ports, vectorized over ``phase_knob``."""
    if isinstance(det, DetectorMixture):
        return sum(w * port_probabilities(state_in, d, phase_knob) for w, d in det.components)
    psi = evolve(state_in, det, phase_knob)
    probs = np.abs(psi) ** 2
    return np.stack([probs[..., 0] + probs[..., 1], probs[..., 2] + probs[..., 3]], axis=-1)


def optimal_pointer_basis(det, priors: tuple[float, float] = (0.5, 0.5)) -> np.ndarray:
    """Minimum-error basis for telling the arm-A pointer from the arm-B pointer.

    Columns are ``|a'>`` and ``|b'>``: the eigenvectors of
    ``p_a rho_a - p_b rho_b`` with the largest and smallest eigenvalue. When
    that operator vanishes (identical pointers, equal priors) the basis is
    placed at +-45 degrees around the common pointer state, in the plane the
    pointers open into as the Faraday angle grows from zero.
    """
    w_a, w_b = priors
    gamma = w_a * det.rho_a - w_b * det.rho_b
    vals, vecs = eig_hermitian(gamma)
    if vals[1] - vals[0] > POINTER_DEGENERACY_TOL:
        return np.column_stack([vecs[:, 1], vecs[:, 0]])
    common, tangent = _degenerate_axes(det)
    return np.column_stack([common + tangent, common - tangent]) / math.sqrt(2)


def _degenerate_axes(det) -> tuple[np.ndarray, np.ndarray]:
    """Common pointer and the unit direction the arm-A pointer leaves it along as beta grows."""
    if isinstance(det, DetectorModel):
        common = det.pointer_b
    else:
        common = eig_hermitian(det.rho_b)[1][:, 1]
    perp = np.array([-np.conj(common[1]), np.conj(common[0])])
    # d/dbeta of the Faraday map is diag(0, 2i)
    growth = np.vdot(perp, np.array([0.0, 2j * common[1]]))
    if abs(growth) > POINTER_DEGENERACY_TOL:
        perp = perp * (growth / abs(growth))
    return common, perp


def outcome_probabilities(state_in: PathState, det, phase_knob=None, basis=None) -> np.ndarray:
    """Born probabilities of the four ``(pointer, port)`` outcomes in :data:`OUTCOMES` order.

    Defaults: the compensating phase knob and the equal-prior Helstrom basis.
    """
    if basis is None:
        basis = optimal_pointer_basis(det)
    if isinstance(det, DetectorMixture):
        return sum(
            w * outcome_probabilities(state_in, d, phase_knob, basis) for w, d in det.components
        )
    if phase_knob is None:
        phase_knob = compensating_phase(det)
    psi = pbs(basis).apply(evolve(state_in, det, phase_knob))
    # psi index = 2*port + pointer; reorder to (pointer, port)
    probs = np.abs(psi) ** 2
    return np.array([probs[0], probs[2], probs[1], probs[3]])


# -- Kraus operators ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KrausSet:
    """Four path-to-port maps, one per outcome in :data:`OUTCOMES` order."""

    operators: np.ndarray
    labels: tuple = OUTCOMES

    def effects(self) -> np.ndarray:
        return dagger(self.operators) @ self.operators

    def completeness_error(self) -> float:
        return float(np.max(np.abs(self.effects().sum(axis=0) - np.eye(2))))

    def probabilities(self, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=complex)
        return np.real(np.einsum("kij,jl,kil->k", self.operators, rho, np.conj(self.operators)))

    def post_measurement(self, rho, k: int) -> np.ndarray:
        out = self.operators[k] @ rho @ dagger(self.operators[k])
        return out / np.trace(out).real


def extract_kraus(det: DetectorModel, phase_knob=None, basis=None) -> KrausSet:
    """Kraus operators the joint measurement induces on the path qubit.

    Built column by column from the optics: the image of each path basis
    state under the full train, projected onto each outcome.
    """
    if basis is None:
        basis = optimal_pointer_basis(det)
    if phase_knob is None:
        phase_knob = compensating_phase(det)
    ops = np.zeros((4, 2, 2), dtype=complex)
    for j in range(2):
        col = PathState(*np.eye(2)[j])
        psi = pbs(basis).apply(evolve(col, det, phase_knob))
        for k, (pointer, port) in enumerate(OUTCOMES):
            row = 0 if port == 1 else 1
            ops[k, row, j] = psi[2 * row + (0 if pointer == "a'" else 1)]
    return KrausSet(ops)


def kraus_closed_form(E: float) -> KrausSet:
    """Closed-form Kraus set for efficiency ``E`` with ports ``(|A> +- i|B>)/sqrt(2)``.

    ``K_{a',s} = |s> [sqrt(1+E) <A| - s i sqrt(1-E) <B|] / 2`` and likewise
    with ``E -> -E`` for ``b'``.
    """
    ops = np.zeros((4, 2, 2), dtype=complex)
    for k, (pointer, port) in enumerate(OUTCOMES):
        e = E if pointer == "a'" else -E
        row = 0 if port == 1 else 1
        ops[k, row] = [math.sqrt(1 + e) / 2, -port * 1j * math.sqrt(1 - e) / 2]
    return KrausSet(ops)


def which_way_probabilities(state_in: PathState, det, basis=None) -> np.ndarray:
    """Joint ``(arm, pointer)`` probabilities with the output splitter removed.

    Rows are arms A, B; columns are the pointer outcomes ``|a'>``, ``|b'>``.
    The default basis is the Helstrom basis for the arm weights of ``state_in``.
    """
    if basis is None:
        basis = optimal_pointer_basis(det, priors=state_in.weights)
    if isinstance(det, DetectorMixture):
        return sum(w * which_way_probabilities(state_in, d, basis) for w, d in det.components)
    psi = faraday(det.beta).apply(tensor(state_in.vector, det.pointer_in))
    psi = pbs(basis).apply(psi)
    return (np.abs(psi) ** 2).reshape(2, 2)
