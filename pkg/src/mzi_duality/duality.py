"""Complementarity quantities and the duality relations between them.

Predictive side: predictability P, visibility V, efficiency E,
distinguishability D and the guess probabilities (1+D)/2, (1+V)/2.
Retrodictive side: the four-state family distances and the simultaneous
guess probabilities P_WW, P_WP with their ellipse relation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .interferometer import DetectorModel, port_probabilities
from .qmath import trace_norm
from .states import PathState, family_distances

DEGENERATE_DISTANCE = 1e-9
TIE_TOL = 1e-12
PHASE_XATOL = 1e-10


@dataclass(frozen=True)
class PredictiveReport:
    P: float
    V: float
    E: float
    D: float
    p_ww: float
    p_wp: float
    lhs: float


@dataclass(frozen=True)
class RetrodictiveReport:
    alpha: float
    phi: float
    E: float
    d_ww: float
    d_wp: float
    p_ww: float
    p_wp: float
    ellipse_ww: Optional[float]
    ellipse_wp: Optional[float]
    ellipse_lhs: Optional[float]


def predictability(s: PathState) -> float:
    w1, w2 = s.weights
    return abs(w1 - w2)


@dataclass(frozen=True)
class FringeExtrema:
    phase_max: float
    p_max: float
    phase_min: float
    p_min: float

    @property
    def visibility(self) -> float:
        return (self.p_max - self.p_min) / (self.p_max + self.p_min)


def _refine(f, center: float, step: float) -> tuple[float, float]:
    res = minimize_scalar(
        f, bounds=(center - step, center + step), method="bounded", options={"xatol": PHASE_XATOL}
    )
    return float(res.x), float(res.fun)


def fringe_extrema(s: PathState, det, grid_points: int = 720) -> FringeExtrema:
    """Locate the max and min of the port-+ fringe: grid scan, then bounded refinement."""
    if grid_points < 64:
        raise ValueError(f"grid_points must be >= 64, got {grid_points}")
    step = 2 * math.pi / grid_points
    grid = np.arange(grid_points) * step
    p_plus = port_probabilities(s, det, grid)[:, 0]

    def plus(x):
        return float(port_probabilities(s, det, x)[0])

    i_max = int(np.argmax(p_plus))
    i_min = int(np.argmin(p_plus))
    x_max, neg = _refine(lambda x: -plus(x), grid[i_max], step)
    x_min, low = _refine(plus, grid[i_min], step)
    # the refinement can only improve on the grid value
    p_max = max(-neg, float(p_plus[i_max]))
    p_min = min(low, float(p_plus[i_min]))
    return FringeExtrema(x_max % (2 * math.pi), p_max, x_min % (2 * math.pi), p_min)


def visibility_scan(s: PathState, det, grid_points: int = 720) -> float:
    return fringe_extrema(s, det, grid_points).visibility


def distinguishability(s: PathState, det) -> float:
    """``Tr|w1 rho_a - w2 rho_b|`` on the pointer states."""
    w1, w2 = s.weights
    return trace_norm(w1 * det.rho_a - w2 * det.rho_b)


def distinguishability_closed_form(P: float, E: float) -> float:
    """Pure-pointer shortcut ``sqrt(P^2 + E^2 - E^2 P^2)``."""
    return math.sqrt(P * P + E * E - E * E * P * P)


def predictive_report(s: PathState, det, grid_points: int = 720) -> PredictiveReport:
    P = predictability(s)
    V = visibility_scan(s, det, grid_points)
    E = det.efficiency
    D = distinguishability(s, det)
    lhs = D * D + V * V
    if lhs > 1 + 1e-10:
        raise ArithmeticError(f"D^2 + V^2 = {lhs!r} exceeds 1")
    if isinstance(det, DetectorModel) and abs(lhs - 1) > 1e-9:
        raise ArithmeticError(f"pure configuration should saturate D^2 + V^2 = 1, got {lhs!r}")
    return PredictiveReport(P, V, E, D, (1 + D) / 2, (1 + V) / 2, lhs)


def _check_efficiency(E: float) -> None:
    if not 0.0 <= E <= 1.0:
        raise ValueError(f"E must lie in [0, 1], got {E}")


def retrodictive_probabilities(alpha: float, phi: float, E: float) -> RetrodictiveReport:
    """Guess probabilities of both bits for the four-state game at efficiency ``E``.

    A distance below ``DEGENERATE_DISTANCE`` makes the bit uninferable: its
    probability is exactly 1/2 and its ellipse term is ``None``.
    """
    _check_efficiency(E)
    d_ww, d_wp = family_distances(alpha, phi)
    bias_ww = E
    bias_wp = math.sqrt(1 - E * E)
    terms = []
    p = []
    for d, bias in ((d_ww, bias_ww), (d_wp, bias_wp)):
        if d < DEGENERATE_DISTANCE:
            p.append(0.5)
            terms.append(None)
        else:
            pr = (1 + bias * d) / 2
            p.append(pr)
            terms.append(((2 * pr - 1) / d) ** 2)
    defined = [t for t in terms if t is not None]
    lhs = sum(defined) if defined else None
    return RetrodictiveReport(alpha, phi, E, d_ww, d_wp, p[0], p[1], terms[0], terms[1], lhs)


def joint_distribution(alpha: float, phi: float, E: float) -> dict[tuple[int, int, int, int], float]:
    """Joint probabilities keyed ``(b_ww, b_wp, b_ww_out, b_wp_out)`` with uniform priors.

    Each entry is ``(1 + b_ww b_ww_out E d_WW + b_wp b_wp_out sqrt(1-E^2) d_WP) / 16``.
    """
    _check_efficiency(E)
    d_ww, d_wp = family_distances(alpha, phi)
    c_ww = E * d_ww
    c_wp = math.sqrt(1 - E * E) * d_wp
    bits = (1, -1)
    return {
        (b, c, bo, co): (1 + b * bo * c_ww + c * co * c_wp) / 16
        for b in bits
        for c in bits
        for bo in bits
        for co in bits
    }


def ww_marginal(joint: dict) -> dict[tuple[int, int], float]:
    out: dict = {}
    for (b, _, bo, _), p in joint.items():
        out[(b, bo)] = out.get((b, bo), 0.0) + p
    return out


def wp_marginal(joint: dict) -> dict[tuple[int, int], float]:
    out: dict = {}
    for (_, c, _, co), p in joint.items():
        out[(c, co)] = out.get((c, co), 0.0) + p
    return out


def ml_guess(likelihood: dict[int, float]) -> int:
    """Most likely bit given ``{bit: P(outcome, bit)}``; exact ties go to +1."""
    if abs(likelihood[1] - likelihood[-1]) <= TIE_TOL:
        return 1
    return 1 if likelihood[1] > likelihood[-1] else -1


def guess_tables(joint: dict) -> tuple[dict[int, int], dict[int, int]]:
    """Maximum-likelihood guess of each bit from its outcome label.

    Returns ``({b_ww_out: g_ww}, {b_wp_out: g_wp})``. The likelihoods are read
    off the marginals, so the asymmetry (if any) of the table is honoured.
    """
    ww = ww_marginal(joint)
    wp = wp_marginal(joint)
    g_ww = {bo: ml_guess({b: ww[(b, bo)] for b in (1, -1)}) for bo in (1, -1)}
    g_wp = {co: ml_guess({c: wp[(c, co)] for c in (1, -1)}) for co in (1, -1)}
    return g_ww, g_wp


def success_probabilities(joint: dict) -> tuple[float, float]:
    """``(P_WW, P_WP)``: the sum over hidden bits of the max-likelihood entry."""
    g_ww, g_wp = guess_tables(joint)
    ww = ww_marginal(joint)
    wp = wp_marginal(joint)
    p_ww = sum(p for (b, bo), p in ww.items() if g_ww[bo] == b)
    p_wp = sum(p for (c, co), p in wp.items() if g_wp[co] == c)
    return p_ww, p_wp


def frontier_point(d_ww: float, d_wp: float, E: float) -> tuple[float, float]:
    return (1 + E * d_ww) / 2, (1 + math.sqrt(1 - E * E) * d_wp) / 2


def alternative_probabilities(E: float) -> tuple[float, float]:
    """Primed guess probabilities when Alice prepares in a single basis per run."""
    _check_efficiency(E)
    return (1 + E) / 2, (1 + math.sqrt(1 - E * E)) / 2


def alternative_averaged_probabilities(E: float) -> tuple[float, float]:
    """Averaged primed probabilities when both bits are guessed every run."""
    p_ww, p_wp = alternative_probabilities(E)
    return (p_ww + 0.5) / 2, (p_wp + 0.5) / 2


def equal_marginal_efficiency(d_ww: float, d_wp: float) -> float:
    """Efficiency at which the retrodictive frontier has ``P_WW == P_WP``."""
    norm = math.hypot(d_ww, d_wp)
    if norm == 0:
        raise ValueError("both distances vanish")
    return d_wp / norm

