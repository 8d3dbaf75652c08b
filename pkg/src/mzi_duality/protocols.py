"""Seeded Monte Carlo engines for the three guessing games.

* predictive: fixed input state; per run either the exit port (fringe at its
  optimal phase) or the arm (output splitter removed) is predicted;
* retrodictive: Alice draws one of the four family states, Bob guesses both
  bits from a single (pointer, port) outcome;
* alternative: Alice prepares in a single WW or WP basis and announces it
  after Bob has measured.

Trials are simulated in chunks with numpy. Each trial reads its randomness
from fixed :mod:`rng` slots, so results do not depend on chunking or worker
count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from . import rng
from .duality import fringe_extrema, guess_tables, joint_distribution, ml_guess, retrodictive_probabilities
from .interferometer import (
    OUTCOMES,
    POINTER_BIT,
    DetectorModel,
    detector_for_efficiency,
    optimal_pointer_basis,
    outcome_probabilities,
    port_probabilities,
    which_way_probabilities,
)
from .states import InputLabel, PathState, make_input_state

CHUNK = 1 << 17

# rng draw slots
_SLOT_WW, _SLOT_WP, _SLOT_OUTCOME, _SLOT_BASIS = range(4)

PROTOCOLS = ("predictive_ww", "predictive_wp", "retrodictive", "alternative", "alternative_averaged")

_OUTCOME_POL = np.array([POINTER_BIT[p] for p, _ in OUTCOMES], dtype=np.int8)
_OUTCOME_PORT = np.array([port for _, port in OUTCOMES], dtype=np.int8)


@dataclass(frozen=True)
class TrialRecord:
    """One run. Fields that the protocol does not produce are ``None``."""

    protocol: str
    trial: int
    b_ww: Optional[int]
    b_wp: Optional[int]
    basis: Optional[str]
    port_bit: Optional[int]
    pol_bit: Optional[int]
    g_ww: Optional[int]
    g_wp: Optional[int]
    correct_ww: Optional[bool]
    correct_wp: Optional[bool]


@dataclass(frozen=True)
class GameStats:
    protocol: str
    n_trials: int
    seed: int
    n_ww: int
    n_wp: int
    p_ww_hat: Optional[float]
    p_wp_hat: Optional[float]
    se_ww: Optional[float]
    se_wp: Optional[float]


@dataclass
class TrialBatch:
    """Column store of a run; ``0`` marks a field that is not applicable."""

    protocol: str
    seed: int
    b_ww: np.ndarray
    b_wp: np.ndarray
    basis: np.ndarray  # 1 = WW, 2 = WP, 0 = none
    port_bit: np.ndarray
    pol_bit: np.ndarray
    g_ww: np.ndarray
    g_wp: np.ndarray

    def __len__(self) -> int:
        return len(self.b_ww)

    @property
    def scored_ww(self) -> np.ndarray:
        return (self.g_ww != 0) & (self.b_ww != 0)

    @property
    def scored_wp(self) -> np.ndarray:
        return (self.g_wp != 0) & (self.b_wp != 0)

    def stats(self) -> GameStats:
        n_ww, p_ww, se_ww = _estimate(self.g_ww, self.b_ww, self.scored_ww)
        n_wp, p_wp, se_wp = _estimate(self.g_wp, self.b_wp, self.scored_wp)
        return GameStats(self.protocol, len(self), self.seed, n_ww, n_wp, p_ww, p_wp, se_ww, se_wp)

    def records(self) -> Iterator[TrialRecord]:
        def opt(x):
            return None if x == 0 else int(x)

        basis_names = {0: None, 1: "ww", 2: "wp"}
        ww = self.scored_ww
        wp = self.scored_wp
        for i in range(len(self)):
            yield TrialRecord(
                protocol=self.protocol,
                trial=i,
                b_ww=opt(self.b_ww[i]),
                b_wp=opt(self.b_wp[i]),
                basis=basis_names[int(self.basis[i])],
                port_bit=opt(self.port_bit[i]),
                pol_bit=opt(self.pol_bit[i]),
                g_ww=opt(self.g_ww[i]),
                g_wp=opt(self.g_wp[i]),
                correct_ww=bool(self.g_ww[i] == self.b_ww[i]) if ww[i] else None,
                correct_wp=bool(self.g_wp[i] == self.b_wp[i]) if wp[i] else None,
            )


def _estimate(guess, hidden, mask) -> tuple[int, Optional[float], Optional[float]]:
    n = int(mask.sum())
    if n == 0:
        return 0, None, None
    p = float(np.count_nonzero(guess[mask] == hidden[mask])) / n
    return n, p, standard_error(p, n)


def standard_error(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n)


def _bits(u: np.ndarray) -> np.ndarray:
    return np.where(u < 0.5, 1, -1).astype(np.int8)


def _sample(cdfs: np.ndarray, rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF draw from row ``rows[i]`` of ``cdfs`` for each uniform ``u[i]``."""
    k = np.count_nonzero(u[:, None] >= cdfs[rows, :-1], axis=1)
    return k.astype(np.intp)


def _cdf_table(probs: list) -> np.ndarray:
    table = np.cumsum(np.asarray(probs, dtype=float), axis=1)
    return table / table[:, -1:]


def _run_chunks(n: int, seed: int, body, workers: int) -> list:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng.check_seed(seed)
    starts = range(0, n, CHUNK)
    spans = [np.arange(s, min(s + CHUNK, n), dtype=np.uint64) for s in starts]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(body, spans))
    return [body(t) for t in spans]


def _concat(protocol: str, seed: int, parts: list) -> TrialBatch:
    cols = {k: np.concatenate([p[k] for p in parts]) for k in parts[0]}
    return TrialBatch(protocol, seed, **cols)


def _na(size: int) -> np.ndarray:
    return np.zeros(size, dtype=np.int8)


# -- predictive ---------------------------------------------------------------


def simulate_predictive(s: PathState, det, mode: str, n: int, seed: int, workers: int = 1) -> TrialBatch:
    """Predictive game on a fixed input.

    ``mode="wp"``: the phase knob sits at the fringe maximum of port +, and
    Bob predicts the more likely port. ``mode="ww"``: the output splitter is
    removed, the arm is found by a path measurement and Bob predicts it from
    the Helstrom pointer outcome. Arm and port bits use A/- = -1, B/+ = +1.
    """
    if mode == "wp":
        knob = fringe_extrema(s, det).phase_max
        probs = port_probabilities(s, det, knob)
        cdf = _cdf_table([probs])
        guess = 1 if probs[0] >= probs[1] else -1

        def body(trials):
            k = _sample(cdf, np.zeros(len(trials), dtype=np.intp), rng.uniforms(seed, trials, _SLOT_OUTCOME))
            port = np.where(k == 0, 1, -1).astype(np.int8)
            size = len(trials)
            return dict(
                b_ww=_na(size), b_wp=port, basis=_na(size), port_bit=port, pol_bit=_na(size),
                g_ww=_na(size), g_wp=np.full(size, guess, dtype=np.int8),
            )

        return _concat("predictive_wp", seed, _run_chunks(n, seed, body, workers))

    if mode == "ww":
        table = which_way_probabilities(s, det)  # rows arm A, B; cols a', b'
        cdf = _cdf_table([table.ravel()])
        # ML arm per pointer outcome; ties resolve to +1 (arm B)
        guess_for_pointer = np.array(
            [ml_guess({-1: table[0, j], 1: table[1, j]}) for j in range(2)], dtype=np.int8
        )

        def body(trials):
            k = _sample(cdf, np.zeros(len(trials), dtype=np.intp), rng.uniforms(seed, trials, _SLOT_OUTCOME))
            arm = np.where(k < 2, -1, 1).astype(np.int8)
            pointer = k % 2
            size = len(trials)
            return dict(
                b_ww=arm, b_wp=_na(size), basis=_na(size), port_bit=_na(size),
                pol_bit=np.where(pointer == 0, POINTER_BIT["a'"], POINTER_BIT["b'"]).astype(np.int8),
                g_ww=guess_for_pointer[pointer], g_wp=_na(size),
            )

        return _concat("predictive_ww", seed, _run_chunks(n, seed, body, workers))

    raise ValueError(f"mode must be 'ww' or 'wp', got {mode!r}")


def run_predictive(s: PathState, det, mode: str, n: int, seed: int, workers: int = 1) -> GameStats:
    return simulate_predictive(s, det, mode, n, seed, workers).stats()


# -- retrodictive -------------------------------------------------------------

_LABEL_ORDER = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def _label_rows(b_ww: np.ndarray, b_wp: np.ndarray) -> np.ndarray:
    return (2 * (b_ww == -1) + (b_wp == -1)).astype(np.intp)


def simulate_retrodictive(alpha: float, phi: float, E: float, n: int, seed: int, workers: int = 1) -> TrialBatch:
    """Four-state discrimination game; both bits are guessed every run."""
    det = detector_for_efficiency(E)
    probs = [
        outcome_probabilities(make_input_state(InputLabel(bw, bp, alpha, phi)), det)
        for bw, bp in _LABEL_ORDER
    ]
    cdf = _cdf_table(probs)
    g_ww_tab, g_wp_tab = guess_tables(joint_distribution(alpha, phi, E))
    g_ww_of_pol = {b: np.int8(g_ww_tab[b]) for b in (1, -1)}
    g_wp_of_port = {b: np.int8(g_wp_tab[b]) for b in (1, -1)}

    def body(trials):
        b_ww = _bits(rng.uniforms(seed, trials, _SLOT_WW))
        b_wp = _bits(rng.uniforms(seed, trials, _SLOT_WP))
        k = _sample(cdf, _label_rows(b_ww, b_wp), rng.uniforms(seed, trials, _SLOT_OUTCOME))
        pol = _OUTCOME_POL[k]
        port = _OUTCOME_PORT[k]
        return dict(
            b_ww=b_ww, b_wp=b_wp, basis=_na(len(trials)), port_bit=port, pol_bit=pol,
            g_ww=np.where(pol == 1, g_ww_of_pol[1], g_ww_of_pol[-1]).astype(np.int8),
            g_wp=np.where(port == 1, g_wp_of_port[1], g_wp_of_port[-1]).astype(np.int8),
        )

    return _concat("retrodictive", seed, _run_chunks(n, seed, body, workers))


def run_retrodictive(alpha: float, phi: float, E: float, n: int, seed: int, workers: int = 1) -> GameStats:
    return simulate_retrodictive(alpha, phi, E, n, seed, workers).stats()


# -- alternative (single-basis preparation) -------------------------------------

# the two preparation bases are the degenerate rectangles (d_WW, d_WP) = (1, 0) and (0, 1)
WW_BASIS = (math.pi / 2, math.pi / 2)
WP_BASIS = (0.0, math.pi / 2)


def alternative_states() -> dict[tuple[str, int], PathState]:
    alpha, phi = WW_BASIS
    out = {("ww", b): make_input_state(InputLabel(b, 1, alpha, phi)) for b in (1, -1)}
    alpha, phi = WP_BASIS
    out.update({("wp", b): make_input_state(InputLabel(1, b, alpha, phi)) for b in (1, -1)})
    return out


def alternative_guess_rule(det: DetectorModel) -> tuple[dict[int, int], dict[int, int]]:
    """ML guesses ``({pol_bit: g_ww}, {port_bit: g_wp})`` given each announced basis."""
    states = alternative_states()
    probs = {key: outcome_probabilities(st, det) for key, st in states.items()}
    g_ww = {}
    g_wp = {}
    for bit in (1, -1):
        pol_mask = _OUTCOME_POL == bit
        port_mask = _OUTCOME_PORT == bit
        g_ww[bit] = ml_guess({b: float(probs[("ww", b)][pol_mask].sum()) for b in (1, -1)})
        g_wp[bit] = ml_guess({b: float(probs[("wp", b)][port_mask].sum()) for b in (1, -1)})
    return g_ww, g_wp


def simulate_alternative(E: float, n: int, seed: int, averaged: bool = False, workers: int = 1) -> TrialBatch:
    """Alternative game: Alice picks WW or WP uniformly, then a uniform bit in that basis.

    Only the basis bit is encoded. Without ``averaged`` Bob reports just the
    guess for the announced basis; with it he guesses both bits every run and
    the guess of the unencoded bit is scored against Alice's (unused) bit.
    """
    det = detector_for_efficiency(E)
    states = alternative_states()
    keys = (("ww", 1), ("ww", -1), ("wp", 1), ("wp", -1))
    cdf = _cdf_table([outcome_probabilities(states[k], det) for k in keys])
    g_ww_tab, g_wp_tab = alternative_guess_rule(det)

    def body(trials):
        size = len(trials)
        is_ww = rng.uniforms(seed, trials, _SLOT_BASIS) < 0.5
        b_ww = _bits(rng.uniforms(seed, trials, _SLOT_WW))
        b_wp = _bits(rng.uniforms(seed, trials, _SLOT_WP))
        rows = np.where(is_ww, (b_ww == -1).astype(np.intp), 2 + (b_wp == -1).astype(np.intp))
        k = _sample(cdf, rows, rng.uniforms(seed, trials, _SLOT_OUTCOME))
        pol = _OUTCOME_POL[k]
        port = _OUTCOME_PORT[k]
        g_ww = np.where(pol == 1, g_ww_tab[1], g_ww_tab[-1]).astype(np.int8)
        g_wp = np.where(port == 1, g_wp_tab[1], g_wp_tab[-1]).astype(np.int8)
        if not averaged:
            b_ww = np.where(is_ww, b_ww, 0).astype(np.int8)
            b_wp = np.where(is_ww, 0, b_wp).astype(np.int8)
            g_ww = np.where(is_ww, g_ww, 0).astype(np.int8)
            g_wp = np.where(is_ww, 0, g_wp).astype(np.int8)
        return dict(
            b_ww=b_ww, b_wp=b_wp, basis=np.where(is_ww, 1, 2).astype(np.int8),
            port_bit=port, pol_bit=pol, g_ww=g_ww, g_wp=g_wp,
        )

    name = "alternative_averaged" if averaged else "alternative"
    return _concat(name, seed, _run_chunks(n, seed, body, workers))


def run_alternative(E: float, n: int, seed: int, averaged: bool = False, workers: int = 1) -> GameStats:
    return simulate_alternative(E, n, seed, averaged, workers).stats()


# -- frontier -------------------------------------------------------------------


def frontier_sweep(alpha: float, phi: float, E_grid) -> list[tuple[float, float, float]]:
    """``(E, P_WW, P_WP)`` along the optimal retrodictive frontier."""
    out = []
    for E in E_grid:
        E = float(E)
        rep = retrodictive_probabilities(alpha, phi, E)
        if rep.ellipse_lhs is not None and rep.ellipse_ww is not None and rep.ellipse_wp is not None:
            if abs(rep.ellipse_lhs - 1) > 1e-10:
                raise ArithmeticError(f"frontier point off the ellipse at E={E}: {rep.ellipse_lhs!r}")
        out.append((E, rep.p_ww, rep.p_wp))
    return out
