"""Acceptance criteria, one test per criterion.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary lists one
PASS/FAIL line per criterion.
"""
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from mzi_duality.duality import (
    alternative_averaged_probabilities,
    alternative_probabilities,
    distinguishability,
    equal_marginal_efficiency,
    predictability,
    retrodictive_probabilities,
    visibility_scan,
)
from mzi_duality.interferometer import (
    build_detector,
    extract_kraus,
    linear_polarization,
    outcome_probabilities,
)
from mzi_duality.protocols import frontier_sweep, run_alternative, run_retrodictive
from mzi_duality.qmath import trace_norm
from mzi_duality.states import PathState, family_states

criterion = pytest.mark.criterion


def random_state(gen) -> PathState:
    v = gen.normal(size=2) + 1j * gen.normal(size=2)
    return PathState(*(v / np.linalg.norm(v)))


def random_pointer(gen) -> np.ndarray:
    c = gen.normal(size=2) + 1j * gen.normal(size=2)
    return c / np.linalg.norm(c)


def random_detector(gen):
    return build_detector(gen.uniform(-math.pi, math.pi), random_pointer(gen), theta=gen.uniform(0, 2 * math.pi))


def state_with_predictability(P: float, phase: float) -> PathState:
    return PathState.from_weights((1 + P) / 2, phase)


def oracle_distances(alpha: float, phi: float) -> tuple[float, float]:
    """Half trace norms of density-matrix differences of the built family states."""
    st = family_states(alpha, phi)
    d_ww = 0.5 * trace_norm(st[(1, 1)].density() - st[(-1, 1)].density())
    d_wp = 0.5 * trace_norm(st[(1, 1)].density() - st[(1, -1)].density())
    return d_ww, d_wp


def retro_sample(seed=404, size=1000):
    gen = np.random.default_rng(seed)
    return list(
        zip(
            gen.uniform(0.05, math.pi / 2 - 0.05, size),
            gen.uniform(0.05, math.pi - 0.05, size),
            gen.uniform(0.01, 0.99, size),
        )
    )


# -- 1 -----------------------------------------------------------------------------------


@criterion(1, "predictive duality D^2 + V^2 = 1 (500 random pure configurations, < 10 s)")
def test_c1_predictive_equality():
    gen = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(500):
        s, det = random_state(gen), random_detector(gen)
        V = visibility_scan(s, det)
        D = distinguishability(s, det)
        worst = max(worst, abs(D * D + V * V - 1))
    elapsed = time.perf_counter() - start
    assert worst < 1e-9
    assert elapsed < 10.0


# -- 2 -----------------------------------------------------------------------------------


@criterion(2, "special cases E=0, P=0, E=1, P=1 (100 random samples each)")
def test_c2_special_cases():
    gen = np.random.default_rng(202)
    for _ in range(100):
        # E = 0: no rotation, any pointer
        s = random_state(gen)
        det = build_detector(0.0, random_pointer(gen), theta=gen.uniform(0, 6))
        assert abs(distinguishability(s, det) - predictability(s)) < 1e-12
        # P = 0: balanced input, random pointer and rotation
        s = state_with_predictability(0.0, gen.uniform(0, 2 * math.pi))
        det = random_detector(gen)
        assert abs(distinguishability(s, det) - det.efficiency) < 1e-12
        # E = 1: quarter-turn rotation with the linear pointer
        s = random_state(gen)
        det = build_detector(math.pi / 2, linear_polarization(gen.uniform(0, math.pi)))
        assert abs(det.efficiency - 1) < 1e-12
        assert abs(distinguishability(s, det) - 1) < 1e-12
        # P = 1: single-arm input
        s = PathState(np.exp(1j * gen.uniform(0, 6)), 0) if gen.random() < 0.5 else PathState(0, 1)
        assert abs(distinguishability(s, random_detector(gen)) - 1) < 1e-12


# -- 3 -----------------------------------------------------------------------------------


@criterion(3, "balanced linear pointer efficiency E = |sin beta| (1000-point grid)")
def test_c3_efficiency():
    betas = np.linspace(-math.pi, math.pi, 1000)
    err = max(abs(build_detector(b).efficiency - abs(math.sin(b))) for b in betas)
    assert err < 1e-12


# -- 4 -----------------------------------------------------------------------------------


@criterion(4, "retrodictive ellipse = 1 with trace-distance oracle (1000 samples)")
def test_c4_retrodictive_ellipse():
    worst = 0.0
    for alpha, phi, E in retro_sample():
        d_ww, d_wp = oracle_distances(alpha, phi)
        rep = retrodictive_probabilities(alpha, phi, E)
        lhs = ((2 * rep.p_ww - 1) / d_ww) ** 2 + ((2 * rep.p_wp - 1) / d_wp) ** 2
        worst = max(worst, abs(lhs - 1))
    assert worst < 1e-10


# -- 5 -----------------------------------------------------------------------------------


@criterion(5, "distance constraint d_WW^2 + d_WP^2 <= 1, equality at phi = pi/2")
def test_c5_distance_constraint():
    for alpha, phi, _ in retro_sample():
        d_ww, d_wp = oracle_distances(alpha, phi)
        assert d_ww**2 + d_wp**2 <= 1 + 1e-10
    for alpha in np.linspace(0.0, math.pi / 2, 101):
        d_ww, d_wp = oracle_distances(alpha, math.pi / 2)
        assert abs(d_ww**2 + d_wp**2 - 1) < 1e-9


# -- 6 -----------------------------------------------------------------------------------


@criterion(6, "Kraus probabilities equal Born probabilities, completeness (< 5 s)")
def test_c6_povm_equivalence():
    gen = np.random.default_rng(606)
    start = time.perf_counter()
    for _ in range(1000):
        s, det = random_state(gen), random_detector(gen)
        knob = gen.uniform(0, 2 * math.pi)
        kraus = extract_kraus(det, knob)
        born = outcome_probabilities(s, det, knob)
        assert np.max(np.abs(born - kraus.probabilities(s.density()))) < 1e-10
        assert kraus.completeness_error() < 1e-10
    assert time.perf_counter() - start < 5.0


# -- 7 -----------------------------------------------------------------------------------

C7_SEEDS = [1009 * k + 17 for k in range(20)]


@criterion(7, "retrodictive Monte Carlo at E=0.6, alpha=pi/6, phi=pi/2 (20 seeds x 1e6, < 60 s)")
def test_c7_monte_carlo():
    alpha, phi, E, n = math.pi / 6, math.pi / 2, 0.6, 10**6
    rep = retrodictive_probabilities(alpha, phi, E)
    assert round(rep.p_ww, 5) == 0.65
    assert round(rep.p_wp, 5) == 0.84641
    sig_ww = math.sqrt(rep.p_ww * (1 - rep.p_ww) / n)
    sig_wp = math.sqrt(rep.p_wp * (1 - rep.p_wp) / n)
    start = time.perf_counter()
    hits = 0
    for seed in C7_SEEDS:
        s = run_retrodictive(alpha, phi, E, n, seed)
        hits += abs(s.p_ww_hat - rep.p_ww) < 3 * sig_ww and abs(s.p_wp_hat - rep.p_wp) < 3 * sig_wp
    assert time.perf_counter() - start < 60.0
    assert hits >= 19


# -- 8 -----------------------------------------------------------------------------------


def circle_sum(stats) -> tuple[float, float]:
    """(2p_ww - 1)^2 + (2p_wp - 1)^2 and its propagated standard error."""
    x, y = 2 * stats.p_ww_hat - 1, 2 * stats.p_wp_hat - 1
    return x * x + y * y, math.hypot(4 * x * stats.se_ww, 4 * y * stats.se_wp)


@criterion(8, "alternative game circle sum 1, averaged sum 1/4 (n = 1e6)")
@pytest.mark.parametrize("E", [0.2, 0.5, 1 / math.sqrt(2), 0.9])
def test_c8_alternative_circle(E):
    n = 10**6
    total, sigma = circle_sum(run_alternative(E, n, 8000 + int(E * 1000)))
    assert abs(total - 1) <= 3 * sigma
    total, sigma = circle_sum(run_alternative(E, n, 9000 + int(E * 1000), averaged=True))
    assert abs(total - 0.25) <= 3 * sigma
    # closed forms behind both targets
    p = alternative_probabilities(E)
    q = alternative_averaged_probabilities(E)
    assert abs((2 * p[0] - 1) ** 2 + (2 * p[1] - 1) ** 2 - 1) < 1e-12
    assert abs((2 * q[0] - 1) ** 2 + (2 * q[1] - 1) ** 2 - 0.25) < 1e-12


# -- 9 -----------------------------------------------------------------------------------


@criterion(9, "retrodictive frontier dominates averaged alternative game (margin > 0.01)")
def test_c9_frontier_dominance():
    alpha, phi = math.pi / 4, math.pi / 2
    d_ww, d_wp = oracle_distances(alpha, phi)
    assert abs(d_ww - 2**-0.5) < 1e-12 and abs(d_wp - 2**-0.5) < 1e-12
    E_eq = equal_marginal_efficiency(d_ww, d_wp)
    [(_, f_ww, f_wp)] = frontier_sweep(alpha, phi, [E_eq])
    assert abs(f_ww - f_wp) < 1e-12
    q_ww, q_wp = alternative_averaged_probabilities(1 / math.sqrt(2))
    assert abs(q_ww - q_wp) < 1e-12
    assert f_ww - q_ww > 0.01


# -- 10 ----------------------------------------------------------------------------------

CLI_COMMANDS = [
    ["report", "--E", "0.6", "--alpha", "0.5235988", "--phi", "1.5707963", "--w1", "0.7", "--phi0", "0.3"],
    ["fringe", "--E", "0.5"],
    ["fringe", "--beta", "0.4", "--format", "json"],
    ["frontier", "--alpha", "0.7", "--phi", "1.9"],
    ["frontier", "--alpha", "0.7", "--phi", "1.9", "--format", "json"],
    ["game", "retrodictive", "--E", "0.6", "--alpha", "0.5", "--phi", "1.5", "--n", "20000", "--seed", "42"],
    ["game", "alternative", "--E", "0.5", "--n", "20000", "--seed", "42"],
    ["game", "alternative", "--E", "0.5", "--n", "20000", "--seed", "42", "--averaged"],
    ["game", "predictive", "--mode", "ww", "--E", "0.5", "--w1", "0.6", "--n", "20000", "--seed", "42"],
    ["game", "predictive", "--mode", "wp", "--E", "0.5", "--w1", "0.6", "--n", "20000", "--seed", "42"],
]


def _run_cli(argv, workdir, tag):
    out = workdir / f"{tag}.out"
    extra = ["--trials-out", str(workdir / f"{tag}.trials")] if argv[0] == "game" else []
    proc = subprocess.run(
        [sys.executable, "-m", "mzi_duality", *argv, *extra, "--out", str(out)],
        capture_output=True,
        env={k: v for k, v in os.environ.items() if k != "SIM_SEED"},
    )
    assert proc.returncode == 0, proc.stderr
    files = [out.read_bytes()]
    if extra:
        files.append((workdir / f"{tag}.trials").read_bytes())
    return files


@criterion(10, "byte-identical CLI output across repeated runs, every command")
@pytest.mark.parametrize("argv", CLI_COMMANDS, ids=[" ".join(c[:2]) + f"-{i}" for i, c in enumerate(CLI_COMMANDS)])
def test_c10_determinism(argv, tmp_path):
    first = _run_cli(argv, tmp_path, "first")
    second = _run_cli(argv, tmp_path, "second")
    assert all(len(b) > 0 for b in first)
    assert first == second
