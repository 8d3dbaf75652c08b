"""Command-line front end.

    mzi-duality report   --alpha A --phi F --E E [--w1 W --phi0 P]
    mzi-duality fringe   --E E [--w1 W --phi0 P] [--grid N]
    mzi-duality frontier --alpha A --phi F [--grid N]
    mzi-duality game     {retrodictive,alternative,predictive} --E E --n N --seed S

Angles are radians unless ``--degrees`` is given. Output goes to stdout or,
with ``--out``, to a file written atomically. Exit codes: 0 ok, 1 runtime
error, 2 usage error.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import duality, protocols
from .interferometer import build_detector, detector_for_efficiency, port_probabilities
from .states import PathState

SEED_ENV = "SIM_SEED"


class RuntimeFailure(Exception):
    pass


# -- formatting ------------------------------------------------------------------


def fmt(value) -> str:
    """Shortest round-trip text for a CSV cell; ``None`` becomes an empty cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def to_csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    except OSError as exc:
        raise RuntimeFailure(f"cannot write to {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise RuntimeFailure(f"cannot write to {path}: {exc}") from exc


# -- argument handling -------------------------------------------------------------


def _detector_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--E", type=float, help="which-way detector efficiency in [0, 1]")
    g.add_argument("--beta", type=float, help="Faraday rotation angle; E = |sin beta|")


def _state_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--w1", type=float, default=0.5, help="weight of arm A for the fixed input (default 0.5)")
    p.add_argument("--phi0", type=float, default=0.0, help="input phase of arm B (default 0)")


def _family_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.0, help="preparation-family angle in [0, pi/2] (default 0)")
    p.add_argument("--phi", type=float, default=0.0, help="preparation-family phase in [0, pi] (default 0)")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--degrees", action="store_true", help="read angle arguments in degrees")
    p.add_argument("--out", default=None, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mzi-duality", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    rep = sub.add_parser("report", help="predictive and retrodictive duality report (JSON)")
    _family_args(rep)
    _detector_args(rep)
    _state_args(rep)
    rep.add_argument("--grid", type=int, default=720, help="fringe grid points (>= 64)")
    _common(rep)

    fr = sub.add_parser("fringe", help="port-+ probability versus phase")
    _detector_args(fr)
    _state_args(fr)
    fr.add_argument("--grid", type=int, default=720)
    fr.add_argument("--format", choices=("csv", "json"), default="csv")
    _common(fr)

    fo = sub.add_parser("frontier", help="retrodictive (P_WW, P_WP) frontier over E")
    _family_args(fo)
    fo.add_argument("--grid", type=int, default=101, help="number of E values in [0, 1] (>= 2)")
    fo.add_argument("--format", choices=("csv", "json"), default="csv")
    _common(fo)

    ga = sub.add_parser("game", help="Monte Carlo guessing game")
    ga.add_argument("protocol", choices=("retrodictive", "alternative", "predictive"))
    _family_args(ga)
    _detector_args(ga)
    _state_args(ga)
    ga.add_argument("--mode", choices=("ww", "wp"), default="ww", help="predictive game only")
    ga.add_argument("--averaged", action="store_true", help="alternative game: guess both bits every run")
    ga.add_argument("--n", type=int, default=100000, help="number of trials")
    ga.add_argument("--seed", type=int, default=None, help=f"RNG seed (falls back to ${SEED_ENV}, then 0)")
    ga.add_argument("--workers", type=int, default=1)
    ga.add_argument("--trials-out", default=None, help="per-trial CSV output file")
    _common(ga)
    return parser


def _validate(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if args.degrees:
        for name in ("alpha", "phi", "phi0", "beta"):
            if getattr(args, name, None) is not None:
                setattr(args, name, math.radians(getattr(args, name)))

    def bad(msg):
        parser.error(msg)

    vals = [v for v in vars(args).values() if isinstance(v, float)]
    if any(not math.isfinite(v) for v in vals):
        bad("numeric arguments must be finite")
    if getattr(args, "alpha", None) is not None and not 0.0 <= args.alpha <= math.pi / 2:
        bad(f"--alpha must lie in [0, pi/2], got {args.alpha}")
    if getattr(args, "phi", None) is not None and not 0.0 <= args.phi <= math.pi:
        bad(f"--phi must lie in [0, pi], got {args.phi}")
    if getattr(args, "E", None) is not None and not 0.0 <= args.E <= 1.0:
        bad(f"--E must lie in [0, 1], got {args.E}")
    if getattr(args, "w1", None) is not None and not 0.0 <= args.w1 <= 1.0:
        bad(f"--w1 must lie in [0, 1], got {args.w1}")
    if args.command in ("report", "fringe") and args.grid < 64:
        bad("--grid must be >= 64")
    if args.command == "frontier" and args.grid < 2:
        bad("--grid must be >= 2")
    if args.command == "game":
        if args.n < 1:
            bad("--n must be >= 1")
        if args.workers < 1:
            bad("--workers must be >= 1")
        if args.seed is None:
            env = os.environ.get(SEED_ENV)
            try:
                args.seed = int(env) if env not in (None, "") else 0
            except ValueError:
                bad(f"${SEED_ENV} is not an integer: {env!r}")
        if not 0 <= args.seed < 2**64:
            bad("--seed must be an unsigned 64-bit integer")


def _detector(args):
    """Detector plus the efficiency it realizes; E and beta are converted explicitly."""
    if args.beta is not None:
        det = build_detector(args.beta)
        return det, abs(math.sin(args.beta)), args.beta
    det = detector_for_efficiency(args.E)
    return det, args.E, det.beta


def _state(args) -> PathState:
    return PathState.from_weights(args.w1, args.phi0)


# -- commands ------------------------------------------------------------------------


def cmd_report(args) -> str:
    det, E, beta = _detector(args)
    s = _state(args)
    pred = duality.predictive_report(s, det, args.grid)
    retro = duality.retrodictive_probabilities(args.alpha, args.phi, E)
    return to_json(
        {
            "command": "report",
            "input": {"alpha": args.alpha, "phi": args.phi, "E": E, "beta": beta,
                      "w1": args.w1, "phi0": args.phi0, "grid": args.grid},
            "predictive": dataclasses.asdict(pred),
            "retrodictive": dataclasses.asdict(retro),
        }
    )


def fringe_rows(args) -> list[tuple[float, float]]:
    det, _, _ = _detector(args)
    phases = np.arange(args.grid) * (2 * math.pi / args.grid)
    p_plus = port_probabilities(_state(args), det, phases)[:, 0]
    return [(float(x), float(p)) for x, p in zip(phases, p_plus)]


def cmd_fringe(args) -> str:
    rows = fringe_rows(args)
    if args.format == "csv":
        return to_csv(["phase", "P_plus"], rows)
    _, E, beta = _detector(args)
    return to_json(
        {
            "command": "fringe",
            "input": {"E": E, "beta": beta, "w1": args.w1, "phi0": args.phi0, "grid": args.grid},
            "rows": [{"phase": x, "P_plus": p} for x, p in rows],
        }
    )


def cmd_frontier(args) -> str:
    grid = [i / (args.grid - 1) for i in range(args.grid)]
    rows = protocols.frontier_sweep(args.alpha, args.phi, grid)
    if args.format == "csv":
        return to_csv(["E", "P_WW", "P_WP"], rows)
    return to_json(
        {
            "command": "frontier",
            "input": {"alpha": args.alpha, "phi": args.phi, "grid": args.grid},
            "rows": [{"E": e, "P_WW": a, "P_WP": b} for e, a, b in rows],
        }
    )


TRIAL_COLUMNS = ["trial", "b_ww", "b_wp", "port_bit", "pol_bit", "g_ww", "g_wp"]


def trials_csv(batch: protocols.TrialBatch) -> str:
    cell = {-1: "-1", 0: "", 1: "1"}
    cols = [batch.b_ww, batch.b_wp, batch.port_bit, batch.pol_bit, batch.g_ww, batch.g_wp]
    cols = [[cell[v] for v in c.tolist()] for c in cols]
    lines = [",".join(TRIAL_COLUMNS)]
    lines.extend(f"{i},{','.join(vals)}" for i, vals in enumerate(zip(*cols)))
    return "\n".join(lines) + "\n"


def cmd_game(args) -> tuple[str, str | None]:
    det, E, beta = _detector(args)
    target = {}
    if args.protocol == "retrodictive":
        batch = protocols.simulate_retrodictive(args.alpha, args.phi, E, args.n, args.seed, args.workers)
        rep = duality.retrodictive_probabilities(args.alpha, args.phi, E)
        target = {"p_ww": rep.p_ww, "p_wp": rep.p_wp}
    elif args.protocol == "alternative":
        batch = protocols.simulate_alternative(E, args.n, args.seed, args.averaged, args.workers)
        f = duality.alternative_averaged_probabilities if args.averaged else duality.alternative_probabilities
        p_ww, p_wp = f(E)
        target = {"p_ww": p_ww, "p_wp": p_wp}
    else:
        s = _state(args)
        batch = protocols.simulate_predictive(s, det, args.mode, args.n, args.seed, args.workers)
        if args.mode == "ww":
            target = {"p_ww": (1 + duality.distinguishability(s, det)) / 2}
        else:
            target = {"p_wp": (1 + duality.visibility_scan(s, det)) / 2}
    inputs = {"protocol": args.protocol, "alpha": args.alpha, "phi": args.phi, "E": E, "beta": beta,
              "w1": args.w1, "phi0": args.phi0,
              "mode": args.mode if args.protocol == "predictive" else None,
              "averaged": args.averaged if args.protocol == "alternative" else None,
              "n": args.n, "seed": args.seed}
    text = to_json(
        {"command": "game", "input": inputs, "stats": dataclasses.asdict(batch.stats()), "target": target}
    )
    return text, trials_csv(batch) if args.trials_out else None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    try:
        if args.command == "report":
            write_output(cmd_report(args), args.out)
        elif args.command == "fringe":
            write_output(cmd_fringe(args), args.out)
        elif args.command == "frontier":
            write_output(cmd_frontier(args), args.out)
        else:
            text, trials = cmd_game(args)
            if trials is not None:
                write_output(trials, args.trials_out)
            write_output(text, args.out)
    except (RuntimeFailure, ArithmeticError, ValueError) as exc:
        print(f"mzi-duality: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
