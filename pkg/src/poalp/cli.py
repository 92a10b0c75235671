"""Command-line front end.

    poalp compute  --w covering --f es --n 5
    poalp design   --w coverage --p 0.5 --n 8
    poalp instance --w covering --f mc --n 3 --out witness.json
    poalp verify   --game witness.json --lambda 1 --mu 0.5
    poalp sweep    --w covering --f gairing --n-min 1 --n-max 15 --csv out.csv

``--w`` and ``--f`` take a preset name, a JSON array literal or a path to a
JSON file (an array or {"n": .., "values": [..]}). JSON goes to stdout unless
``--out`` is given; diagnostics go to stderr. Exit codes: 0 ok, 2 invalid
input, 3 failed precondition, 4 resource limit, 5 internal or numeric error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .core import Mechanism, WelfareBasis, preset_mechanism, preset_welfare
from .design import optimize_mechanism
from .errors import InvalidArgumentError, PoaError
from .games import (
    GameInstance,
    budget_balance_gap,
    check_smoothness,
    enumerate_equilibria,
    is_nash,
    poa_of_game,
    welfare,
)
from .poa import poa, solve_primal
from .witness import WitnessGame, build_worst_case
from .games import nonpositive_f1_game

EXIT_OK, EXIT_INVALID, EXIT_PRECONDITION, EXIT_LIMIT, EXIT_INTERNAL = 0, 2, 3, 4, 5

_METHOD_FLAGS = {
    "primal": "primal",
    "dual": "dual_boundary",
    "dual-full": "dual_full",
    "corollary": "corollary",
    "explicit": "explicit",
}
_W_PRESETS = {"covering", "coverage"}


@dataclass
class CommandResult:
    exit_code: int
    output: str = ""
    message: str = ""


def _round(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def _dumps(payload) -> str:
    return json.dumps(_round(payload), indent=2, allow_nan=False) + "\n"


def _load_vector(spec: str, flag: str) -> list[float] | None:
    text = spec.strip().replace("−", "-")
    if text.startswith("["):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidArgumentError(f"{flag}: invalid JSON array {spec!r}: {exc}") from exc
    else:
        path = Path(spec)
        if not path.is_file():
            return None
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidArgumentError(f"{flag}: cannot read {path}: {exc}") from exc
        if isinstance(data, dict):
            if not isinstance(data.get("values"), list):
                raise InvalidArgumentError(f"{flag}: {path}: field 'values' must be an array")
            if "n" in data and data["n"] != len(data["values"]):
                raise InvalidArgumentError(f"{flag}: {path}: field 'n' disagrees with 'values'")
            data = data["values"]
    if not isinstance(data, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in data
    ):
        raise InvalidArgumentError(f"{flag}: expected an array of numbers, got {spec!r}")
    return [float(v) for v in data]


def _welfare(args, n: int) -> WelfareBasis:
    if args.w in _W_PRESETS:
        return preset_welfare(args.w, n, args.p)
    values = _load_vector(args.w, "--w")
    if values is None:
        raise InvalidArgumentError(f"--w: {args.w!r} is neither a preset, a JSON array nor a file")
    return WelfareBasis(values).truncate(n)


def _mechanism(spec: str, w: WelfareBasis, n: int) -> Mechanism:
    try:
        return preset_mechanism(spec, n, w)
    except InvalidArgumentError:
        pass
    values = _load_vector(spec, "--f")
    if values is None:
        raise InvalidArgumentError(f"--f: {spec!r} is neither a preset, a JSON array nor a file")
    return Mechanism(values).truncate(n)


def _cmd_compute(args):
    w = _welfare(args, args.n)
    f = _mechanism(args.f, w, args.n)
    report = poa(f, w, args.n, _METHOD_FLAGS[args.method])
    return report.to_dict(), report.note


def _cmd_design(args):
    w = _welfare(args, args.n)
    return optimize_mechanism(w, args.n).to_dict(), ""


def _cmd_instance(args):
    w = _welfare(args, args.n)
    f = _mechanism(args.f, w, args.n)
    if f(1) <= 0:
        game, eq = nonpositive_f1_game(w, f)
        witness = WitnessGame(game, eq, (0,), 0.0)
        return witness.to_dict(), "f(1) <= 0: emitting the one-agent game with PoA 0"
    primal = solve_primal(f, w, args.n)
    return build_worst_case(primal.theta, f, w, args.n).to_dict(), ""


def _cmd_verify(args):
    path = Path(args.game)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidArgumentError(f"--game: cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidArgumentError(f"--game: {path}: expected a JSON object")
    try:
        game = GameInstance.from_dict(data)
    except InvalidArgumentError as exc:
        raise InvalidArgumentError(f"--game: {path}: {exc}") from exc
    equilibria = enumerate_equilibria(game)
    max_gap, min_gap = budget_balance_gap(game)
    out = {
        "n": game.n,
        "num_equilibria": len(equilibria),
        "equilibria": [list(a) for a in equilibria],
        "min_equilibrium_welfare": min(welfare(game, a) for a in equilibria) if equilibria else None,
        "max_welfare": max(welfare(game, game.allocation(p)) for p in range(game.n_profiles)),
        "poa": poa_of_game(game),
        "budget_balance_gap": {"max": max_gap, "min": min_gap},
        "smoothness": None,
    }
    if "designated_equilibrium" in data:
        witness = WitnessGame.from_dict(data)
        out["predicted_ratio"] = witness.predicted_ratio
        out["designated_equilibrium_is_nash"] = is_nash(game, witness.designated_equilibrium)
        out["designated_ratio"] = welfare(game, witness.designated_equilibrium) / welfare(
            game, witness.designated_optimum
        )
    if (args.lam is None) != (args.mu is None):
        raise InvalidArgumentError("--lambda and --mu must be given together")
    if args.lam is not None:
        res = check_smoothness(game, args.lam, args.mu)
        out["smoothness"] = {
            "lambda": args.lam,
            "mu": args.mu,
            "holds": res.holds,
            "worst_violation": res.worst_violation,
            "witness_pair": None if res.witness_pair is None else [list(a) for a in res.witness_pair],
        }
    return out, ""


def _sweep_rows(args):
    if args.n_min < 1 or args.n_max < args.n_min:
        raise InvalidArgumentError("need 1 <= --n-min <= --n-max")
    for n in range(args.n_min, args.n_max + 1):
        w = _welfare(args, n)
        f = optimize_mechanism(w, n).f_opt if args.f == "opt" else _mechanism(args.f, w, n)
        rep = poa(f, w, n, _METHOD_FLAGS[args.method])
        yield [
            n,
            _fmt(rep.poa),
            _fmt(rep.lambda_star),
            _fmt(rep.mu_star),
            json.dumps(_round(list(f.values))),
        ]


def _fmt(x):
    return "" if x is None else repr(float(f"{x:.12g}"))


def _cmd_sweep(args):
    rows = list(_sweep_rows(args))
    header = ["n", "poa", "lambda_star", "mu_star", "f_entries"]
    target = Path(args.csv)
    try:
        with target.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\r\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise InvalidArgumentError(f"--csv: cannot write {target}: {exc}") from exc
    return None, f"wrote {len(rows)} rows to {target}"


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poalp", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_f=True, with_n=True):
        p.add_argument("--w", required=True, help="covering | coverage | JSON array | file")
        p.add_argument("--p", type=float, default=None, help="success probability for coverage")
        if with_f:
            p.add_argument("--f", required=True, help="es | mc | gairing | JSON array | file")
        if with_n:
            p.add_argument("--n", type=int, required=True, help="maximum number of agents")
        p.add_argument("--out", default=None, help="write JSON here instead of stdout")

    p = sub.add_parser("compute", help="price of anarchy of (f, w, n)")
    common(p)
    p.add_argument("--method", choices=list(_METHOD_FLAGS), default="dual")
    p.set_defaults(handler=_cmd_compute)

    p = sub.add_parser("design", help="mechanism maximizing the price of anarchy")
    common(p, with_f=False)
    p.set_defaults(handler=_cmd_design)

    p = sub.add_parser("instance", help="worst-case game attaining the price of anarchy")
    common(p)
    p.set_defaults(handler=_cmd_instance)

    p = sub.add_parser("verify", help="equilibria, PoA, budget balance and smoothness of a game")
    p.add_argument("--game", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("sweep", help="price of anarchy for a range of n, as CSV")
    common(p, with_n=False)
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--csv", required=True)
    p.add_argument("--method", choices=list(_METHOD_FLAGS), default="dual")
    p.set_defaults(handler=_cmd_sweep)
    return parser


def run(argv=None) -> CommandResult:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return CommandResult(EXIT_OK if exc.code == 0 else EXIT_INVALID)
    try:
        payload, message = args.handler(args)
        output = "" if payload is None else _dumps(payload)
        if output and args.out:
            try:
                Path(args.out).write_text(output)
            except OSError as exc:
                raise InvalidArgumentError(f"--out: cannot write {args.out}: {exc}") from exc
            output = ""
    except PoaError as exc:
        return CommandResult(exc.exit_code, message=f"error: {exc}")
    return CommandResult(EXIT_OK, output, message)


def main(argv=None) -> int:
    result = run(argv)
    if result.output:
        sys.stdout.write(result.output)
    if result.message:
        print(result.message, file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
