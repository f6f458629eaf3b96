"""Command-line entry point: ``monochar <command> [options]``.

Exit codes: 0 when every check passes, 2 when a verification fails,
1 on usage errors. Options may be preset in a ``key = value`` file given
with ``--config``; command-line flags win.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .characters import character, evaluate, holonomy, string_defect
from .errors import MonocharError
from .fields import (
    MonopoleConfig, QuadratureSpec, curvature_form, flux, line_integral, string_potential,
)
from .simplicial import (
    SCHEMES, IntChain, SimplicialComplex, fundamental_cycle, latitude_loop, shell_mesh,
    sphere_mesh, write_off,
)
from . import verifier

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(obj):
    """Round floats to 12 significant digits, recursively."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}") if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {k: _fmt(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_fmt(v) for v in obj]
    return obj


def _dump(doc) -> str:
    return json.dumps(_fmt(doc), indent=2, ensure_ascii=False)


def read_config(path) -> dict[str, str]:
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _threads() -> int:
    raw = os.environ.get("MONOCHAR_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"MONOCHAR_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"MONOCHAR_THREADS must be a positive integer, got {raw!r}")
    return n


# ---------------------------------------------------------------------------
# parser

def _common() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    p.add_argument("--g", default="0.5", help="magnetic charge (comma list for scan)")
    p.add_argument("--scheme", choices=SCHEMES, default="octahedron")
    p.add_argument("--level", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="also write the JSON report here")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--config", default=None, help="key = value file with option defaults")
    p.add_argument("--edge-rule-order", type=int, default=16)
    p.add_argument("--triangle-mode", choices=("exact_solid_angle", "numeric"),
                   default="exact_solid_angle")
    p.add_argument("--triangle-order", type=int, default=5)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="monochar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mesh", parents=[common], help="generate a mesh, export OFF")
    p.add_argument("--shell", nargs=2, type=float, metavar=("R_INNER", "R_OUTER"))

    sub.add_parser("flux", parents=[common], help="magnetic flux through the sphere")

    p = sub.add_parser("holonomy", parents=[common], help="string-potential holonomy of a loop")
    p.add_argument("--loop", default="equator", help="equator or latitude:<z0>")
    p.add_argument("--pole", choices=("south", "north", "both"), default="south")

    p = sub.add_parser("character", parents=[common], help="evaluate the character on loops")
    p.add_argument("--loops", default="equator", help="comma list of equator / latitude:<z0>")
    p.add_argument("--allow-defective", action="store_true")

    p = sub.add_parser("verify", parents=[common], help="run a verification report")
    p.add_argument("report", choices=("sequence5", "uct", "r2", "retract", "cech"))
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--u", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--r-inner", type=float, default=1.0)
    p.add_argument("--r-outer", type=float, default=2.0)

    p = sub.add_parser("scan", parents=[common], help="quantization scan over charges")
    p.add_argument("--cycles", type=int, default=10)
    return parser


def _parse(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        conf = read_config(args.config)
        known = vars(args)
        bad = sorted(set(conf) - set(known))
        if bad:
            raise UsageError(f"unknown config keys: {', '.join(bad)}")
        # re-parse with file values as defaults so explicit flags still win
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**{k: _coerce(sub, k, v) for k, v in conf.items()})
        args = parser.parse_args(argv)
    return args


def _coerce(parser: argparse.ArgumentParser, dest: str, value: str):
    for action in parser._actions:
        if action.dest == dest:
            if action.nargs == 0:
                return value.lower() in ("1", "true", "yes", "on")
            if action.nargs == 2:
                return [action.type(v) for v in value.replace(",", " ").split()]
            if action.choices and value not in action.choices:
                raise UsageError(f"config {dest}: {value!r} not in {list(action.choices)}")
            return action.type(value) if action.type else value
    raise UsageError(f"unknown config key {dest}")


def _g(args) -> float:
    try:
        return float(args.g)
    except ValueError:
        raise UsageError(f"--g expects a number, got {args.g!r}") from None


def _quad(args) -> QuadratureSpec:
    try:
        return QuadratureSpec(args.edge_rule_order, args.triangle_mode, args.triangle_order)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _loop(K: SimplicialComplex, spec: str) -> IntChain:
    spec = spec.strip()
    if spec == "equator":
        return latitude_loop(K, 0.0)
    if spec.startswith("latitude:"):
        try:
            z0 = float(spec.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad loop spec {spec!r}") from None
        return latitude_loop(K, z0)
    raise UsageError(f"unknown loop {spec!r}; use equator or latitude:<z0>")


def _sphere(args) -> SimplicialComplex:
    try:
        return sphere_mesh(args.scheme, args.level)
    except ValueError as e:
        raise UsageError(str(e)) from None


# ---------------------------------------------------------------------------
# commands

def cmd_mesh(args):
    if args.shell:
        K = shell_mesh(args.scheme, args.level, *args.shell)
    else:
        K = _sphere(args)
        if args.out and args.out.endswith(".off"):
            write_off(K, args.out)
            args.out = None
    doc = {"mesh": K.label, "counts": K.counts(), "euler_characteristic": K.euler_characteristic()}
    return doc, True, None


def cmd_flux(args):
    g = _g(args)
    tol = args.tol if args.tol is not None else 1e-9
    K = _sphere(args)
    phi = flux(MonopoleConfig(g), K, fundamental_cycle(K), _quad(args))
    expected = 4 * math.pi * g
    ok = abs(phi - expected) < tol
    doc = {"phi": phi, "expected": "4*pi*g", "expected_value": expected,
           "error": abs(phi - expected), "g": g, "mesh": K.label, "pass": ok}
    return doc, ok, f"{phi:.12g}"


def cmd_holonomy(args):
    g = _g(args)
    K = _sphere(args)
    C = _loop(K, args.loop)
    cfg = MonopoleConfig(g)
    q = _quad(args)
    poles = ("south", "north") if args.pole == "both" else (args.pole,)
    doc = {"g": g, "mesh": K.label, "loop": args.loop, "potentials": {}}
    for pole in poles:
        A = string_potential(cfg, pole)
        doc["potentials"][pole] = {"line_integral": line_integral(A, K, C, q),
                                   "holonomy": float(holonomy(A, K, C, q))}
    if len(poles) == 2:
        doc["string_defect"] = string_defect(cfg, K, C, "north", "south", q)
    return doc, True, None


def cmd_character(args):
    g = _g(args)
    K = _sphere(args)
    loops = {name.strip(): _loop(K, name) for name in args.loops.split(",") if name.strip()}
    tol = args.tol if args.tol is not None else 1e-9
    chi = character(MonopoleConfig(g), K, tol, allow_defective=args.allow_defective)
    doc = chi.summary()
    doc["mesh"] = K.label
    doc["evaluations"] = {name: float(evaluate(chi, C)) for name, C in loops.items()}
    return doc, True, None


def cmd_verify(args):
    K = _sphere(args)
    g = _g(args)
    if args.report == "sequence5":
        doc = verifier.sequence5_report(K, args.k)
    elif args.report == "uct":
        doc = verifier.uct_report(K)
    elif args.report == "r2":
        u = args.u if args.u is not None else int(round(2 * g))
        doc = verifier.r2_report(curvature_form(MonopoleConfig(g)), u, K)
    elif args.report == "retract":
        shell = shell_mesh(args.scheme, args.level, args.r_inner, args.r_outer)
        doc = verifier.retract_report(K, shell)
    else:
        from .characters import cech_check, cech_rep
        n = args.n if args.n is not None else int(round(2 * g))
        doc = {"report": "cech", "mesh": K.label,
               **cech_check(cech_rep(n, MonopoleConfig(n / 2), K), seed=args.seed)}
    return doc, doc["pass"], None


def cmd_scan(args):
    try:
        g_list = [float(x) for x in args.g.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--g expects a comma list of numbers, got {args.g!r}") from None
    K = _sphere(args)

    def one(g):
        return verifier.quantization_scan(K, [g], seed=args.seed, n_cycles=args.cycles)["rows"][0]

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        rows = list(pool.map(one, g_list))
    doc = {"report": "quantization_scan", "mesh": K.label, "seed": args.seed, "rows": rows,
           "pass": all(r["pass"] for r in rows)}
    lines = [f"{'g':>8} {'period':>10} {'defect':>10} {'cap_disagreement':>18}  pass"]
    for r in rows:
        lines.append(f"{r['g']:>8.4g} {r['period']:>10.6g} {r['defect']:>10.3g} "
                     f"{r['cap_disagreement']:>18.3g}  {r['pass']}")
    return doc, doc["pass"], "\n".join(lines)


COMMANDS = {"mesh": cmd_mesh, "flux": cmd_flux, "holonomy": cmd_holonomy,
            "character": cmd_character, "verify": cmd_verify, "scan": cmd_scan}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = _parse(argv)
        _threads()
        doc, ok, text = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"monochar: error: {e}", file=stderr)
        return EXIT_USAGE
    except MonocharError as e:
        doc = {"error": type(e).__name__, "message": str(e), "pass": False}
        for attr in ("defect", "period"):
            if hasattr(e, attr):
                doc[attr] = getattr(e, attr)
        print(_dump(doc), file=stdout)
        return EXIT_FAIL
    except ValueError as e:
        print(f"monochar: error: {e}", file=stderr)
        return EXIT_USAGE
    if text:
        print(text, file=stdout)
    out = _dump(doc)
    print(out, file=stdout)
    if args.out:
        Path(args.out).write_text(out + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def main():
    sys.exit(run())
