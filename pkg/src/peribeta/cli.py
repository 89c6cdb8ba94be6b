"""Command line interface: ``peribeta <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 self-check mismatch, 3 budget
exhausted.  Report subcommands (classify, expand, check, gaps, gamma, audit)
print JSON; artifact subcommands (tile, repro) print a short text summary
unless ``--json`` is given.

``--config FILE`` loads a RunConfig whose values become the defaults of the
options the subcommand has (explicit flags still win), and ``--save-config
FILE`` writes the effective configuration under ``--out``.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .classify import classify
from .config import RunConfig
from .errors import BudgetExceeded, DomainError, InvalidBaseError, PeribetaError
from .expansion import (
    DEFAULT_BUDGET,
    expand,
    expansion_of_one,
    format_digits,
    orbit_returns,
    successor_gaps,
)
from .field import FieldElement, parse_base
from .gamma import gamma_scan, interval_scan
from .io import dumps, write_counterexamples_csv, write_json, write_points_csv, write_raster

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_BUDGET = 0, 1, 2, 3
EXPAND_SCHEMA = "peribeta.expand/1"
CHECK_SCHEMA = "peribeta.check/1"
GAPS_SCHEMA = "peribeta.gaps/1"
TILE_SCHEMA = "peribeta.tile/1"
AUDIT_SCHEMA = "peribeta.audit/1"
REPRO_SCHEMA = "peribeta.repro/1"

ETA = "-1,-1,0,1"
FIG5 = "-1,2,-3,1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    env = os.environ.get("PERIBETA_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        raise UsageError(f"PERIBETA_THREADS must be an integer, got {env!r}")


def _base(text, bits=None):
    if text is None:
        raise UsageError("--base is required (on the command line or in --config)")
    try:
        base = parse_base(text)
    except InvalidBaseError as exc:
        raise UsageError(f"invalid base: {exc}")
    return base.refined(bits) if bits else base


def _element(base, text):
    try:
        if ";" in text:
            return FieldElement.parse(base.minpoly, text)
        return FieldElement.from_rational(base.minpoly, Fraction(text))
    except (ValueError, ZeroDivisionError, DomainError) as exc:
        raise UsageError(f"malformed number {text!r}: {exc}")


def _complex(text):
    try:
        parts = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"malformed point {text!r}, expected re,im")
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2:
        raise UsageError(f"malformed point {text!r}, expected re,im")
    return complex(parts[0], parts[1])


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid value {text!r}")
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
        return v
    return conv


def _emit(obj, as_json=True, text=None):
    if as_json or text is None:
        sys.stdout.write(dumps(obj))
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


# ---------------------------------------------------------------------------
# subcommands

def cmd_classify(args):
    base = _base(args.base, args.precision_bits)
    _emit(classify(base, args.search_bound).to_dict())
    return EXIT_OK


def _expansion_dict(base, x, e):
    A = base.alphabet_size
    return {
        "schema": EXPAND_SCHEMA,
        "base": base.minpoly.to_text(),
        "x": x.serialize(),
        "preperiod": format_digits(e.preperiod, A),
        "period": format_digits(e.period, A),
        "purely_periodic": e.purely_periodic,
        "finite": e.is_finite,
        "steps": e.steps,
    }


def cmd_expand(args):
    base = _base(args.base, args.precision_bits)
    x = _element(base, args.x)
    e = expand(x, base, args.budget, engine=args.engine)
    if e.truncated:
        raise BudgetExceeded(f"orbit longer than {args.budget} steps")
    _emit(_expansion_dict(base, x, e))
    return EXIT_OK


def cmd_check(args):
    """Periodicity verdict from independent engines; exit 2 if they disagree."""
    base = _base(args.base, args.precision_bits)
    x = _element(base, args.x)
    verdicts = {}
    for engine in ("kernel", "hash"):
        e = expand(x, base, args.budget, engine=engine)
        if e.truncated:
            raise BudgetExceeded(f"orbit longer than {args.budget} steps")
        verdicts[engine] = e.purely_periodic
    verdicts["orbit_return"] = orbit_returns(x, base, args.budget)
    out = {"schema": CHECK_SCHEMA, "base": base.minpoly.to_text(), "x": x.serialize(),
           "verdicts": verdicts}
    agree = len(set(verdicts.values())) == 1
    if args.ito_rao:
        from .tiling import geometry, ito_rao_membership, subtile_raster
        g = geometry(base)
        depth = args.depth or g.depth_for_cell(args.cell)
        r = subtile_raster(base, depth, args.cell)
        ir = ito_rao_membership(x, base, r)
        out["ito_rao"] = {"cell": args.cell, "depth": depth, "verdict": ir}
        if ir != "uncertain":
            agree = agree and ((ir == "inside") == verdicts["kernel"])
    out["purely_periodic"] = verdicts["kernel"]
    out["agree"] = agree
    _emit(out)
    return EXIT_OK if agree else EXIT_MISMATCH


def cmd_gaps(args):
    base = _base(args.base, args.precision_bits)
    one = expansion_of_one(base)
    A = base.alphabet_size
    gaps = successor_gaps(base)
    _emit({
        "schema": GAPS_SCHEMA,
        "base": base.minpoly.to_text(),
        "d_one": {"preperiod": format_digits(one.d_one.preperiod, A),
                  "period": format_digits(one.d_one.period, A)},
        "d_star": {"preperiod": format_digits(one.d_star.preperiod, A),
                   "period": format_digits(one.d_star.period, A)},
        "m": one.m,
        "n": one.n,
        "classes": len(gaps),
        "gaps": [g.serialize() for g in gaps],
        "gap_values": [float(g) for g in gaps],
    })
    return EXIT_OK


def _tile_clouds(base, depth, subtiles, around):
    from .tiling import central_tile_cloud, geometry, subtile_cloud, tile_cloud, tile_inventory
    if around is not None:
        return [tile_cloud(base, y, depth) for y, _ in tile_inventory(base, 0j, around)]
    if subtiles:
        return [subtile_cloud(base, i, depth) for i in range(geometry(base).size)]
    return [central_tile_cloud(base, depth)]


def _raster_summary(raster, clouds=None):
    mult = raster.multiplicity
    occ = raster.occupancy
    out = {
        "cell": raster.cell,
        "origin": [raster.x0, raster.y0],
        "shape": [raster.ny, raster.nx],
        "labels": list(raster.labels),
        "occupied_cells": [int(o.sum()) for o in occ],
        "max_multiplicity": int(mult.max()),
        "multi_label_cells": int((mult >= 2).sum()),
    }
    if clouds is not None:
        out["points"] = [len(c) for c in clouds]
    if raster.accuracy is not None:
        out["accuracy"] = raster.accuracy
    return out


def cmd_tile(args):
    from .tiling import geometry, rasterize
    base = _base(args.base, args.precision_bits)
    g = geometry(base)
    depth = args.depth if args.depth is not None else g.depth_for_cell(args.cell)
    clouds = _tile_clouds(base, depth, args.subtiles, args.tiles_around)
    raster = rasterize(clouds, None, args.cell)
    raster.accuracy = g.accuracy(depth)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = args.name
    written = []
    if not args.no_csv:
        written.append(write_points_csv(out / f"{stem}.csv", clouds, base.coord_kinds))
    if not args.no_raster:
        written.append(write_raster(out / stem, raster))
    summary = {"schema": TILE_SCHEMA, "base": base.minpoly.to_text(), "depth": depth}
    summary.update(_raster_summary(raster, clouds))
    summary["files"] = [p.name for p in written]
    if not args.no_report:
        summary["files"].append(f"{stem}.json")
        write_json(out / f"{stem}.json", summary)
    _emit(summary, args.json, "wrote " + ", ".join(str(out / f) for f in summary["files"]))
    return EXIT_OK


def cmd_gamma(args):
    base = _base(args.base, args.precision_bits)
    if args.qmax is None:
        raise UsageError("--qmax is required (on the command line or in --config)")
    try:
        lo, hi = Fraction(args.lo), Fraction(args.hi)
    except (ValueError, ZeroDivisionError):
        raise UsageError("--lo/--hi must be rationals")
    rep = interval_scan(base, lo, hi, args.qmax, oracle=args.oracle,
                        stop_first=args.stop_first, threads=_threads(args),
                        budget=args.budget)
    if args.csv:
        path = Path(args.out) / args.csv
        write_counterexamples_csv(path, rep.counterexamples)
    _emit(rep.to_dict())
    return EXIT_OK


def cmd_audit(args):
    from .tiling import covering_audit
    base = _base(args.base, args.precision_bits)
    center = _complex(args.center)
    a = covering_audit(base, center, args.half_side, args.cell, args.depth)
    out = {"schema": AUDIT_SCHEMA, "base": base.minpoly.to_text(),
           "center": [center.real, center.imag], "half_side": args.half_side}
    out.update(a.to_dict())
    _emit(out)
    ok = a.min_interior >= 1
    return EXIT_OK if ok or not args.self_check else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# reproduction of the figure analogues

def _union_raster(raster, indices, label):
    from .tiling import Raster
    counts = raster.counts[list(indices)].sum(axis=0)[None]
    return Raster(raster.x0, raster.y0, raster.cell, raster.nx, raster.ny, [label],
                  counts, raster.accuracy)


def _repro_central(out, coeffs, name, cell, depth):
    from .tiling import geometry, subtile_raster
    base = parse_base(coeffs)
    g = geometry(base)
    depth = depth or g.depth_for_cell(cell)
    r = subtile_raster(base, depth, cell)
    union = _union_raster(r, range(g.size), "central")
    path = write_raster(out / name, union)
    info = {"base": coeffs, "depth": depth, "file": path.name}
    info.update(_raster_summary(union))
    return info, True


def _repro_subtiles(out, cell, depth):
    from .tiling import geometry, subtile_raster
    base = parse_base(ETA)
    g = geometry(base)
    depth = depth or g.depth_for_cell(cell)
    r = subtile_raster(base, depth, cell)
    path = write_raster(out / "fig3_subtiles", r)
    info = {"base": ETA, "depth": depth, "file": path.name}
    info.update(_raster_summary(r))
    ok = len(r.labels) == 5 and all(c > 0 for c in info["occupied_cells"])
    return info, ok


def _repro_slices(out, cell, depth, heights):
    from .tiling import geometry, subtile_raster
    base = parse_base(ETA)
    g = geometry(base)
    depth = depth or g.depth_for_cell(cell)
    r = subtile_raster(base, depth, cell)
    slices = []
    for k, x in enumerate(heights):
        xv = FieldElement.from_rational(base.minpoly, x)
        classes = g.eligible(xv)
        path = write_raster(out / f"fig4_slice_{k}", _union_raster(r, classes, f"E({x})"))
        slices.append({"height": str(x), "classes": list(classes), "file": path.name})
    ok = all(len(s["classes"]) >= 1 for s in slices)
    return {"base": ETA, "depth": depth, "slices": slices}, ok


def _repro_gamma(qmax, threads):
    base = parse_base(ETA)
    below = gamma_scan(base, qmax, Fraction(666666666, 10 ** 9), oracle="certified",
                       threads=threads)
    above = interval_scan(base, Fraction(666666666, 10 ** 9), Fraction(1), min(qmax, 200),
                          stop_first=True, threads=threads)
    ok = below.min_counterexample is None and above.min_counterexample is not None
    return {"below": below.to_dict(), "above": above.to_dict()}, ok


FIGURES = ("1", "3", "4", "5", "gamma")


def cmd_repro(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    figures = FIGURES if args.figure == "all" else (args.figure,)
    report = {"schema": REPRO_SCHEMA, "figures": {}}
    all_ok = True
    for fig in figures:
        if fig == "1":
            info, ok = _repro_central(out, ETA, "fig1_central", args.cell, args.depth)
        elif fig == "3":
            info, ok = _repro_subtiles(out, args.cell, args.depth)
        elif fig == "4":
            heights = [Fraction(k, 5) for k in range(5)]
            info, ok = _repro_slices(out, args.cell, args.depth, heights)
        elif fig == "5":
            info, ok = _repro_central(out, FIG5, "fig5_central", args.cell, args.depth)
        else:
            info, ok = _repro_gamma(args.qmax, _threads(args))
        info["self_check"] = ok
        report["figures"][fig] = info
        all_ok = all_ok and ok
    lines = [f"figure {k}: {'ok' if v['self_check'] else 'MISMATCH'}"
             for k, v in report["figures"].items()]
    if not args.no_report:
        write_json(out / "repro.json", report)
        lines.append(f"wrote {out / 'repro.json'}")
    _emit(report, args.json, "\n".join(lines))
    if args.self_check and not all_ok:
        return EXIT_MISMATCH
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="peribeta", description="Beta-expansions of rationals, "
                "Thurston tiles and Farey scans for Pisot bases.")
    p.add_argument("--version", action="version", version=f"peribeta {__version__}")
    sub = p.add_subparsers(dest="command", metavar="<subcommand>", parser_class=_Parser)

    def add(name, fn, help_text, base=True):
        sp = sub.add_parser(name, help=help_text, description=help_text)
        if base:
            sp.add_argument("--base", default=None,
                            help="minimal polynomial coefficients, constant term first, "
                                 "e.g. -1,-1,0,1 for x^3-x-1")
            sp.add_argument("--precision-bits", type=_positive(int), default=None,
                            help="initial width 2^-bits of the root enclosures")
        sp.add_argument("--json", action="store_true", help="print the JSON report")
        sp.add_argument("--threads", type=_positive(int), default=None,
                        help="worker cap (default: PERIBETA_THREADS or 1)")
        sp.add_argument("--config", default=None, metavar="FILE",
                        help="RunConfig JSON supplying defaults for these options")
        sp.add_argument("--save-config", default=None, metavar="FILE",
                        help="write the effective RunConfig (under --out when present)")
        sp.set_defaults(func=fn)
        return sp

    sp = add("classify", cmd_classify, "Pisot/unit gate, property (F) and family.")
    sp.add_argument("--search-bound", type=_positive(int), default=200_000,
                    help="largest finiteness search region")

    for name, fn, text in (("expand", cmd_expand, "Greedy expansion of a number in [0, 1)."),
                           ("check", cmd_check, "Pure periodicity by independent engines.")):
        sp = add(name, fn, text)
        sp.add_argument("--x", required=True, help="p/q, or coordinates p/q;p/q;p/q")
        sp.add_argument("--budget", type=_positive(int), default=DEFAULT_BUDGET,
                        help="orbit step budget")
        if name == "expand":
            sp.add_argument("--engine", choices=("kernel", "hash"), default="kernel")
        else:
            sp.add_argument("--ito-rao", action="store_true",
                            help="also run the tile membership test")
            sp.add_argument("--cell", type=_positive(float), default=0.005)
            sp.add_argument("--depth", type=_positive(int), default=None)

    add("gaps", cmd_gaps, "Expansion of 1, its quasi-greedy form and the gaps T^i(1).")

    sp = add("tile", cmd_tile, "Point clouds and rasters of the central tile, "
             "subtiles or tiles T(y).")
    sp.add_argument("--depth", type=_positive(int), default=None,
                    help="word length (default: chosen from the cell size)")
    sp.add_argument("--cell", type=_positive(float), default=0.01)
    sp.add_argument("--subtiles", action="store_true", help="one label per subtile")
    sp.add_argument("--tiles-around", type=_positive(float), default=None, metavar="R",
                    help="tiles T(y) meeting the ball of radius R about 0")
    sp.add_argument("--out", default=".", help="output directory")
    sp.add_argument("--name", default="tile", help="file stem")
    sp.add_argument("--no-csv", action="store_true", help="skip the point CSV")
    sp.add_argument("--no-raster", action="store_true", help="skip the PGM/PPM raster")
    sp.add_argument("--no-report", action="store_true", help="skip the JSON summary file")

    sp = add("gamma", cmd_gamma, "Ascending Farey scan for counterexamples.")
    sp.add_argument("--qmax", type=_positive(int), default=None,
                    help="largest denominator (required here or in --config)")
    sp.add_argument("--lo", default="0")
    sp.add_argument("--hi", default="1")
    sp.add_argument("--stop-first", action="store_true")
    sp.add_argument("--oracle", choices=("exact", "certified"), default="exact")
    sp.add_argument("--budget", type=_positive(int), default=DEFAULT_BUDGET)
    sp.add_argument("--csv", default=None, help="counterexample CSV file name")
    sp.add_argument("--out", default=".", help="output directory")

    sp = add("audit", cmd_audit, "Covering and multiplicity audit of the tiling.")
    sp.add_argument("--cell", type=_positive(float), default=0.01)
    sp.add_argument("--half-side", type=_positive(float), default=1.0)
    sp.add_argument("--center", default="0,0", help="re,im")
    sp.add_argument("--depth", type=_positive(int), default=None)
    sp.add_argument("--self-check", action="store_true",
                    help="exit 2 when some interior cell is uncovered")

    sp = add("repro", cmd_repro, "Regenerate the figure analogues and the frontier report.",
             base=False)
    sp.add_argument("--figure", choices=FIGURES + ("all",), default="all")
    sp.add_argument("--cell", type=_positive(float), default=0.005)
    sp.add_argument("--depth", type=_positive(int), default=None)
    sp.add_argument("--qmax", type=_positive(int), default=2000)
    sp.add_argument("--out", default=".", help="output directory")
    sp.add_argument("--self-check", action="store_true",
                    help="exit 2 when a figure check fails")
    sp.add_argument("--no-report", action="store_true", help="skip repro.json")
    return p


# RunConfig field -> (option dest, conversion from config value)
_CONFIG_OPTIONS = {
    "base": ("base", str),
    "depth": ("depth", lambda v: v),
    "precision_bits": ("precision_bits", int),
    "cell": ("cell", float),
    "qmax": ("qmax", int),
    "lo": ("lo", str),
    "hi": ("hi", str),
    "budget": ("budget", int),
    "threads": ("threads", int),
    "out": ("out", str),
    "write_csv": ("no_csv", lambda v: not v),
    "write_raster": ("no_raster", lambda v: not v),
    "write_json": ("no_report", lambda v: not v),
}


def _subparser(parser, name):
    for action in parser._subparsers._group_actions:
        if name in action.choices:
            return action.choices[name]
    raise UsageError(f"unknown subcommand {name!r}")


def _apply_config(parser, command, path):
    try:
        cfg = RunConfig.load(path)
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc.strerror}")
    sp = _subparser(parser, command)
    dests = {a.dest for a in sp._actions}
    sp.set_defaults(**{dest: conv(getattr(cfg, key))
                       for key, (dest, conv) in _CONFIG_OPTIONS.items() if dest in dests})


def _effective_config(args) -> RunConfig:
    values = {}
    for key, (dest, _) in _CONFIG_OPTIONS.items():
        if not hasattr(args, dest):
            continue
        v = getattr(args, dest)
        if dest.startswith("no_"):
            values[key] = not v
        elif v is not None:
            values[key] = v
    return RunConfig(**values)


def _save_config(args):
    path = Path(args.save_config)
    if hasattr(args, "out") and not path.is_absolute():
        path = Path(args.out) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    _effective_config(args).save(path)


_VALUE_OPTIONS = ("--base", "--x", "--lo", "--hi", "--center", "--config", "--save-config")


def _glue_values(argv):
    """Attach values such as -1,-1,0,1 to their option so they are not read as flags."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTIONS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        glued = _glue_values(argv)
        args = parser.parse_args(glued)
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        if args.config:
            _apply_config(parser, args.command, args.config)
            args = parser.parse_args(glued)
        if args.save_config:
            _save_config(args)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"error: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (DomainError, InvalidBaseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PeribetaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
