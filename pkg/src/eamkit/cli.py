"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 computation failure, 3 I/O.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import warnings
from dataclasses import asdict
from typing import Optional

import numpy as np

from . import cft, contour, eamfit, entropy, states
from .errors import EamkitError, TableFormatError

EXIT_USAGE, EXIT_COMPUTE, EXIT_IO = 1, 2, 3
MODELS = ("dimer", "rainbow", "ghz", "freefermion", "xxz")
DEFAULT_XXZ_SWEEP = (0.5, 1.0, 2.0)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def write_output(text: str, path: Optional[str]):
    """Write to ``path`` atomically (temp file + rename), or to stdout."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".eamkit-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_matching(text: str) -> list[tuple[int, int]]:
    try:
        pairs = []
        for item in text.split(","):
            a, b = item.split("-")
            pairs.append((int(a), int(b)))
        return pairs
    except ValueError:
        raise UsageError(f"bad --matching {text!r}; expected e.g. 0-1,2-3") from None


def parse_mask(text: str, n: int) -> int:
    if text.startswith("sites:"):
        sites = [int(s) for s in text[6:].split(",") if s]
        if any(not 0 <= s < n for s in sites):
            raise UsageError(f"site out of range in {text!r}")
        return sum(1 << s for s in set(sites))
    mask = int(text, 0)
    if not 0 <= mask < (1 << n):
        raise UsageError(f"mask {mask} invalid for {n} sites")
    return mask


def build_source(args, aniso: Optional[float] = None):
    """State or free-fermion ground state for the selected model and engine."""
    n, model = args.n, args.model
    engine = args.engine
    if engine == "freefermion" and model != "freefermion":
        raise UsageError("--engine freefermion requires --model freefermion")
    if engine == "statevector" and model == "freefermion":
        raise UsageError("--engine statevector is not available for --model freefermion; "
                         "use --model xxz --aniso 0 --boundary open for the spin-chain twin")
    if model in ("dimer", "rainbow", "ghz") and n > states.statevector_cap():
        raise EamkitError(f"N={n} exceeds the statevector cap {states.statevector_cap()} "
                          "(set EAMKIT_MAX_N to raise it)")
    if model == "dimer":
        matching = parse_matching(args.matching) if args.matching else states.nearest_neighbor_matching(n)
        return states.build_dimer(n, matching)
    if model == "rainbow":
        return states.build_rainbow(n)
    if model == "ghz":
        return states.build_ghz(n)
    if model == "freefermion":
        hop = states.dimerized_hopping(n, args.dimerized, periodic=args.boundary == "periodic")
        return states.freefermion_ground(hop, args.filling)
    delta = args.aniso if aniso is None else aniso
    return states.xxz_ground_state(states.XxzSpec(n, 1.0 if delta is None else delta, args.boundary or "periodic"))


def _boundary_default(args):
    if args.boundary is None:
        args.boundary = "periodic" if args.model == "xxz" else "open"


def cmd_entropies(args):
    _boundary_default(args)
    table = entropy.all_entropies(build_source(args), threads=args.threads)
    if args.format == "json":
        text = entropy.table_to_json(table, timestamp=not args.no_timestamp)
    else:
        scale = 1 / math.log(2) if args.bits and args.output in (None, "-") else 1.0
        text = entropy.table_to_csv(table, timestamp=not args.no_timestamp, scale=scale)
    write_output(text, args.output)


def _load_table(path: str) -> entropy.EntropyTable:
    try:
        return entropy.read_table(path)
    except OSError as exc:
        raise OSError(f"cannot read table {path}: {exc}") from exc


def _fit_table(args, aniso=None):
    if args.table:
        return _load_table(args.table)
    _boundary_default(args)
    table = entropy.all_entropies(build_source(args, aniso), threads=args.threads)
    # same rounding as a table file, so fit --model and fit --table agree bit for bit
    table.entropies = entropy.round_sig(table.entropies)
    return table


def cmd_fit(args):
    if not args.table and not args.model:
        raise UsageError("fit needs --table or --model/--n")
    table = _fit_table(args)
    eam, report = eamfit.fit_eam(table, offset=args.offset)
    if args.format == "csv":
        write_output(eamfit.eam_to_csv(eam), args.output)
        if args.output not in (None, "-"):
            write_output(eamfit.report_to_json(report), _sibling(args.output, ".report.json"))
        return
    if args.output in (None, "-"):
        doc = {"eam": json.loads(eamfit.eam_to_json(eam)), "report": json.loads(eamfit.report_to_json(report))}
        write_output(json.dumps(doc) + "\n", None)
    else:
        write_output(eamfit.eam_to_json(eam), args.output)
        write_output(eamfit.report_to_json(report), _sibling(args.output, ".report.json"))


def _sibling(path: str, suffix: str) -> str:
    root, _ = os.path.splitext(path)
    return root + suffix


def _contour_outputs(args, tag: str, csv_by_route: dict, comparison: Optional[str]):
    if args.output in (None, "-"):
        for text in csv_by_route.values():
            write_output(text, None)
        if comparison:
            write_output(comparison, None)
        return
    for route, text in csv_by_route.items():
        write_output(text, f"{args.output}{tag}.{route}.csv")
    if comparison:
        write_output(comparison, f"{args.output}{tag}.compare.json")


def cmd_contour(args):
    _boundary_default(args)
    if args.route in ("freefermion", "both") and args.model != "freefermion":
        raise UsageError(f"--route {args.route} requires --model freefermion")
    if args.mask is None and not args.half_chain:
        args.half_chain = True
    mask = contour.half_chain_mask(args.n) if args.half_chain else parse_mask(args.mask, args.n)
    if not 0 < mask < (1 << args.n) - 1:
        raise UsageError("contour needs a nontrivial block")
    sweep = [None]
    if args.model == "xxz":
        sweep = [args.aniso] if args.aniso is not None else list(DEFAULT_XXZ_SWEEP)
    for aniso in sweep:
        source = build_source(args, aniso)
        tag = "" if aniso is None or args.aniso is not None else f".aniso{aniso:g}"
        csvs, comparison = {}, None
        routes = ["eam", "freefermion"] if args.route == "both" else [args.route]
        found = {}
        if "eam" in routes:
            eam, _ = eamfit.fit_eam(entropy.all_entropies(source, threads=args.threads), offset=args.offset)
            found["eam"] = contour.contour_from_eam(eam, mask)
        if "freefermion" in routes:
            found["freefermion"] = contour.contour_freefermion(source, mask)
        for route, vec in found.items():
            csvs[route] = contour.contour_to_csv(vec, source.label)
        if len(found) == 2:
            comparison = contour.comparison_to_json(contour.compare_contours(found["eam"], found["freefermion"]))
        _contour_outputs(args, tag, csvs, comparison)


def _round(x):
    return float(format(x, ".12g"))


def cmd_cft_check(args):
    if args.lattice:
        hop = states.dimerized_hopping(args.n, 0.0)
        ffg = states.freefermion_ground(hop)
        eam, _ = eamfit.fit_eam(entropy.all_entropies(ffg, threads=args.threads))
        fit = cft.power_law_exponent(eam, args.min_sep, args.max_sep)
        doc = {
            "separations": fit.separations,
            "mean_weights": [_round(w) for w in fit.mean_weights],
            "exponent": _round(fit.exponent),
            "amplitude": _round(fit.amplitude),
            "r2": _round(fit.r2),
        }
    else:
        missing = [f"--{k}" for k in ("u", "v", "eps") if getattr(args, k) is None]
        if missing:
            raise UsageError(f"interval mode needs {', '.join(missing)}")
        spec = cft.IntervalSpec(args.u, args.v, args.eps, args.c)
        integral = cft.interval_entropy_integral(spec)
        closed = cft.interval_entropy_cft(spec)
        doc = {
            "integral": _round(integral),
            "closed_form": _round(closed),
            "gap": _round(closed - integral),
            "expected_gap": _round(spec.c / 3 * math.log((spec.v - spec.u) / (spec.v - spec.u - spec.epsilon))),
        }
    write_output(json.dumps(doc) + "\n", args.output)


def cmd_state_dump(args):
    _boundary_default(args)
    source = build_source(args)
    if not isinstance(source, states.PureState):
        raise UsageError("state-dump needs a state-vector model (dimer, rainbow, ghz, xxz)")
    lines = [f"# n_sites={source.n_sites}", f"# model={source.label}", "index,real,imag"]
    for k, a in enumerate(source.amplitudes):
        lines.append(f"{k},{_round(a.real) + 0.0!r},{_round(a.imag) + 0.0!r}")
    write_output("\n".join(lines) + "\n", args.output)


def _model_args(p, required=True):
    p.add_argument("--model", choices=MODELS, required=required)
    p.add_argument("--n", type=int, required=required, help="number of sites")
    p.add_argument("--matching", help="dimer pairs, e.g. 0-1,2-3 (default nearest neighbor)")
    p.add_argument("--dimerized", type=float, default=0.0, help="free-fermion dimerization delta")
    p.add_argument("--aniso", type=float, default=None, help="XXZ anisotropy")
    p.add_argument("--boundary", choices=("open", "periodic"), default=None)
    p.add_argument("--filling", type=int, default=None, help="free-fermion particle number")
    p.add_argument("--engine", choices=("auto", "statevector", "freefermion"), default="auto")


def _common_args(p):
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--seed", type=int, default=0, help="reserved; the pipeline is deterministic")
    p.add_argument("--no-timestamp", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eamkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("entropies", help="all 2^N block entropies")
    _model_args(p)
    _common_args(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--bits", action="store_true", help="show entropies in bits (stdout only)")
    p.set_defaults(func=cmd_entropies)

    p = sub.add_parser("fit", help="fit the entanglement adjacency matrix")
    _model_args(p, required=False)
    _common_args(p)
    p.add_argument("--table", help="entropy table file (CSV or JSON)")
    p.add_argument("--offset", action="store_true", help="also fit a constant offset s0")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("contour", help="per-site entanglement contour")
    _model_args(p)
    _common_args(p)
    p.add_argument("--mask", help="block as integer mask or sites:0,1,2")
    p.add_argument("--half-chain", action="store_true")
    p.add_argument("--route", choices=("eam", "freefermion", "both"), default="eam")
    p.add_argument("--offset", action="store_true")
    p.set_defaults(func=cmd_contour)

    p = sub.add_parser("cft-check", help="continuum and lattice inverse-square checks")
    _common_args(p)
    p.add_argument("--u", type=float)
    p.add_argument("--v", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--lattice", action="store_true")
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--min-sep", type=int, default=2)
    p.add_argument("--max-sep", type=int, default=6)
    p.set_defaults(func=cmd_cft_check)

    p = sub.add_parser("state-dump", help="write state amplitudes as CSV")
    _model_args(p)
    _common_args(p)
    p.set_defaults(func=cmd_state_dump)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "model", None) and getattr(args, "n", None) is None:
            raise UsageError("--n is required with --model")
        if getattr(args, "n", None) is not None and args.n < 2:
            raise UsageError("--n must be at least 2")
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"eamkit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TableFormatError as exc:
        print(f"eamkit: {exc}", file=sys.stderr)
        return EXIT_IO
    except EamkitError as exc:
        print(f"eamkit: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"eamkit: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
