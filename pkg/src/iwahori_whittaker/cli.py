"""Command line entry point: JSON in, JSON out.

Exit codes: 0 success, 1 a verification failed, 2 precision ran out after
all retries, 3 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from itertools import permutations, product
from typing import Sequence

import numpy as np

from . import hecke, quiver, trace
from .decomposition import Cell, decompose, residue_character, retry_widening
from .scalars import specialize
from .series import InsufficientPrecision, NotInvertible, SeriesMatrix
from .whittaker import WhittakerContext, whittaker_eval, whittaker_formula

EXIT_OK, EXIT_FAIL, EXIT_PRECISION, EXIT_INPUT = 0, 1, 2, 3


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    n: int
    p: int
    window: tuple[int, int]
    retries: int
    seed: int

    def __post_init__(self):
        lo, hi = self.window
        if not lo < 0 < hi:
            raise InputError(f"precision window [{lo}, {hi}) must contain -1 and 0")
        if self.retries < 0:
            raise InputError("retries must be non-negative")

    @property
    def max_hi(self) -> int:
        return self.window[1] * 2 ** self.retries


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise InputError(f"expected comma-separated integers, got {text!r}") from exc


def _window(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("precision window must look like lo:hi")
    return int(lo), int(hi)


def _load(path: str | None):
    try:
        if path is None or path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON from {path or 'stdin'}: {exc}") from exc


def _config(args) -> RunConfig:
    return RunConfig(args.n, args.p, tuple(args.prec), args.retries, args.seed)


def cmd_whittaker(args) -> tuple[dict, int]:
    cfg = _config(args)
    if args.action == "eval":
        cell = Cell(_ints(args.d), _ints(args.sigma))
        value = whittaker_formula(cell)
        out = {"cell": cell.to_json(), "value": value.to_json(), "text": str(value)}
        if args.specialize:
            out["specialized"] = specialize(value, cfg.p).to_json()
        return out, EXIT_OK
    g = SeriesMatrix.from_json(_load(args.file))
    if args.p_given and g.p != cfg.p:
        raise InputError(f"matrix is over p={g.p} but --p {cfg.p} was given")

    def run(window):
        dec = decompose(g, window[1])
        return dec, whittaker_eval(g, WhittakerContext(g.n, g.p), window[1])

    dec, value = retry_widening(run, cfg.window, cfg.max_hi)
    return {"cell": dec.cell.to_json(), "psi_phase": residue_character(dec.u),
            "value": value.to_json(), "text": str(value)}, EXIT_OK


def default_cells(n: int, count: int, seed: int, bound: int = 1) -> list[Cell]:
    pool = [Cell(d, s) for d in product(range(-bound, bound + 1), repeat=n)
            for s in permutations(range(1, n + 1))]
    rng = np.random.default_rng(seed)
    idx = sorted(rng.choice(len(pool), size=min(count, len(pool)), replace=False).tolist())
    return [pool[i] for i in idx]


def cmd_hecke(args) -> tuple[dict, int]:
    cfg = _config(args)
    ctx = WhittakerContext(cfg.n, cfg.p)
    g = hecke.parse_generator(args.gen)
    if args.action == "reps":
        reps = hecke.coset_reps(g, ctx)
        out = {"generator": g.to_json(), "count": len(reps),
               "reps": [r.to_json(cfg.window)["entries"] for r in reps]}
        if not isinstance(g, hecke.Word):
            report = hecke.validate_reps(g, ctx, reps)
            out["validation"] = report.to_json()
            return out, EXIT_OK if report.ok else EXIT_FAIL
        return out, EXIT_OK
    if args.action == "verify":
        if args.cells:
            cells = [Cell.from_json(c) for c in _load(args.cells)]
        else:
            cells = default_cells(cfg.n, args.count, cfg.seed)
        report = hecke.verify_eigen(g, cells, ctx)
        return report.to_json(), EXIT_OK if report.ok else EXIT_FAIL
    # apply
    if args.file:
        x = SeriesMatrix.from_json(_load(args.file))
    elif args.d is not None and args.sigma is not None:
        x = Cell(_ints(args.d), _ints(args.sigma)).matrix(cfg.p)
    else:
        raise InputError("hecke apply needs --file or both --d and --sigma")
    if (x.n, x.p) != (cfg.n, cfg.p):
        raise InputError(f"point is {x.n}x{x.n} over p={x.p}, expected n={cfg.n}, p={cfg.p}")

    def run(window):
        def f(m):
            return whittaker_eval(m, ctx, window[1])
        return hecke.hecke_apply(g, f, x, ctx), f(x)

    value, w_x = retry_widening(run, cfg.window, cfg.max_hi)
    eig = specialize(hecke.expected_eigenvalue(g), cfg.p) * w_x
    return {"generator": g.to_json(), "value": value.to_json(), "text": str(value),
            "eigenvalue_times_w": eig.to_json(), "agrees": value == eig}, EXIT_OK


def _rep(data) -> quiver.QuiverRep:
    r = quiver.QuiverRep.from_json(data)
    errors = quiver.validation_errors(r)
    if errors:
        raise quiver.InvalidRepresentation("; ".join(errors))
    return r


def cmd_quiver(args) -> tuple[dict, int]:
    if args.action == "enumerate":
        dims = _ints(args.dims)
        classes = quiver.enumerate_classes(dims, args.n)
        return {"n": args.n, "dims": list(dims), "count": len(classes),
                "classes": [c.to_json()["segments"] for c in classes]}, EXIT_OK
    if args.action == "decompose":
        dec = quiver.decompose(_rep(_load(args.file)))
        return dec.to_json(), EXIT_OK
    if args.action == "homext":
        x, y = _rep(_load(args.x)), _rep(_load(args.y))
        return {"hom": quiver.hom_dim(x, y), "ext1": quiver.ext1_dim(x, y),
                "euler": quiver.euler_form(x.dims, y.dims)}, EXIT_OK
    r = _rep(_load(args.file))
    chain = quiver.elementary_filtration(r, constant=args.constant)
    return {"steps": [s.to_json() for s in chain]}, EXIT_OK


def cmd_trace(args) -> tuple[dict, int]:
    if args.action == "table":
        if args.d < 1:
            raise InputError("d must be positive")
        return trace.l_values(args.d).to_json(), EXIT_OK
    if args.d_max < 1:
        raise InputError("d-max must be positive")
    reports, ok = [], True
    for d in range(1, args.d_max + 1):
        t = trace.l_values(d)
        row = {"d": d}
        for name, check in (("symmetry", trace.verify_symmetry), ("steps", trace.verify_step_differences),
                            ("unweighted", trace.verify_unweighted)):
            rep = check(d, t)
            row[name] = rep.to_json()
            ok = ok and rep.ok
        reports.append(row)
    dictionary = [r.to_json() for r in trace.sheaf_operator_table(2)]
    return {"ok": ok, "reports": reports, "dictionary": dictionary}, EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=2, help="rank / number of quiver nodes")
    common.add_argument("--p", type=int, default=None, help="residue field size (prime)")
    common.add_argument("--prec", type=_window, default=(-4, 8), metavar="LO:HI",
                        help="initial precision window")
    common.add_argument("--retries", type=int, default=3, help="window doublings on precision failure")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="write JSON here instead of stdout")

    parser = argparse.ArgumentParser(prog="iwahori-whittaker", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    top = parser.add_subparsers(dest="command", required=True)

    w = top.add_parser("whittaker", help="evaluate the Whittaker function").add_subparsers(
        dest="action", required=True)
    e = w.add_parser("eval", parents=[common], help="formal value on a cell")
    e.add_argument("--d", required=True)
    e.add_argument("--sigma", required=True, help="one-line notation, e.g. 2,1")
    e.add_argument("--specialize", action="store_true", help="also give the value at q = p")
    em = w.add_parser("eval-matrix", parents=[common], help="value at a matrix (JSON)")
    em.add_argument("--file", default=None)

    h = top.add_parser("hecke", help="Hecke operators").add_subparsers(dest="action", required=True)
    for name in ("verify", "reps", "apply"):
        sp = h.add_parser(name, parents=[common])
        sp.add_argument("--gen", required=True, help="srefl:i, tleq:i, diag:d1,..,dn or word:a,b")
        if name == "verify":
            sp.add_argument("--cells", default=None, help="JSON list of {d, sigma}")
            sp.add_argument("--count", type=int, default=10)
        if name == "apply":
            sp.add_argument("--file", default=None)
            sp.add_argument("--d", default=None)
            sp.add_argument("--sigma", default=None)

    qv = top.add_parser("quiver", help="cyclic quiver representations").add_subparsers(
        dest="action", required=True)
    sp = qv.add_parser("decompose", parents=[common])
    sp.add_argument("--file", default=None)
    sp = qv.add_parser("enumerate", parents=[common])
    sp.add_argument("--dims", required=True)
    sp = qv.add_parser("homext", parents=[common])
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp = qv.add_parser("filter", parents=[common])
    sp.add_argument("--file", default=None)
    sp.add_argument("--constant", action="store_true", help="steps of dimension (1, ..., 1)")

    tr = top.add_parser("trace", help="trace recursion").add_subparsers(dest="action", required=True)
    sp = tr.add_parser("table", parents=[common])
    sp.add_argument("--d", type=int, required=True)
    sp = tr.add_parser("verify", parents=[common])
    sp.add_argument("--d-max", type=int, default=8)
    return parser


HANDLERS = {"whittaker": cmd_whittaker, "hecke": cmd_hecke, "quiver": cmd_quiver, "trace": cmd_trace}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.p_given = args.p is not None
    if args.p is None:
        args.p = 3
    try:
        out, code = HANDLERS[args.command](args)
    except InsufficientPrecision as exc:
        out, code = {"error": "precision", "message": str(exc)}, EXIT_PRECISION
    except (InputError, NotInvertible, ValueError, KeyError, TypeError) as exc:
        out, code = {"error": "input", "message": str(exc)}, EXIT_INPUT
    text = json.dumps(out, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
