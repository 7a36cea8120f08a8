"""Command-line entry point (``sparsesep``).

Matrix arguments accept SSEP1 binary files or the JSON matrix format.
Index sets in the output are 1-based.

Exit codes: 0 success, 1 input or numerical error, 2 usage error,
3 certificate not satisfied (``certify`` only), 4 bound violation in a
sweep (``bench`` only).
"""

import argparse
import json
import sys

import numpy as np

from . import guarantees
from .demo import demo_image
from .errors import SeparationError
from .experiments import ExperimentSpec, run_sweep
from .io import load_matrix, load_vector, read_pgm, save_matrix
from .problems import from_analysis, from_blocks, from_hybrid, from_synthesis
from .solver import SolveOptions, solve_p_star
from .sparsity import IndexSet

EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_NOT_SATISFIED = 3
EXIT_VIOLATION = 4

# matrix options each flavor needs; None means the four-matrix template
_FLAVOR_INPUTS = {
    None: ("a1", "psi1", "a2", "psi2"),
    "analysis": ("a", "psi1", "psi2"),
    "synthesis": ("a", "d1", "d2"),
    "hybrid": ("a", "d1", "psi2"),
}


class _UsageError(Exception):
    pass


def _dump(obj):
    print(json.dumps(obj, indent=2, default=_json_default))


def _json_default(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and np.isinf(v):
        return "inf"
    return str(v)


def _add_problem_args(sp):
    sp.add_argument("--flavor", choices=["analysis", "synthesis", "hybrid"],
                    help="build from --a plus dictionaries/operators instead of "
                         "the four-matrix template --a1 --psi1 --a2 --psi2")
    for name in ("a1", "psi1", "a2", "psi2", "a", "d1", "d2"):
        sp.add_argument(f"--{name}", metavar="FILE")


def _problem_from_args(args):
    needed = _FLAVOR_INPUTS[args.flavor]
    missing = [f"--{n}" for n in needed if getattr(args, n) is None]
    if missing:
        raise _UsageError(f"missing {' '.join(missing)}")
    M = {n: load_matrix(getattr(args, n)) for n in needed}
    if args.flavor is None:
        return from_blocks(M["a1"], M["psi1"], M["a2"], M["psi2"])
    if args.flavor == "analysis":
        return from_analysis(M["a"], M["psi1"], M["psi2"])
    if args.flavor == "synthesis":
        return from_synthesis(M["a"], M["d1"], M["d2"])
    return from_hybrid(M["a"], M["d1"], M["psi2"])


def cmd_coherence(args):
    prof = _problem_from_args(args).profile().to_dict()
    if args.json:
        _dump(prof)
    else:
        for k, v in prof.items():
            print(f"{k:12s} {v:.12g}")
    return 0


def cmd_certify(args):
    p = _problem_from_args(args)
    cert = guarantees.certify(p.profile(), p.sigma_min_psi, args.k1, args.k2,
                              args.eps, args.sigma_k1, args.sigma_k2)
    _dump(cert.to_dict())
    return 0 if cert.satisfied else EXIT_NOT_SATISFIED


def cmd_problem(args):
    _dump(_problem_from_args(args).summary())
    return 0


def cmd_solve(args):
    A, Psi = load_matrix(args.a), load_matrix(args.psi)
    y = load_vector(args.y)
    opts = SolveOptions(**json.loads(args.opts)) if args.opts else SolveOptions()
    res = solve_p_star(A, Psi, y, args.eps, opts)
    save_matrix(args.out, res.x_star)
    u = np.abs(Psi @ res.x_star)
    cut = args.support_tol * u.max(initial=0.0)
    support = IndexSet(tuple(np.flatnonzero(u > cut)), u.size) if cut > 0 else IndexSet((), u.size)
    summary = res.summary()
    summary["x_star_file"] = args.out
    summary["support"] = support.one_based()
    _dump(summary)
    return 0


def cmd_bench(args):
    with open(args.spec) as fh:
        spec = ExperimentSpec.from_dict(json.load(fh))
    result = run_sweep(spec, threads=args.threads)
    result.write(args.out, timing=not args.no_timing)
    agg = result.aggregate()
    _dump(agg)
    return EXIT_VIOLATION if agg["bound_violations"] else 0


def cmd_demo_image(args):
    cartoon = read_pgm(args.cartoon)
    texture = read_pgm(args.texture) - args.texture_offset
    metrics, _ = demo_image(cartoon, texture, args.snr, args.out, seed=args.seed, tau=args.tau)
    _dump(metrics.to_dict())
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="sparsesep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("coherence", help="coherence profile of the effective dictionaries")
    _add_problem_args(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_coherence)

    sp = sub.add_parser("certify", help="recovery certificate for (k1, k2)")
    _add_problem_args(sp)
    sp.add_argument("--k1", type=int, required=True)
    sp.add_argument("--k2", type=int, required=True)
    sp.add_argument("--eps", type=float, default=0.0)
    sp.add_argument("--sigma-k1", type=float, default=0.0)
    sp.add_argument("--sigma-k2", type=float, default=0.0)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("problem", help="print the assembled problem's summary")
    _add_problem_args(sp)
    sp.set_defaults(func=cmd_problem)

    sp = sub.add_parser("solve", help="minimize ||Psi x||_1 s.t. ||y - A x|| <= eps")
    sp.add_argument("--a", required=True, metavar="FILE")
    sp.add_argument("--psi", required=True, metavar="FILE")
    sp.add_argument("--y", required=True, metavar="FILE")
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--opts", metavar="JSON", help="SolveOptions fields as a JSON object")
    sp.add_argument("--out", default="x_star.ssep", metavar="FILE")
    sp.add_argument("--support-tol", type=float, default=1e-6,
                    help="relative magnitude cut for the reported support of Psi x*")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("bench", help="run a synthetic sweep from a JSON spec")
    sp.add_argument("--spec", required=True, metavar="FILE")
    sp.add_argument("--out", default="bench_out", metavar="DIR")
    sp.add_argument("--threads", type=int)
    sp.add_argument("--no-timing", action="store_true",
                    help="write runtime_ms as 0 so the CSV is byte-reproducible")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("demo-image", help="cartoon + texture separation of PGM images")
    sp.add_argument("--cartoon", required=True, metavar="FILE")
    sp.add_argument("--texture", required=True, metavar="FILE")
    sp.add_argument("--snr", type=float, default=20.0)
    sp.add_argument("--out", required=True, metavar="DIR")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tau", type=float, default=1e-3)
    sp.add_argument("--texture-offset", type=float, default=0.5,
                    help="subtracted from the texture image (PGM values are unsigned)")
    sp.set_defaults(func=cmd_demo_image)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SeparationError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
