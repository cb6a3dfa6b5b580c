"""Command-line entry point: ``qgraph <command> ...``.

Exit status is 0 when the command succeeds and every check passes, 1 when a
case-study check fails, 2 for usage or domain errors.  Errors are printed to
stderr as ``error[<category>]: <message>``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import graph_core as gc
from .casestudies import run_case
from .errors import NotARoot, QGraphError, ValidationError
from .io import fmt, matrix_to_csv, parse_graph, scan_to_csv
from .spectrum import classify, eigenvalues, scan, verify_topological
from .topology import (
    construct_topological_state,
    fixed_space,
    fundamental_cycles,
    spectrally_equilateral_cycles,
)


def _positive(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _window(args):
    if not args.kmin < args.kmax:
        raise ValidationError("need kmin < kmax")


def cmd_info(args, out):
    mg = parse_graph(args.file)
    g = mg.graph
    fs = fixed_space(g)
    print(f"vertices {g.n}", file=out)
    print(f"edges {g.m}", file=out)
    print(f"betti {gc.betti(g)}", file=out)
    print(f"fixed_space {fs.dim} (even {fs.even.shape[1]}, odd {fs.odd.shape[1]})", file=out)
    for v, name in enumerate(mg.vertex_names):
        print(f"vertex {name} degree {g.degrees[v]}", file=out)
    for j, ((a, b), length, pot) in enumerate(zip(g.edges, mg.lengths, mg.potentials)):
        print(f"edge {mg.edge_ids[j]} {mg.vertex_names[a]}->{mg.vertex_names[b]} "
              f"length {fmt(length)} potential {type(pot).__name__}", file=out)
    return 0


MATRICES = {
    "S": gc.bond_scattering,
    "D": gc.degree_matrix,
    "A": gc.adjacency,
    "L": gc.laplacian,
    "H": gc.nonbacktracking,
    "tau": gc.tau_matrix,
    "L_normalized": gc.normalized_laplacian,
    "L_1down": gc.one_down_laplacian,
}


def cmd_matrices(args, out):
    g = parse_graph(args.file).graph
    target = Path(args.dir)
    target.mkdir(parents=True, exist_ok=True)
    for name, build in MATRICES.items():
        path = target / f"{name}.csv"
        path.write_text(matrix_to_csv(build(g), name))
        print(path, file=out)
    return 0


def cmd_scan(args, out):
    _window(args)
    if args.samples < 2:
        raise ValidationError("need at least 2 samples")
    mg = parse_graph(args.file)
    text = scan_to_csv(scan(mg, args.kmin, args.kmax, args.samples))
    if args.out == "-":
        out.write(text)
    else:
        Path(args.out).write_text(text)
    return 0


def cmd_eigs(args, out):
    _window(args)
    mg = parse_graph(args.file)
    recs = eigenvalues(mg, args.kmin, args.kmax, samples=args.samples, refine_tol=args.tol)
    print("k,multiplicity,class,dim_topological,residual", file=out)
    for r in recs:
        print(f"{fmt(r.k)},{r.multiplicity},{r.kind},{r.dim_topological},{fmt(r.residual)}", file=out)
        for flag in r.flags:
            print(f"# k={fmt(r.k)}: {flag}", file=out)
    return 0


def cmd_topo(args, out):
    mg = parse_graph(args.file)
    g = mg.graph
    k = args.k
    cycles = fundamental_cycles(g)
    eq = spectrally_equilateral_cycles(mg, k, cycles)
    print(f"fundamental cycles {len(cycles)}, spectrally equilateral at k={fmt(k)}: {len(eq)}", file=out)
    for c in eq:
        names = "-".join(mg.vertex_names[v] for v in c.vertices(g))
        x = construct_topological_state(c, mg, k)
        if x is None:
            print(f"cycle {names}: no state (closure fails)", file=out)
            continue
        rep = verify_topological(x, mg, k)
        print(f"cycle {names}: state, bond residual {rep['bond_residual']:.3e}, "
              f"verify {'ok' if rep['passed'] else 'FAILED'}", file=out)
    try:
        rec = classify(mg, k)
    except NotARoot:
        print(f"k={fmt(k)} is not an eigenvalue", file=out)
        return 0
    print(f"class {rec.kind} multiplicity {rec.multiplicity} dim_topological {rec.dim_topological}",
          file=out)
    return 0


def cmd_casestudy(args, out):
    if args.index == 5 and args.seed is None:
        raise ValidationError("case 5 needs --seed")
    report = run_case(args.index, args.seed, args.extended)
    print(report.render(), file=out)
    if not report.passed:
        print(f"error[assertion]: case {args.index} has failing checks", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qgraph", description="Spectra of quantum graphs")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("info", help="summary of a graph file")
    s.add_argument("file")
    s.set_defaults(func=cmd_info)

    s = sub.add_parser("matrices", help="dump combinatorial matrices as CSV")
    s.add_argument("file")
    s.add_argument("dir")
    s.set_defaults(func=cmd_matrices)

    s = sub.add_parser("scan", help="secular determinants on a uniform k grid")
    s.add_argument("file")
    s.add_argument("--kmin", type=_positive, required=True)
    s.add_argument("--kmax", type=_positive, required=True)
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--out", default="-", help="output CSV path, '-' for stdout")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("eigs", help="refined and classified eigenvalues")
    s.add_argument("file")
    s.add_argument("--kmin", type=_positive, required=True)
    s.add_argument("--kmax", type=_positive, required=True)
    s.add_argument("--tol", type=_positive, default=1e-9)
    s.add_argument("--samples", type=int, default=None, help="default: 1000 per unit k")
    s.set_defaults(func=cmd_eigs)

    s = sub.add_parser("topo", help="topological states on fundamental cycles at k")
    s.add_argument("file")
    s.add_argument("--k", type=_positive, required=True)
    s.set_defaults(func=cmd_topo)

    s = sub.add_parser("casestudy", help="run one of the six worked configurations")
    s.add_argument("index", type=int, choices=range(1, 7))
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--extended", action="store_true", help="case 4: also check k = 37")
    s.set_defaults(func=cmd_casestudy)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except QGraphError as exc:
        print(f"error[{exc.category}]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
