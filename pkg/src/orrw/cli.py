"""Command-line harness: ``orrw <command> [flags]``."""
from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import warnings

import numpy as np

from .exact import build_meta_chain, survival_curve
from .fixtures import STARTS, fixture
from .graphs import (FiniteGraph, GraphError, cover_family, downward_closure, make_family,
                     mask_edges, read_edge_file)
from .rates import alpha_c_detail, rate_I, sequence_label, sweep_alpha, sweep_rate
from .simulate import estimate_tail_decay

COMMANDS = ("simulate", "survival", "alpha", "rate", "sweep-alpha", "sweep-rate", "verify")


def fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.12g}"


def write_csv(path, header, rows) -> None:
    out = open(path, "w", newline="", encoding="utf-8") if path else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])
    finally:
        if path:
            out.close()


def positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0 or math.isinf(v):
        raise argparse.ArgumentTypeError(f"must be a positive finite number: {text!r}")
    return v


def delta_grid(text: str) -> list[float]:
    """``lo:hi:n`` with n log-spaced points."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must look like lo:hi:n")
    lo, hi = positive(parts[0]), positive(parts[1])
    try:
        n = int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError("grid size must be an integer") from None
    if n < 1 or hi < lo or (n == 1 and hi != lo):
        raise argparse.ArgumentTypeError("malformed grid")
    return [float(v) for v in np.geomspace(lo, hi, n)]


def linear_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must look like lo:hi:n")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError("malformed grid") from None
    if n < 1 or hi < lo:
        raise argparse.ArgumentTypeError("malformed grid")
    return [float(v) for v in np.linspace(lo, hi, n)]


def window(text: str) -> tuple[int, int]:
    parts = text.split(":")
    try:
        lo, hi = int(parts[0]), int(parts[1])
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError("window must look like lo:hi") from None
    if len(parts) != 2 or lo < 1 or hi <= lo:
        raise argparse.ArgumentTypeError("window must satisfy 1 <= lo < hi")
    return lo, hi


def measure(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("measure must be comma-separated numbers") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="orrw", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, delta=True):
        sp.add_argument("--graph", required=True,
                        help=f"edge-list file or a built-in name ({', '.join(STARTS)})")
        sp.add_argument("--start", help="start vertex label (defaults for built-in graphs)")
        sp.add_argument("--family", default="cover",
                        help="'cover' or a file with one edge subset per line (edges as u-v)")
        sp.add_argument("--close-family", action="store_true",
                        help="close a family file downward instead of rejecting it")
        sp.add_argument("--out", help="CSV output path (stdout when omitted)")
        if delta:
            sp.add_argument("--delta", type=positive, default=1.0, help="reinforcement factor")

    sp = sub.add_parser("simulate", help="Monte Carlo survival curve and decay slope")
    common(sp)
    sp.add_argument("--samples", type=int, default=100_000)
    sp.add_argument("--horizon", type=int, default=25, help="largest n on the grid")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--window", type=window, help="fit window lo:hi")

    sp = sub.add_parser("survival", help="exact survival curve P(T > n)")
    common(sp)
    sp.add_argument("--horizon", type=int, default=200, help="n_max")

    sp = sub.add_parser("alpha", help="critical exponent and attaining subset")
    common(sp)

    sp = sub.add_parser("rate", help="rate function at one measure")
    common(sp)
    sp.add_argument("--nu", type=measure, required=True, help="comma-separated vertex masses")

    sp = sub.add_parser("sweep-alpha", help="exponent over a log-spaced delta grid")
    common(sp, delta=False)
    sp.add_argument("--delta-grid", type=delta_grid, required=True, help="lo:hi:n (log-spaced)")

    sp = sub.add_parser("sweep-rate", help="rate along a one-parameter family of measures")
    common(sp)
    sp.add_argument("--nu-grid", type=linear_grid, default=linear_grid("0:0.5:21"),
                    help="x values lo:hi:n (linear)")
    sp.add_argument("--nu-form", choices=("center", "end"), default="center",
                    help="center: (1/2, x, 1/2-x); end: (x, 1/2, 1/2-x), in vertex order")

    sp = sub.add_parser("verify", help="run the built-in oracle checks")
    sp.add_argument("--strict", action="store_true",
                    help="also fail on the n=200 finite-horizon slope tolerance")
    return p


def parse_args(argv=None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def load_graph(args) -> FiniteGraph:
    name = args.graph
    if os.path.exists(name):
        if args.start is None:
            raise GraphError("--start is required for graph files")
        return read_edge_file(name, args.start)
    if name in STARTS:
        return fixture(name, args.start)
    raise GraphError(f"no such graph file: {name}")


def load_family(g: FiniteGraph, args):
    if args.family == "cover":
        return cover_family(g)
    masks = []
    with open(args.family, encoding="utf-8") as fh:
        for line in fh:
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            m = 0
            for tok in text.split():
                a, _, b = tok.partition("-")
                m |= 1 << g.edge_index(g.index_of(a), g.index_of(b))
            masks.append(m)
    if args.close_family:
        closed = downward_closure(g, masks)
        if closed != set(masks):
            warnings.warn("family closed downward")
        return make_family(g, closed)
    return make_family(g, masks)


def subset_label(g: FiniteGraph, mask: int) -> str:
    return "{" + ", ".join(g.edge_label(e) for e in mask_edges(mask)) + "}"


def cmd_simulate(args) -> int:
    g = load_graph(args)
    fam = load_family(g, args)
    est = estimate_tail_decay(g, args.delta, fam, n_grid=range(1, args.horizon + 1),
                              samples=args.samples, rng_seed=args.seed, window=args.window)
    write_csv(args.out, ["n", "survivors", "samples", "p_hat", "stderr"], est.rows)
    print(f"slope {est.slope:.6f} +- {est.stderr:.6f} over n in [{est.window[0]}, {est.window[1]}]",
          file=sys.stderr if not args.out else sys.stdout)
    return 0


def cmd_survival(args) -> int:
    g = load_graph(args)
    fam = load_family(g, args)
    curve = survival_curve(build_meta_chain(g, args.delta, fam), args.horizon)
    rows = [(n, s, ls) for n, (s, ls) in enumerate(zip(curve.survival, curve.log_survival))]
    write_csv(args.out, ["n", "survival", "log_survival"], rows)
    return 0


def cmd_alpha(args) -> int:
    g = load_graph(args)
    fam = load_family(g, args)
    res = alpha_c_detail(g, args.delta, fam)
    print(f"alpha_c {res.value:.6f}")
    print(f"attained on {subset_label(g, res.subset)}")
    if args.out:
        write_csv(args.out, ["delta", "alpha_c"], [(args.delta, res.value)])
    return 0


def cmd_rate(args) -> int:
    g = load_graph(args)
    if len(args.nu) != g.n_vertices:
        raise ValueError(f"--nu needs {g.n_vertices} entries in vertex order {list(g.labels)}")
    r = rate_I(g, args.delta, args.nu)
    print(f"I_delta {fmt(r.value)}")
    if r.sequence is not None:
        print(f"attained by {sequence_label(g, r.sequence)}")
    return 0


def cmd_sweep_alpha(args) -> int:
    g = load_graph(args)
    fam = load_family(g, args)
    write_csv(args.out, ["delta", "alpha_c"], sweep_alpha(g, fam, args.delta_grid))
    return 0


def cmd_sweep_rate(args) -> int:
    g = load_graph(args)
    if g.n_vertices != 3:
        raise ValueError("sweep-rate measure families are defined on three vertices")
    grid = []
    for x in args.nu_grid:
        nu = [0.5, x, 0.5 - x] if args.nu_form == "center" else [x, 0.5, 0.5 - x]
        grid.append((x, nu))
    write_csv(args.out, ["nu_param", "I_delta", "attaining_sequence"], sweep_rate(g, args.delta, grid))
    return 0


def cmd_verify(args) -> int:
    from .verify import run_checks
    results = run_checks(strict=args.strict)
    failed = 0
    for name, ok, detail, gating in results:
        tag = "PASS" if ok else ("FAIL" if gating else "NOTE")
        print(f"{tag}  {name}: {detail}")
        failed += (not ok) and gating
    print(f"{len(results)} checks, {failed} failed")
    return 1 if failed else 0


HANDLERS = {
    "simulate": cmd_simulate,
    "survival": cmd_survival,
    "alpha": cmd_alpha,
    "rate": cmd_rate,
    "sweep-alpha": cmd_sweep_alpha,
    "sweep-rate": cmd_sweep_rate,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = parse_args(argv)
    try:
        return HANDLERS[args.command](args)
    except (GraphError, ValueError, OSError, KeyError) as exc:
        print(f"orrw {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
