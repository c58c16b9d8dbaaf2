"""``symqaoa`` command line: orbits, energy, optimize, rqaoa, bench.

Exit codes: 0 ok, 2 input error, 3 resource guard, 4 solver timeout,
5 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from symqaoa import bench
from symqaoa.energy import THREADS_ENV, TermEvaluator, default_workers, full_energy, reduced_energy
from symqaoa.errors import InputError, SymqaoaError
from symqaoa.graphio import Graph, read_graph
from symqaoa.hamiltonian import Hamiltonian, build_ising, build_maxcut, hamiltonian_graph
from symqaoa.lightcone import DEFAULT_MAX_WIDTH
from symqaoa.optimize import OptConfig, optimize_params, rqaoa_run
from symqaoa.simulator import QaoaParams
from symqaoa.symmetry import (
    DEFAULT_SOLVER_TIMEOUT,
    GeneratorSet,
    OrbitPartition,
    automorphism_generators,
    hamiltonian_generators,
    term_orbits,
    weighted_gadget,
)

log = logging.getLogger("symqaoa")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    p: int = 1
    width_guard: int = DEFAULT_MAX_WIDTH
    solver_timeout: float = DEFAULT_SOLVER_TIMEOUT
    threads: int = 1
    problem: str = "maxcut"
    weighted: bool = False
    use_partial_generators: bool = False
    grid_points: int = 8
    n_starts: int = 3

    def __post_init__(self):
        if self.p < 1 or self.width_guard < 1 or self.solver_timeout <= 0 or self.threads < 1:
            raise InputError("p, width guard, solver timeout and threads must all be positive")
        if self.grid_points < 1 or self.n_starts < 0:
            raise InputError("grid points must be positive and starts non-negative")

    def opt_config(self, **extra) -> OptConfig:
        return OptConfig(
            grid_points=self.grid_points, n_starts=self.n_starts, seed=self.seed,
            max_width=self.width_guard, workers=self.threads, solver_timeout=self.solver_timeout,
            use_partial_generators=self.use_partial_generators, **extra,
        )


def _angles(text: str, p: int, what: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise InputError(f"--{what} must be comma-separated numbers in radians") from None
    if len(vals) != p:
        raise InputError(f"--{what} has {len(vals)} values, expected p={p}")
    return vals


def _load(path: str, cfg: RunConfig) -> tuple[Graph, Hamiltonian]:
    try:
        g = read_graph(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if not cfg.weighted:
        g = Graph(g.n_vertices, tuple((u, v, 1.0) for u, v, _ in g.edges), g.labels)
    h = build_maxcut(g) if cfg.problem == "maxcut" else build_ising(g)
    return g, h


def _symmetries(h: Hamiltonian, cfg: RunConfig, strict: bool) -> tuple[GeneratorSet, OrbitPartition]:
    """Generators on the original variables and the term orbits they induce.

    With ``strict`` a solver timeout propagates; otherwise the pipeline falls
    back to the partial or trivial group.
    """
    if strict:
        cg, back = weighted_gadget(hamiltonian_graph(h))
        gens = automorphism_generators(cg, cfg.solver_timeout).restrict(back)
    else:
        gens, timed_out = hamiltonian_generators(h, cfg.solver_timeout, cfg.use_partial_generators)
        if timed_out:
            log.warning("automorphism search timed out; continuing with %d generators", len(gens.generators))
    return gens, term_orbits(gens, h)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def cmd_orbits(args, cfg: RunConfig):
    g, h = _load(args.graph, cfg)
    gens, orbits = _symmetries(h, cfg, strict=True)
    out = orbits.to_dict(g)
    out.update(n_vertices=g.n_vertices, n_edges=g.n_edges, n_generators=len(gens.generators))
    if args.generators:
        out["generators"] = gens.to_dict()["generators"]
    _emit(out)


def cmd_energy(args, cfg: RunConfig):
    _, h = _load(args.graph, cfg)
    params = QaoaParams(_angles(args.betas, cfg.p, "betas"), _angles(args.gammas, cfg.p, "gammas"))
    ev = TermEvaluator(h, cfg.width_guard, cfg.threads)
    if args.mode == "full":
        report = full_energy(h, params, evaluator=ev)
    else:
        _, orbits = _symmetries(h, cfg, strict=False)
        report = reduced_energy(h, orbits, params, evaluator=ev)
    out = report.to_dict()
    out["params"] = params.to_dict()
    _emit(out)


def cmd_optimize(args, cfg: RunConfig):
    _, h = _load(args.graph, cfg)
    orbits = None if args.mode == "full" else _symmetries(h, cfg, strict=False)[1]
    res = optimize_params(h, orbits, cfg.p, cfg.opt_config())
    out = res.to_dict()
    out["mode"] = args.mode
    _emit(out)


def cmd_rqaoa(args, cfg: RunConfig):
    g, h = _load(args.graph, cfg)
    res = rqaoa_run(h, cfg.p, args.cutoff, cfg.opt_config(
        allow_degenerate=args.allow_degenerate, warm_start=args.warm_start, use_symmetry=args.mode == "reduced",
    ))
    out = res.to_dict()
    if g.labels is not None:
        out["labels"] = list(g.labels)
    _emit(out)


def cmd_bench(args, cfg: RunConfig):
    params = None
    if args.betas is not None or args.gammas is not None:
        if args.betas is None or args.gammas is None:
            raise InputError("--betas and --gammas must be given together")
        params = QaoaParams(_angles(args.betas, cfg.p, "betas"), _angles(args.gammas, cfg.p, "gammas"))
    reports = []
    for path in args.graph:
        g, _ = _load(path, cfg)
        reports.append(bench.run_bench(
            g, cfg.p, params, name=Path(path).stem, problem=cfg.problem, max_width=cfg.width_guard,
            workers=cfg.threads, solver_timeout=cfg.solver_timeout,
        ))
    if args.format == "csv":
        sys.stdout.write(bench.reports_to_csv(reports))
    else:
        sys.stdout.write(bench.reports_to_json(reports) + "\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--problem", choices=["maxcut", "ising"], default="maxcut",
                        help="maxcut: w(1 - Z_u Z_v)/2 per edge; ising: J Z_u Z_v per edge")
    common.add_argument("--weighted", action="store_true",
                        help="honour the weight column (otherwise every edge has weight 1)")
    common.add_argument("--p", type=int, default=1, help="QAOA depth")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--width-guard", type=int, default=DEFAULT_MAX_WIDTH,
                        help="largest reverse causal cone (qubits) to simulate")
    common.add_argument("--solver-timeout", type=float, default=DEFAULT_SOLVER_TIMEOUT,
                        help="automorphism search budget in seconds")
    common.add_argument("--use-partial-generators", action="store_true",
                        help="on solver timeout keep the generators found so far instead of the trivial group")
    common.add_argument("--threads", type=int, default=None,
                        help=f"worker threads for term evaluation (default ${THREADS_ENV} or 1)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="symqaoa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbits", parents=[common], help="edge orbits of a graph")
    p.add_argument("graph")
    p.add_argument("--generators", action="store_true", help="include the generator list")
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("energy", parents=[common], help="QAOA energy at given angles")
    p.add_argument("graph")
    p.add_argument("--betas", required=True)
    p.add_argument("--gammas", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--full", dest="mode", action="store_const", const="full")
    mode.add_argument("--reduced", dest="mode", action="store_const", const="reduced")
    p.set_defaults(func=cmd_energy, mode="reduced")

    p = sub.add_parser("optimize", parents=[common], help="train QAOA angles")
    p.add_argument("graph")
    p.add_argument("--grid-points", type=int, default=8)
    p.add_argument("--starts", type=int, default=3)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--full", dest="mode", action="store_const", const="full")
    mode.add_argument("--reduced", dest="mode", action="store_const", const="reduced")
    p.set_defaults(func=cmd_optimize, mode="reduced")

    p = sub.add_parser("rqaoa", parents=[common], help="recursive QAOA")
    p.add_argument("graph")
    p.add_argument("--cutoff", type=int, default=2, help="brute-force once this many variables remain")
    p.add_argument("--grid-points", type=int, default=8)
    p.add_argument("--starts", type=int, default=3)
    p.add_argument("--allow-degenerate", action="store_true",
                   help="when every correlation vanishes, eliminate the first edge with sign +1")
    p.add_argument("--warm-start", action="store_true",
                   help="also seed each round's optimizer with the previous round's angles")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--full", dest="mode", action="store_const", const="full")
    mode.add_argument("--reduced", dest="mode", action="store_const", const="reduced")
    p.set_defaults(func=cmd_rqaoa, mode="reduced")

    p = sub.add_parser("bench", parents=[common], help="time full vs reduced evaluation")
    p.add_argument("graph", nargs="+")
    p.add_argument("--betas")
    p.add_argument("--gammas")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = RunConfig(
            seed=args.seed, p=args.p, width_guard=args.width_guard, solver_timeout=args.solver_timeout,
            threads=args.threads if args.threads is not None else default_workers(),
            problem=args.problem, weighted=args.weighted, use_partial_generators=args.use_partial_generators,
            grid_points=getattr(args, "grid_points", 8), n_starts=getattr(args, "starts", 3),
        )
        args.func(args, cfg)
    except SymqaoaError as exc:
        print(f"symqaoa: error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
