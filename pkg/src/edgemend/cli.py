"""Command line harness: reproducible experiments from one seed.

Subcommands
-----------
generate   scale-free network plus uniform random opinions
attack     push selected opinions to an extreme (random or knapsack)
recommend  score and select consensus-restoring edges, dump CSV
run        full pipeline with trajectory and figure-data CSVs
mfpt       exact or walk-estimated first-passage table dump
gadget     evaluate the clique-minus-matching reduction instance

Flags override config-file values, which override defaults. All
randomness flows from ``--seed`` through fixed per-component labels, so
re-running a command with its archived config reproduces the outputs
byte for byte (the trajectory's wall-clock seconds column aside).
"""
from __future__ import annotations

import argparse
import itertools
import os
import sys

import numpy as np

from .adversary import attack_knapsack, attack_random
from .config import (ExperimentConfig, derive_seed, load_config,
                     write_config)
from .errors import ConfigError, EdgemendError
from .graph import generate_scale_free, read_graph, write_graph
from .mfpt import mfpt_estimate, mfpt_exact, write_mfpt_csv
from .oracle import build_gadget, verify_gadget
from .perturbation import write_scores_csv
from .recommend import recommend_edges, run_restore, write_trajectory_csv
from .spectral import (eigencentrality, read_vector, validate_opinions,
                       write_vector)


def _ids(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip() != ""]


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip() != ""]


def _out(cfg: ExperimentConfig, name: str) -> str:
    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, name)


def _load_cfg(args, **overrides) -> ExperimentConfig:
    base = {"seed": args.seed, "threads": args.threads,
            "out_dir": args.out_dir}
    base.update(overrides)
    return load_config(args.config, overrides=base)


def _make_opinions(cfg: ExperimentConfig, n: int) -> np.ndarray:
    if cfg.opinions_file:
        return validate_opinions(read_vector(cfg.opinions_file, n))
    rng = np.random.default_rng(derive_seed(cfg.seed, "opinions"))
    return rng.random(n)


def _write_targets(targets, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in targets:
            fh.write(f"{int(t)}\n")


def cmd_generate(args) -> int:
    cfg = _load_cfg(args, network_n=args.n, network_gamma=args.gamma)
    g = generate_scale_free(cfg.network_n, gamma=cfg.network_gamma,
                            seed=derive_seed(cfg.seed, "graph"))
    write_graph(g, _out(cfg, args.graph_out))
    write_vector(_make_opinions(cfg, g.n), _out(cfg, args.opinions_out))
    print(f"generated n={g.n} edges={g.n_edges}")
    return 0


def _apply_attack(cfg: ExperimentConfig, g, x):
    if cfg.attack_kind == "none":
        return x.copy(), np.array([], dtype=np.int64)
    if cfg.attack_kind == "random":
        return attack_random(x, cfg.attack_n_targets,
                             value=cfg.attack_value,
                             seed=derive_seed(cfg.seed, "attack"))
    if cfg.attack_kind == "knapsack":
        pi = eigencentrality(g)
        return attack_knapsack(pi.values, x, cfg.attack_budget,
                               value=cfg.attack_value)
    raise ValueError(f"unknown attack kind {cfg.attack_kind!r}")


def cmd_attack(args) -> int:
    cfg = _load_cfg(args, attack_kind=args.kind,
                    attack_n_targets=args.n_targets,
                    attack_budget=args.budget, attack_value=args.value,
                    opinions_file=args.opinions)
    g = read_graph(args.graph)
    x = _make_opinions(cfg, g.n)
    x_tilde, targets = _apply_attack(cfg, g, x)
    write_vector(x_tilde, _out(cfg, args.attacked_out))
    _write_targets(targets, _out(cfg, args.targets_out))
    pi = eigencentrality(g)
    shift = float(pi.values @ (x_tilde - x))
    print(f"targets={len(targets)} consensus_shift={shift!r}")
    return 0


def cmd_recommend(args) -> int:
    cfg = _load_cfg(args, recommend_k=args.k, recommend_n_src=args.n_src,
                    recommend_theta=args.theta,
                    recommend_mfpt_mode=args.mode,
                    recommend_walk_len=args.walk_len,
                    recommend_score_subset_size=args.subset_size,
                    recommend_destination_scope=args.scope)
    g = read_graph(args.graph)
    x = validate_opinions(read_vector(args.opinions, g.n))
    x_tilde = validate_opinions(read_vector(args.attacked, g.n))
    edges = recommend_edges(g, x, x_tilde, cfg.recommender())
    write_scores_csv(edges, _out(cfg, args.scores_out))
    print(f"recommended {len(edges)} edges")
    return 0


def cmd_run(args) -> int:
    cfg = _load_cfg(
        args, network_n=args.n, network_gamma=args.gamma,
        network_file=args.graph, attack_kind=args.kind,
        attack_n_targets=args.n_targets, attack_budget=args.budget,
        attack_value=args.value, recommend_k=args.k,
        recommend_n_src=args.n_src, recommend_theta=args.theta,
        recommend_mfpt_mode=args.mode, recommend_walk_len=args.walk_len,
        recommend_score_subset_size=args.subset_size,
        run_batch=args.batch, run_max_edges=args.max_edges,
        run_stop_tol=args.stop_tol,
        run_figures=(None if args.figures is None else args.figures))
    write_config(cfg, _out(cfg, "config_used.cfg"))
    if cfg.network_file:
        g = read_graph(cfg.network_file)
    else:
        g = generate_scale_free(cfg.network_n, gamma=cfg.network_gamma,
                                seed=derive_seed(cfg.seed, "graph"))
    write_graph(g, _out(cfg, "graph_initial.tsv"))
    x = _make_opinions(cfg, g.n)
    write_vector(x, _out(cfg, "opinions.tsv"))
    x_tilde, targets = _apply_attack(cfg, g, x)
    write_vector(x_tilde, _out(cfg, "opinions_attacked.tsv"))
    _write_targets(targets, _out(cfg, "targets.tsv"))

    final, traj = run_restore(g, x, x_tilde, cfg.recommender(),
                              batch=cfg.run_batch,
                              max_edges=cfg.run_max_edges,
                              stop_tol=cfg.run_stop_tol)
    write_trajectory_csv(traj, _out(cfg, "trajectory.csv"))
    with open(_out(cfg, "edges_added.csv"), "w", encoding="utf-8") as fh:
        fh.write("batch,r,c,theta,score\n")
        for rec in traj.records:
            for e in rec.edges:
                fh.write(f"{rec.batch},{e.r},{e.c},{float(e.theta)!r},"
                         f"{float(e.score)!r}\n")
    write_graph(final, _out(cfg, "graph_final.tsv"))

    if cfg.run_figures:
        from .experiments import emit_figure_data

        emit_figure_data(g, x_tilde, cfg.recommender(), cfg.out_dir,
                         seed=derive_seed(cfg.seed, "figures"))
    print(f"initial={float(traj.initial_objective)!r} "
          f"final={float(traj.final_objective)!r} "
          f"edges={traj.edges_added} stop={traj.stop_reason}")
    return 0


def cmd_mfpt(args) -> int:
    cfg = _load_cfg(args, recommend_walk_len=args.walk_len)
    g = read_graph(args.graph)
    if args.mode == "exact":
        table = mfpt_exact(g)
    else:
        if not args.targets:
            raise ValueError("walk mode needs --targets")
        table = mfpt_estimate(g, _ids(args.targets),
                              walk_len=cfg.recommend_walk_len,
                              seed=derive_seed(cfg.seed, "walk"))
    write_mfpt_csv(table, _out(cfg, args.mfpt_out))
    for w in table.warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"mode={table.mode} n={table.n}")
    return 0


def cmd_gadget(args) -> int:
    inst = build_gadget(_floats(args.z), args.k, args.s)
    if args.chosen:
        idx = _ids(args.chosen)
        lhs, rhs = verify_gadget(inst, idx)
        best, best_obj = idx, rhs
        print(f"lhs={float(lhs)!r} rhs={float(rhs)!r}")
    else:
        best, best_obj = None, np.inf
        for subset in itertools.combinations(range(inst.n), inst.k):
            obj = abs(inst.z[list(subset)].sum() - inst.s)
            obj /= inst.m + inst.k
            if obj < best_obj:
                best, best_obj = list(subset), obj
    print(f"objective={float(best_obj)!r}")
    print("witness=" + ",".join(str(i) for i in best))
    return 0


def _common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--threads", type=int, default=None,
                     help="1 (default) forces the bit-exact sequential path")
    sub.add_argument("--config", default=None,
                     help="flat key = value file; flags override it")
    sub.add_argument("--out-dir", default=None)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="edgemend",
        description="consensus repair via recommended edges")
    sp = p.add_subparsers(dest="command", required=True)

    g = sp.add_parser("generate", help="scale-free network + opinions")
    _common(g)
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--gamma", type=float, default=None)
    g.add_argument("--graph-out", default="graph.tsv")
    g.add_argument("--opinions-out", default="opinions.tsv")
    g.set_defaults(func=cmd_generate)

    a = sp.add_parser("attack", help="set target opinions to an extreme")
    _common(a)
    a.add_argument("--graph", required=True)
    a.add_argument("--opinions", default=None)
    a.add_argument("--kind", choices=["random", "knapsack", "none"],
                   default=None)
    a.add_argument("--n-targets", type=int, default=None)
    a.add_argument("--budget", type=int, default=None)
    a.add_argument("--value", type=float, default=None)
    a.add_argument("--attacked-out", default="opinions_attacked.tsv")
    a.add_argument("--targets-out", default="targets.tsv")
    a.set_defaults(func=cmd_attack)

    r = sp.add_parser("recommend", help="score and select edges once")
    _common(r)
    r.add_argument("--graph", required=True)
    r.add_argument("--opinions", required=True)
    r.add_argument("--attacked", required=True)
    r.add_argument("--k", type=int, default=None)
    r.add_argument("--n-src", type=int, default=None)
    r.add_argument("--theta", type=float, default=None)
    r.add_argument("--mode", choices=["exact", "walk"], default=None)
    r.add_argument("--walk-len", type=int, default=None)
    r.add_argument("--subset-size", type=int, default=None)
    r.add_argument("--scope", choices=["all", "two_hop"], default=None)
    r.add_argument("--scores-out", default="recommended_edges.csv")
    r.set_defaults(func=cmd_recommend)

    u = sp.add_parser("run", help="attack then restore, with CSV dumps")
    _common(u)
    u.add_argument("--n", type=int, default=None)
    u.add_argument("--gamma", type=float, default=None)
    u.add_argument("--graph", default=None,
                   help="load this network instead of generating one")
    u.add_argument("--kind", choices=["random", "knapsack", "none"],
                   default=None)
    u.add_argument("--n-targets", type=int, default=None)
    u.add_argument("--budget", type=int, default=None)
    u.add_argument("--value", type=float, default=None)
    u.add_argument("--k", type=int, default=None)
    u.add_argument("--n-src", type=int, default=None)
    u.add_argument("--theta", type=float, default=None)
    u.add_argument("--mode", choices=["exact", "walk"], default=None)
    u.add_argument("--walk-len", type=int, default=None)
    u.add_argument("--subset-size", type=int, default=None)
    u.add_argument("--batch", type=int, default=None)
    u.add_argument("--max-edges", type=int, default=None)
    u.add_argument("--stop-tol", type=float, default=None)
    u.add_argument("--figures", action=argparse.BooleanOptionalAction,
                   default=None)
    u.set_defaults(func=cmd_run)

    m = sp.add_parser("mfpt", help="first-passage table dump")
    _common(m)
    m.add_argument("--graph", required=True)
    m.add_argument("--mode", choices=["exact", "walk"], default="exact")
    m.add_argument("--targets", default=None,
                   help="comma-separated node ids (walk mode)")
    m.add_argument("--walk-len", type=int, default=None)
    m.add_argument("--mfpt-out", default="mfpt.csv")
    m.set_defaults(func=cmd_mfpt)

    d = sp.add_parser("gadget", help="clique-minus-matching reduction")
    _common(d)
    d.add_argument("--z", required=True, help="comma-separated values")
    d.add_argument("--k", type=int, required=True)
    d.add_argument("--s", type=float, required=True)
    d.add_argument("--chosen", default=None,
                   help="comma-separated edge indices to verify")
    d.set_defaults(func=cmd_gadget)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EdgemendError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
