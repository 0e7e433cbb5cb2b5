"""Command line: corpus build, HTTP service, simulation studies."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from evonav.errors import NavError


def _cmd_build(args) -> int:
    from evonav.service import ingest_and_build

    summary = ingest_and_build(
        args.corpus,
        args.out,
        seed=args.seed,
        clusters=args.clusters,
        target_dim=args.dim,
        variance_threshold=args.variance,
        stop_words_path=args.stop_words,
    )
    print(f"corpus size:      {summary['corpus_size']}")
    print(f"vocabulary size:  {summary['vocabulary_size']}")
    print(f"dimensionality:   {summary['dimensionality']}")
    print(f"cluster counts:   {summary['cluster_counts']}")
    print(f"map written to:   {summary['map_path']}")
    return 0


def _cmd_serve(args) -> int:
    from evonav.service import parse_config_file, serve

    serve(parse_config_file(args.config))
    return 0


def _load_map(path):
    from evonav.mapping import load_map

    return load_map(path)


def _engine_config(seed: int):
    from evonav.engine import EngineConfig

    return EngineConfig(rng_seed=seed)


def _cmd_sim_run(args) -> int:
    from evonav.sim import AgentSpec, run_session, write_trace_jsonl

    kmap = _load_map(args.map)
    agent = AgentSpec(
        behavior=args.agent,
        target_cluster=args.target_cluster,
        cluster_a=args.cluster_a,
        cluster_b=args.cluster_b,
        switch_at_iteration=args.switch_at,
        clusters=tuple(args.multi_clusters or ()),
        seed=args.seed,
    )
    metrics, trace = run_session(
        agent, _engine_config(args.seed), kmap, args.iterations, force_random=args.force_random
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_trace_jsonl(trace, out / "trace.jsonl")
    (out / "metrics.json").write_text(json.dumps(metrics.__dict__, indent=2, sort_keys=True))
    print(json.dumps(metrics.__dict__, indent=2, sort_keys=True))
    return 0


def _cmd_sim_bench(args) -> int:
    from evonav.sim import convergence_benchmark, write_benchmark_csv

    kmap = _load_map(args.map)
    report = convergence_benchmark(
        kmap,
        _engine_config(args.seed),
        n_runs=args.runs,
        max_iterations=args.iterations,
        seed=args.seed,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_benchmark_csv(report, out / "benchmark.csv")
    printable = {
        arm: {k: v for k, v in data.items() if k != "values"}
        for arm, data in report.get("arms", {}).items()
    }
    (out / "benchmark.json").write_text(json.dumps(report, indent=2, sort_keys=True))
    print(json.dumps({"n_runs": report["n_runs"], "arms": printable}, indent=2, sort_keys=True))
    return 0


def _cmd_sim_corr(args) -> int:
    from evonav.sim import correlation_study, write_correlation_chart, write_correlation_csv
    from evonav.text import default_stop_words, load_corpus, load_stop_words

    corpus = load_corpus(args.corpus)
    stop_words = load_stop_words(args.stop_words) if args.stop_words else default_stop_words()
    result = correlation_study(corpus, stop_words, dims=args.dims)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_correlation_csv(result, out / "correlation.csv")
    write_correlation_chart(result, out / "correlation_chart.json")
    for row in result["rows"]:
        print(f"{row['space']:<22} d={row['dimensionality']:<6} spearman={row['spearman']:.4f}")
    return 0


def _parse_dims(raw: str) -> list[int]:
    return [int(x) for x in raw.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evonav", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="ingest a corpus and write the map file")
    build.add_argument("--corpus", required=True)
    build.add_argument("--out", required=True)
    group = build.add_mutually_exclusive_group()
    group.add_argument("--dim", type=int, default=None, help="fixed projection dimensionality")
    group.add_argument(
        "--variance", type=float, default=0.90, help="variance threshold for the automatic choice"
    )
    build.add_argument("--seed", type=int, required=True)
    build.add_argument("--clusters", type=int, default=10)
    build.add_argument("--stop-words", default=None)
    build.set_defaults(func=_cmd_build)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--config", required=True)
    serve.set_defaults(func=_cmd_serve)

    sim = sub.add_parser("sim", help="simulation studies")
    sim_sub = sim.add_subparsers(dest="sim_command", required=True)

    run = sim_sub.add_parser("run", help="one agent session with full trace")
    run.add_argument("--map", required=True)
    run.add_argument("--agent", default="topic_seeker")
    run.add_argument("--target-cluster", type=int, default=1)
    run.add_argument("--cluster-a", type=int, default=None)
    run.add_argument("--cluster-b", type=int, default=None)
    run.add_argument("--switch-at", type=int, default=0)
    run.add_argument("--multi-clusters", type=_parse_dims, default=None)
    run.add_argument("--iterations", type=int, default=200)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--force-random", action="store_true")
    run.add_argument("--out", default="results")
    run.set_defaults(func=_cmd_sim_run)

    bench = sim_sub.add_parser("bench", help="adaptive vs forced-random comparison")
    bench.add_argument("--map", required=True)
    bench.add_argument("--runs", type=int, default=200)
    bench.add_argument("--iterations", type=int, default=150)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", default="results")
    bench.set_defaults(func=_cmd_sim_bench)

    corr = sim_sub.add_parser("corr", help="compression fidelity study")
    corr.add_argument("--corpus", required=True)
    corr.add_argument("--dims", type=_parse_dims, default=[2, 3])
    corr.add_argument("--stop-words", default=None)
    corr.add_argument("--out", default="results")
    corr.set_defaults(func=_cmd_sim_corr)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (NavError, FileNotFoundError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
