"""Deterministic user simulation and desk-scale evaluation studies.

Synthetic agents drive a SessionRuntime on a virtual clock: the scheduler
tick, renewal, clicks and favorites all replay identically for a given
seed. run_session returns both a metrics summary and the full event
trace, which the test suite audits against the evolution constants.

convergence_benchmark contrasts the adaptive engine with a forced-random
twin; correlation_study measures how well compressed map distances
reproduce full tf.idf distances (or a supplied ground-truth matrix).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.spatial.distance import pdist
from scipy.stats import spearmanr

from evonav.clock import VirtualClock
from evonav.engine import EngineConfig
from evonav.mapping import KnowledgeMap, estimate_intrinsic_dimensionality, fit_pca
from evonav.session import SessionRuntime
from evonav.text import RawDocument, build_vocabulary, vectorize_corpus, vectors_to_matrix
from evonav.users import UserProfile

BEHAVIORS = ("idle", "random_clicker", "topic_seeker", "topic_switcher", "multi_interest")


@dataclass(frozen=True)
class AgentSpec:
    """A scripted user. Click rule: pick the panel entry nearest (in map
    space) to the agent's current target centroid and click it when it
    falls inside the acceptance radius. Optional favorites and idle spans
    exercise the favorites/dormancy machinery."""

    behavior: str = "idle"
    target_cluster: int | None = None            # topic_seeker
    cluster_a: int | None = None                 # topic_switcher
    cluster_b: int | None = None
    switch_at_iteration: int = 0
    clusters: tuple[int, ...] = ()               # multi_interest
    acceptance_radius: float | None = None       # None -> derived from the map
    favorite_every: int = 0                      # favorite every Nth click (0 = never)
    max_favorites: int = 0                       # cap on held favorites (0 = unlimited)
    idle_spans: tuple[tuple[int, int], ...] = () # (first_iteration, length) windows with no actions
    seed: int = 0

    def __post_init__(self):
        if self.behavior not in BEHAVIORS:
            raise ValueError(f"unknown behavior: {self.behavior}")
        if self.behavior == "topic_seeker" and self.target_cluster is None:
            raise ValueError("topic_seeker needs target_cluster")
        if self.behavior == "topic_switcher" and (self.cluster_a is None or self.cluster_b is None):
            raise ValueError("topic_switcher needs cluster_a and cluster_b")
        if self.behavior == "multi_interest" and not self.clusters:
            raise ValueError("multi_interest needs clusters")

    def targets_at(self, iteration: int) -> tuple[int, ...]:
        if self.behavior == "topic_seeker":
            return (self.target_cluster,)
        if self.behavior == "topic_switcher":
            return (self.cluster_a,) if iteration < self.switch_at_iteration else (self.cluster_b,)
        if self.behavior == "multi_interest":
            return self.clusters
        return ()

    def idle_at(self, iteration: int) -> bool:
        return any(start <= iteration < start + length for start, length in self.idle_spans)


@dataclass
class RunMetrics:
    """Summary of one simulated session.

    iterations_to_target: first iteration at which the panel held
    target_quorum documents of the agent's current target cluster(s);
    runs that never get there record max_iterations. (The non-adaptive
    baseline structurally keeps one document per cluster, so only
    relevance-driven engines concentrate the panel and finish early.)
    """

    iterations_to_target: int
    first_relevance_target_iteration: int | None
    clicks_made: int
    mutation_draws: int
    mutation_fraction_observed: float | None
    history_violations: int
    iterations_run: int
    final_interest_point: list[float] | None = None
    target_docs_in_final_set: int = 0


def default_acceptance_radius(kmap: KnowledgeMap, clusters) -> float:
    """Click radius wide enough for a target cluster's own documents:
    1.25 x the 95th percentile member-to-centroid distance."""
    spread = 0.0
    for cluster in clusters:
        members = kmap.cluster_members(cluster)
        centroid = kmap.centroids[cluster - 1]
        distances = [float(np.linalg.norm(kmap.coord_of(d) - centroid)) for d in members]
        if distances:
            spread = max(spread, float(np.percentile(distances, 95)))
    return 1.25 * spread


def run_session(
    agent: AgentSpec,
    config: EngineConfig,
    kmap: KnowledgeMap,
    max_iterations: int,
    force_random: bool = False,
    target_quorum: int = 3,
    stop_when_target_reached: bool = False,
) -> tuple[RunMetrics, list[dict]]:
    """Drive one session for max_iterations renewals under virtual time."""
    clock = VirtualClock()
    profile = UserProfile(user_id=f"sim-{agent.seed}", created_at=0.0, last_action_at=0.0)
    rng = np.random.default_rng([config.rng_seed, agent.seed])
    trace: list[dict] = []
    runtime = SessionRuntime(
        profile, kmap, config, rng, clock, trace=trace, force_random=force_random
    )
    runtime.start()

    agent_rng = np.random.default_rng([agent.seed, 7119])
    all_targets = sorted(
        set(agent.targets_at(0)) | set(agent.targets_at(max_iterations + 1)) | set(agent.clusters)
    )
    radius = agent.acceptance_radius
    if radius is None and all_targets:
        radius = default_acceptance_radius(kmap, all_targets)

    clicks = 0
    iterations_to_target: int | None = None
    first_relevance_target: int | None = None
    violations = 0
    last_seen: dict[str, int] = {}

    def target_count(iteration: int) -> int:
        targets = set(agent.targets_at(iteration))
        if not targets:
            return 0
        return sum(1 for d in runtime.nav_set.doc_ids() if kmap.cluster_of(d) in targets)

    def note_panel(iteration: int) -> None:
        for doc in runtime.nav_set.doc_ids():
            last_seen[doc] = iteration

    def act(iteration: int) -> None:
        nonlocal clicks
        if agent.behavior == "idle" or agent.idle_at(iteration):
            return
        entries = runtime.nav_set.entries
        if agent.behavior == "random_clicker":
            choice = entries[agent_rng.integers(len(entries))]
            runtime.click(choice.doc_id)
            clicks += 1
        else:
            targets = agent.targets_at(iteration)
            centroids = [kmap.centroids[c - 1] for c in targets]
            best, best_dist = None, np.inf
            for entry in entries:
                coord = kmap.coord_of(entry.doc_id)
                dist = min(float(np.linalg.norm(coord - c)) for c in centroids)
                if dist < best_dist:
                    best, best_dist = entry, dist
            if best is not None and best_dist <= radius:
                runtime.click(best.doc_id)
                clicks += 1
            else:
                return
        if agent.favorite_every > 0 and clicks % agent.favorite_every == 0:
            if agent.max_favorites and len(profile.favorites) >= agent.max_favorites:
                return
            last_click = best.doc_id if agent.behavior != "random_clicker" else choice.doc_id
            if last_click not in profile.favorites:
                runtime.add_favorite(last_click)

    note_panel(0)
    if agent.targets_at(0) and target_count(0) >= target_quorum:
        iterations_to_target = 0
    act(0)

    while runtime.nav_set.iteration_counter < max_iterations:
        clock.advance(config.ageing_interval)
        before = runtime.nav_set.iteration_counter
        runtime.tick()
        iteration = runtime.nav_set.iteration_counter
        if iteration == before:
            continue
        # audit the renewal that just happened with our own display ledger
        renewal = next(
            e for e in reversed(trace) if e["event"] == "renewal" and e["iteration"] == iteration
        )
        targets = set(agent.targets_at(iteration))
        for repl in renewal["replaced"]:
            seen = last_seen.get(repl["new"])
            if seen is not None and iteration - seen <= config.history_recent_iterations:
                violations += 1
            if (
                first_relevance_target is None
                and repl["mode"] == "relevance"
                and targets
                and kmap.cluster_of(repl["new"]) in targets
            ):
                first_relevance_target = iteration
        note_panel(iteration)
        if iterations_to_target is None and targets and target_count(iteration) >= target_quorum:
            iterations_to_target = iteration
        if stop_when_target_reached and iterations_to_target is not None:
            break
        act(iteration)

    draws = sum(
        1
        for e in trace
        if e["event"] == "renewal"
        for r in e["replaced"]
        if r["mode"] in ("mutation", "relevance")
    )
    mutations = sum(
        1
        for e in trace
        if e["event"] == "renewal"
        for r in e["replaced"]
        if r["mode"] == "mutation"
    )
    final_point = next(
        (
            e["interest_point"]
            for e in reversed(trace)
            if e["event"] == "renewal" and e["interest_point"] is not None
        ),
        None,
    )
    metrics = RunMetrics(
        iterations_to_target=iterations_to_target if iterations_to_target is not None else max_iterations,
        first_relevance_target_iteration=first_relevance_target,
        clicks_made=clicks,
        mutation_draws=draws,
        mutation_fraction_observed=(mutations / draws) if draws else None,
        history_violations=violations,
        iterations_run=runtime.nav_set.iteration_counter,
        final_interest_point=final_point,
        target_docs_in_final_set=target_count(runtime.nav_set.iteration_counter),
    )
    return metrics, trace


def _bootstrap_median_ci(
    values: list[float], rng: np.random.Generator, n_resamples: int = 1000
) -> tuple[float, float]:
    arr = np.asarray(values, dtype=float)
    medians = np.median(
        arr[rng.integers(0, len(arr), size=(n_resamples, len(arr)))], axis=1
    )
    return float(np.percentile(medians, 2.5)), float(np.percentile(medians, 97.5))


def convergence_benchmark(
    kmap: KnowledgeMap,
    config: EngineConfig,
    n_runs: int,
    max_iterations: int = 150,
    target_quorum: int = 3,
    seed: int = 0,
) -> dict:
    """Adaptive engine vs forced-random twin on topic_seeker agents.

    The two arms share agents and seeds and differ only in whether renewal
    may use relevance selection. Reports per-arm median
    iterations_to_target with bootstrap 95% confidence intervals.
    """
    report: dict = {"n_runs": n_runs, "arms": {}}
    if n_runs == 0:
        return report
    for arm, force_random in (("adaptive", False), ("random", True)):
        values = []
        target_counts = []
        for i in range(n_runs):
            agent = AgentSpec(
                behavior="topic_seeker",
                target_cluster=(i % kmap.cluster_count) + 1,
                seed=seed * 100_003 + i,
            )
            run_config = replace(config, rng_seed=seed * 59_999 + i)
            metrics, _ = run_session(
                agent,
                run_config,
                kmap,
                max_iterations,
                force_random=force_random,
                target_quorum=target_quorum,
                stop_when_target_reached=True,
            )
            values.append(metrics.iterations_to_target)
            target_counts.append(metrics.target_docs_in_final_set)
        ci = _bootstrap_median_ci(values, np.random.default_rng(seed + 17))
        report["arms"][arm] = {
            "median_iterations_to_target": float(np.median(values)),
            "ci95": list(ci),
            "mean_target_docs_in_final_set": float(np.mean(target_counts)),
            "values": values,
        }
    return report


def correlation_study(
    corpus: list[RawDocument],
    stop_words: set[str],
    dims: list[int] | None = None,
    ground_truth: np.ndarray | None = None,
    variance_threshold: float = 0.90,
) -> dict:
    """Spearman correlation of compressed pairwise distances vs ground truth.

    Ground truth defaults to the distances in the uncompressed tf.idf
    space (so the full-space row correlates exactly 1.0). Returns rows for
    each requested dimensionality, the estimated intrinsic dimensionality,
    and the full space.
    """
    vocab = build_vocabulary(corpus, stop_words)
    matrix = vectors_to_matrix(vectorize_corpus(corpus, vocab, stop_words), len(vocab))
    full_distances = pdist(matrix)
    truth = full_distances if ground_truth is None else np.asarray(ground_truth)
    intrinsic = estimate_intrinsic_dimensionality(matrix, variance_threshold)
    wanted = sorted(set((dims or [2, 3]) + [intrinsic]))
    rows = []
    for d in wanted:
        proj = fit_pca(matrix, d)
        coords = (matrix - proj.mean) @ proj.basis.T
        rho = float(spearmanr(truth, pdist(coords)).statistic)
        rows.append(
            {
                "space": f"pca_{d}" + ("_intrinsic" if d == intrinsic else ""),
                "dimensionality": d,
                "spearman": rho,
            }
        )
    rows.append(
        {
            "space": "tfidf_full",
            "dimensionality": len(vocab),
            "spearman": float(spearmanr(truth, full_distances).statistic),
        }
    )
    return {"intrinsic_dimensionality": intrinsic, "rows": rows}


# -- result writers -------------------------------------------------------


def write_trace_jsonl(trace: list[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for event in trace:
            fh.write(json.dumps(event, sort_keys=True) + "\n")


def write_benchmark_csv(report: dict, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["arm", "run", "iterations_to_target"])
        for arm, data in report.get("arms", {}).items():
            for i, value in enumerate(data["values"]):
                writer.writerow([arm, i, value])


def write_correlation_csv(result: dict, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["space", "dimensionality", "spearman"])
        for row in result["rows"]:
            writer.writerow([row["space"], row["dimensionality"], row["spearman"]])


def write_correlation_chart(result: dict, path: str | Path) -> None:
    """Chart-ready series: correlation as a function of dimensionality."""
    pca_rows = [r for r in result["rows"] if r["space"].startswith("pca_")]
    payload = {
        "intrinsic_dimensionality": result["intrinsic_dimensionality"],
        "pca": {
            "dimensionality": [r["dimensionality"] for r in pca_rows],
            "spearman": [r["spearman"] for r in pca_rows],
        },
        "tfidf_full": next(r["spearman"] for r in result["rows"] if r["space"] == "tfidf_full"),
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
