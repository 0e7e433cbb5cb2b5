import json

import numpy as np
import pytest

from evonav.engine import EngineConfig
from evonav.mapping import build_knowledge_map
from evonav.datasets import SyntheticCorpusConfig, synthetic_topic_corpus
from evonav.sim import (
    AgentSpec,
    convergence_benchmark,
    correlation_study,
    run_session,
    write_benchmark_csv,
    write_correlation_chart,
    write_correlation_csv,
    write_trace_jsonl,
)


def config(seed=1, **kw):
    return EngineConfig(rng_seed=seed, **kw)


class TestAgentSpec:
    def test_unknown_behavior(self):
        with pytest.raises(ValueError):
            AgentSpec(behavior="wanderer")

    def test_topic_seeker_needs_target(self):
        with pytest.raises(ValueError):
            AgentSpec(behavior="topic_seeker")

    def test_switcher_targets_change_at_switch(self):
        agent = AgentSpec(
            behavior="topic_switcher", cluster_a=1, cluster_b=5, switch_at_iteration=10
        )
        assert agent.targets_at(9) == (1,)
        assert agent.targets_at(10) == (5,)

    def test_idle_spans(self):
        agent = AgentSpec(behavior="idle", idle_spans=((5, 3),))
        assert not agent.idle_at(4)
        assert agent.idle_at(5) and agent.idle_at(7)
        assert not agent.idle_at(8)


class TestRunSession:
    def test_idle_agent_never_interacts(self, knowledge_map):
        metrics, trace = run_session(
            AgentSpec(behavior="idle", seed=4), config(4), knowledge_map, 60
        )
        assert metrics.clicks_made == 0
        assert metrics.history_violations == 0
        for event in trace:
            if event["event"] == "renewal":
                assert len(event["replaced"]) == 3
                assert all(r["mode"] == "baseline" for r in event["replaced"])
                assert all(f == 0 for _, f in event["set_after"])

    def test_same_seed_identical_traces(self, knowledge_map):
        agent = AgentSpec(behavior="topic_seeker", target_cluster=2, seed=9)
        runs = [
            json.dumps(run_session(agent, config(9), knowledge_map, 50)[1], sort_keys=True)
            for _ in range(2)
        ]
        assert runs[0] == runs[1]

    def test_seeker_mutation_off_matches_nearest_oracle(self, knowledge_map):
        """Replay the trace and re-derive every relevance arrival by brute force."""
        kmap = knowledge_map
        cfg = config(5, mutation_probability=0.0)
        agent = AgentSpec(behavior="topic_seeker", target_cluster=3, seed=5)
        metrics, trace = run_session(agent, cfg, kmap, 40)
        assert metrics.clicks_made > 0

        last_seen: dict[str, int] = {}
        panel: list[str] = []
        favorites: set[str] = set()
        for event in trace:
            if event["event"] == "init":
                panel = [doc for doc, _ in event["set_after"]]
                for doc in panel:
                    last_seen[doc] = 0
            elif event["event"] == "favorite_add":
                favorites.add(event["doc"])
                for repl in [event["backfill"]] if event["backfill"] else []:
                    panel[repl["slot"]] = repl["new"]
                    last_seen[repl["new"]] = event["iteration"]
            elif event["event"] == "renewal":
                iteration = event["iteration"]
                point = event["interest_point"]
                for repl in event["replaced"]:
                    if repl["mode"] == "relevance":
                        eligible = [
                            d
                            for d in kmap.doc_ids
                            if d not in panel
                            and d not in favorites
                            and (d not in last_seen or iteration - last_seen[d] > cfg.history_recent_iterations)
                        ]
                        expected = min(
                            eligible,
                            key=lambda d: (float(np.linalg.norm(kmap.coord_of(d) - point)), d),
                        )
                        assert repl["new"] == expected
                    panel[repl["slot"]] = repl["new"]
                for doc in panel:
                    last_seen[doc] = iteration

    def test_switcher_follows_new_target(self, knowledge_map):
        agent = AgentSpec(
            behavior="topic_switcher", cluster_a=1, cluster_b=8, switch_at_iteration=25, seed=2
        )
        metrics, _ = run_session(agent, config(2), knowledge_map, 60)
        assert metrics.clicks_made > 0
        assert metrics.history_violations == 0
        assert metrics.target_docs_in_final_set >= 3  # counted against cluster 8 after the switch

    def test_multi_interest_reaches_union_quorum(self, knowledge_map):
        agent = AgentSpec(behavior="multi_interest", clusters=(4, 5), seed=6)
        metrics, _ = run_session(agent, config(6), knowledge_map, 80)
        assert metrics.iterations_to_target < 80

    def test_random_clicker_clicks_every_iteration(self, knowledge_map):
        metrics, _ = run_session(
            AgentSpec(behavior="random_clicker", seed=3), config(3), knowledge_map, 30
        )
        assert metrics.clicks_made == 31  # one on the initial panel, one per renewal

    def test_mutation_fraction_tracked(self, knowledge_map):
        agent = AgentSpec(behavior="topic_seeker", target_cluster=1, seed=7)
        metrics, _ = run_session(agent, config(7), knowledge_map, 300)
        assert metrics.mutation_draws > 500
        assert 0.2 <= metrics.mutation_fraction_observed <= 0.4

    def test_favorites_and_dormancy_exercised(self, knowledge_map):
        agent = AgentSpec(
            behavior="topic_seeker",
            target_cluster=2,
            favorite_every=5,
            idle_spans=((20, 40),),  # 40 idle renewals = 400 virtual seconds
            seed=8,
        )
        metrics, trace = run_session(agent, config(8), knowledge_map, 70)
        events = {e["event"] for e in trace}
        assert "favorite_add" in events
        assert "dormant_onset" in events
        onsets = [e for e in trace if e["event"] == "dormant_onset"]
        assert len(onsets) == 1

    def test_early_stop(self, knowledge_map):
        agent = AgentSpec(behavior="topic_seeker", target_cluster=2, seed=1)
        metrics, _ = run_session(
            agent, config(1), knowledge_map, 200, stop_when_target_reached=True
        )
        assert metrics.iterations_run == metrics.iterations_to_target < 200


class TestBenchmark:
    def test_zero_runs_gives_empty_report(self, knowledge_map):
        report = convergence_benchmark(knowledge_map, config(), n_runs=0)
        assert report == {"n_runs": 0, "arms": {}}

    def test_adaptive_beats_random_smoke(self, knowledge_map):
        report = convergence_benchmark(
            knowledge_map, config(), n_runs=8, max_iterations=60, seed=5
        )
        adaptive = report["arms"]["adaptive"]["median_iterations_to_target"]
        random_arm = report["arms"]["random"]["median_iterations_to_target"]
        assert adaptive < random_arm

    def test_single_cluster_map_shows_no_advantage(self, synthetic_corpus, stop_words):
        docs, _ = synthetic_corpus
        kmap = build_knowledge_map(docs, stop_words, cluster_count=1, seed=1)
        report = convergence_benchmark(kmap, config(), n_runs=6, max_iterations=30, seed=2)
        adaptive = report["arms"]["adaptive"]["median_iterations_to_target"]
        random_arm = report["arms"]["random"]["median_iterations_to_target"]
        assert adaptive == random_arm == 0  # every document already matches


class TestCorrelationStudy:
    def test_full_space_self_correlates(self, synthetic_corpus, stop_words):
        docs, _ = synthetic_corpus
        result = correlation_study(docs, stop_words, dims=[2])
        full = next(r for r in result["rows"] if r["space"] == "tfidf_full")
        assert full["spearman"] == pytest.approx(1.0, abs=1e-12)

    def test_intrinsic_beats_2d_on_fixture(self, synthetic_corpus, stop_words):
        docs, _ = synthetic_corpus
        result = correlation_study(docs, stop_words, dims=[2])
        by_dim = {r["dimensionality"]: r["spearman"] for r in result["rows"] if r["space"].startswith("pca")}
        intrinsic = result["intrinsic_dimensionality"]
        assert by_dim[2] < by_dim[intrinsic]

    def test_trend_is_monotone_on_average_over_seeds(self, stop_words):
        gains_2_3 = []
        gains_3_i = []
        for seed in range(41, 46):
            docs, _ = synthetic_topic_corpus(SyntheticCorpusConfig(seed=seed))
            result = correlation_study(docs, stop_words, dims=[2, 3])
            by_dim = {
                r["dimensionality"]: r["spearman"]
                for r in result["rows"]
                if r["space"].startswith("pca")
            }
            intrinsic = result["intrinsic_dimensionality"]
            gains_2_3.append(by_dim[3] - by_dim[2])
            gains_3_i.append(by_dim[intrinsic] - by_dim[3])
        assert np.mean(gains_2_3) >= 0
        assert np.mean(gains_3_i) >= 0


class TestWriters:
    def test_trace_jsonl(self, knowledge_map, tmp_path):
        _, trace = run_session(AgentSpec(behavior="idle"), config(), knowledge_map, 5)
        path = tmp_path / "trace.jsonl"
        write_trace_jsonl(trace, path)
        lines = path.read_text().splitlines()
        assert len(lines) == len(trace)
        assert json.loads(lines[0])["event"] == "init"

    def test_benchmark_csv(self, knowledge_map, tmp_path):
        report = convergence_benchmark(knowledge_map, config(), n_runs=2, max_iterations=20)
        path = tmp_path / "bench.csv"
        write_benchmark_csv(report, path)
        rows = path.read_text().splitlines()
        assert rows[0] == "arm,run,iterations_to_target"
        assert len(rows) == 1 + 4  # two arms x two runs

    def test_correlation_outputs(self, synthetic_corpus, stop_words, tmp_path):
        docs, _ = synthetic_corpus
        result = correlation_study(docs, stop_words, dims=[2])
        write_correlation_csv(result, tmp_path / "corr.csv")
        write_correlation_chart(result, tmp_path / "chart.json")
        chart = json.loads((tmp_path / "chart.json").read_text())
        assert chart["tfidf_full"] == pytest.approx(1.0)
        assert chart["pca"]["dimensionality"]
