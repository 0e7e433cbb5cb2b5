import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from evonav import engine
from evonav.engine import (
    DisplayHistory,
    EngineConfig,
    NavSet,
    SetEntry,
    age_set,
    compute_interest_point,
    init_set,
    is_recently_shown,
    register_click,
    renewal_tick,
    reset_set,
)
from evonav.errors import MapTooSmall, NoInterestSignal, NotInSet

from conftest import toy_map


def grid_map(docs_per_cluster=10, clusters=10, spacing=100.0):
    """Clusters laid out far apart on a line; members jittered deterministically."""
    rng = np.random.default_rng(424242)
    coords, labels, ids = [], [], []
    i = 0
    for c in range(1, clusters + 1):
        center = np.array([c * spacing, 0.0])
        for _ in range(docs_per_cluster):
            coords.append(center + rng.normal(scale=1.0, size=2))
            labels.append(c)
            ids.append(f"d{i:03d}")
            i += 1
    return toy_map(np.array(coords), clusters=labels, doc_ids=ids)


def default_config(**overrides):
    return EngineConfig(rng_seed=1, **overrides)


class TestConfig:
    def test_click_modifier_defaults_to_set_size(self):
        assert EngineConfig(set_size=8).fitness_click_modifier == 8

    def test_set_size_bounds(self):
        with pytest.raises(ValueError):
            EngineConfig(set_size=6)
        with pytest.raises(ValueError):
            EngineConfig(set_size=11)

    def test_links_replace_capped(self):
        with pytest.raises(ValueError):
            EngineConfig(set_size=8, links_replace=5)

    def test_ageing_cannot_exceed_refresh(self):
        with pytest.raises(ValueError):
            EngineConfig(ageing_interval=20.0, refresh_interval=10.0)


class TestInitSet:
    def test_one_doc_per_cluster_map(self):
        kmap = grid_map(docs_per_cluster=1)
        nav = init_set(kmap, default_config(), np.random.default_rng(0))
        assert sorted(nav.doc_ids()) == sorted(kmap.doc_ids)

    def test_all_fitness_zero(self):
        nav = init_set(grid_map(), default_config(), np.random.default_rng(0))
        assert all(e.fitness == 0 for e in nav.entries)

    def test_slot_n_draws_from_cluster_n(self):
        kmap = grid_map()
        nav = init_set(kmap, default_config(), np.random.default_rng(5))
        for slot, entry in enumerate(nav.entries):
            assert entry.cluster_id == slot + 1
            assert kmap.cluster_of(entry.doc_id) == slot + 1

    def test_map_too_small(self):
        kmap = grid_map(docs_per_cluster=1, clusters=9)
        with pytest.raises(MapTooSmall):
            init_set(kmap, default_config(), np.random.default_rng(0))

    def test_records_displays(self):
        history = DisplayHistory()
        nav = init_set(grid_map(), default_config(), np.random.default_rng(0), history)
        for doc in nav.doc_ids():
            assert history.last_shown[doc] == 0


class TestClick:
    def test_click_adds_set_size(self):
        nav = init_set(grid_map(), default_config(), np.random.default_rng(0))
        doc = nav.entries[0].doc_id
        assert register_click(nav, doc, default_config()) == (0, 10)

    def test_two_clicks_accumulate(self):
        config = default_config()
        nav = init_set(grid_map(), config, np.random.default_rng(0))
        doc = nav.entries[0].doc_id
        register_click(nav, doc, config)
        register_click(nav, doc, config)
        assert nav.entry(doc).fitness == 20

    def test_click_outside_set(self):
        nav = init_set(grid_map(), default_config(), np.random.default_rng(0))
        with pytest.raises(NotInSet):
            register_click(nav, "not-a-member", default_config())


class TestAgeing:
    def _set_with_fitness(self, values):
        return NavSet(entries=[SetEntry(doc_id=f"x{i}", fitness=f) for i, f in enumerate(values)])

    def test_positive_decrement_zero_unchanged(self):
        nav = self._set_with_fitness([10, 0, 3])
        age_set(nav)
        assert [e.fitness for e in nav.entries] == [9, 0, 2]

    def test_floor_at_zero(self):
        nav = self._set_with_fitness([1])
        age_set(nav)
        age_set(nav)
        assert nav.entries[0].fitness == 0

    def test_reaches_zero_after_exactly_fitness_steps(self):
        nav = self._set_with_fitness([10])
        for step in range(10):
            assert nav.entries[0].fitness == 10 - step
            age_set(nav)
        assert nav.entries[0].fitness == 0

    @given(st.lists(st.integers(min_value=0, max_value=60), min_size=1, max_size=10))
    def test_never_negative(self, values):
        nav = self._set_with_fitness(values)
        for _ in range(70):
            age_set(nav)
        assert all(e.fitness == 0 for e in nav.entries)


class TestInterestPoint:
    def test_single_positive_link(self):
        kmap = toy_map([[2.0, 7.0], [9.0, 9.0]])
        nav = NavSet(entries=[SetEntry("doc0", fitness=5), SetEntry("doc1", fitness=0)])
        assert np.allclose(compute_interest_point(nav, kmap), [2.0, 7.0], atol=1e-12)

    def test_equal_fitness_midpoint(self):
        kmap = toy_map([[0.0, 0.0], [2.0, 0.0]])
        nav = NavSet(entries=[SetEntry("doc0", fitness=4), SetEntry("doc1", fitness=4)])
        assert np.allclose(compute_interest_point(nav, kmap), [1.0, 0.0], atol=1e-12)

    def test_weighted_mean(self):
        kmap = toy_map([[0.0, 0.0], [4.0, 0.0]])
        nav = NavSet(entries=[SetEntry("doc0", fitness=30), SetEntry("doc1", fitness=10)])
        assert np.allclose(compute_interest_point(nav, kmap), [1.0, 0.0], atol=1e-9)

    def test_favorites_alone_give_signal(self):
        kmap = toy_map([[1.0, 1.0], [5.0, 5.0]])
        nav = NavSet(entries=[SetEntry("doc0", fitness=0)])
        point = compute_interest_point(nav, kmap, favorites=[("doc1", 50.0)])
        assert np.allclose(point, [5.0, 5.0], atol=1e-12)

    def test_no_signal(self):
        kmap = toy_map([[0.0, 0.0]])
        nav = NavSet(entries=[SetEntry("doc0", fitness=0)])
        with pytest.raises(NoInterestSignal):
            compute_interest_point(nav, kmap)

    @given(st.integers(min_value=1, max_value=50))
    def test_scale_invariance(self, scale):
        kmap = toy_map([[0.0, 0.0], [4.0, 2.0], [1.0, 8.0]])
        base = NavSet(
            entries=[SetEntry("doc0", fitness=3), SetEntry("doc1", fitness=7), SetEntry("doc2", 0)]
        )
        scaled = NavSet(
            entries=[
                SetEntry("doc0", fitness=3 * scale),
                SetEntry("doc1", fitness=7 * scale),
                SetEntry("doc2", 0),
            ]
        )
        assert np.allclose(
            compute_interest_point(base, kmap), compute_interest_point(scaled, kmap), atol=1e-9
        )

    def test_inside_convex_hull(self):
        rng = np.random.default_rng(77)
        kmap = toy_map(rng.normal(size=(6, 3)))
        nav = NavSet(entries=[SetEntry(f"doc{i}", fitness=int(rng.integers(1, 9))) for i in range(6)])
        point = compute_interest_point(nav, kmap)
        assert (point >= kmap.coords.min(axis=0) - 1e-12).all()
        assert (point <= kmap.coords.max(axis=0) + 1e-12).all()


def started_session(kmap, config, seed=0):
    rng = np.random.default_rng(seed)
    history = DisplayHistory()
    nav = init_set(kmap, config, rng, history)
    return nav, history, rng


class TestRenewal:
    def test_zero_fitness_regime_replaces_exactly_links_replace(self):
        kmap = grid_map()
        config = default_config()
        nav, history, rng = started_session(kmap, config)
        before = nav.doc_ids()
        report = renewal_tick(nav, kmap, config, rng, history)
        assert len(report.replaced) == 3
        assert all(r.mode == "baseline" for r in report.replaced)
        assert sum(a != b for a, b in zip(before, nav.doc_ids())) == 3

    def test_random_replacement_stays_in_slot_cluster(self):
        kmap = grid_map()
        config = default_config()
        nav, history, rng = started_session(kmap, config)
        report = renewal_tick(nav, kmap, config, rng, history)
        for r in report.replaced:
            assert kmap.cluster_of(r.new_doc) == kmap.cluster_of(r.old_doc)

    def test_mutation_off_fills_with_nearest_to_interest_point(self):
        kmap = grid_map()
        config = default_config(mutation_probability=0.0)
        nav, history, rng = started_session(kmap, config)
        clicked = nav.entries[4].doc_id
        register_click(nav, clicked, config, history)
        report = renewal_tick(nav, kmap, config, rng, history)
        point = kmap.coord_of(clicked)
        assert np.allclose(report.interest_point, point, atol=1e-12)
        # oracle: brute-force nearest-k over eligible documents
        excluded = set(nav.doc_ids()) | {r.old_doc for r in report.replaced} | set(
            history.recent_docs(nav.iteration_counter, config.history_recent_iterations)
        )
        eligible = [
            (np.linalg.norm(kmap.coord_of(d) - point), d)
            for d in kmap.doc_ids
            if d not in excluded or d in {r.new_doc for r in report.replaced}
        ]
        expected = [d for _, d in sorted(eligible)[:3]]
        assert sorted(r.new_doc for r in report.replaced) == sorted(expected)
        assert all(r.mode == "relevance" for r in report.replaced)

    def test_positive_fitness_never_replaced(self):
        kmap = grid_map()
        config = default_config()
        nav, history, rng = started_session(kmap, config)
        clicked = nav.entries[2].doc_id
        register_click(nav, clicked, config, history)
        for _ in range(5):
            renewal_tick(nav, kmap, config, rng, history)
            assert clicked in nav.doc_ids()

    def test_only_zero_fitness_entries_replaced_when_few(self):
        kmap = grid_map()
        config = default_config()
        nav, history, rng = started_session(kmap, config)
        for entry in nav.entries[:8]:
            entry.fitness = 5
        report = renewal_tick(nav, kmap, config, rng, history)
        assert len(report.replaced) == 2

    def test_oldest_zero_entries_replaced_first(self):
        kmap = grid_map()
        config = default_config()
        nav, history, rng = started_session(kmap, config)
        for slot, entry in enumerate(nav.entries):
            entry.entered_at_iteration = 10 - slot  # slot 9 is oldest
        report = renewal_tick(nav, kmap, config, rng, history)
        assert sorted(r.slot for r in report.replaced) == [7, 8, 9]

    def test_paused_set_unchanged(self):
        kmap = grid_map()
        config = default_config()
        nav, history, rng = started_session(kmap, config)
        nav.paused = True
        before = [(e.doc_id, e.fitness) for e in nav.entries]
        report = renewal_tick(nav, kmap, config, rng, history)
        assert report.skipped
        assert [(e.doc_id, e.fitness) for e in nav.entries] == before
        assert nav.iteration_counter == 0

    def test_force_random_ignores_signal(self):
        kmap = grid_map()
        config = default_config()
        nav, history, rng = started_session(kmap, config)
        register_click(nav, nav.entries[0].doc_id, config, history)
        report = renewal_tick(nav, kmap, config, rng, history, force_random=True)
        assert all(r.mode == "baseline" for r in report.replaced)
        assert report.interest_point is None

    def test_set_size_constant_and_distinct(self):
        kmap = grid_map()
        config = default_config()
        nav, history, rng = started_session(kmap, config)
        for _ in range(60):
            renewal_tick(nav, kmap, config, rng, history)
            ids = nav.doc_ids()
            assert len(ids) == config.set_size
            assert len(set(ids)) == config.set_size

    def test_no_reappearance_within_window(self):
        kmap = grid_map()
        config = default_config()
        nav, history, rng = started_session(kmap, config)
        last_seen = {d: 0 for d in nav.doc_ids()}
        for _ in range(80):
            report = renewal_tick(nav, kmap, config, rng, history)
            for r in report.replaced:
                if r.new_doc in last_seen:
                    gap = report.iteration - last_seen[r.new_doc]
                    assert gap > config.history_recent_iterations
            for doc in nav.doc_ids():
                last_seen[doc] = report.iteration

    def test_deterministic_given_seed(self):
        kmap = grid_map()
        config = default_config(mutation_probability=0.0)
        runs = []
        for _ in range(2):
            nav, history, rng = started_session(kmap, config, seed=9)
            register_click(nav, nav.entries[1].doc_id, config, history)
            trace = []
            for _ in range(20):
                report = renewal_tick(nav, kmap, config, rng, history)
                trace.append([(r.slot, r.new_doc, r.mode) for r in report.replaced])
            runs.append(trace)
        assert runs[0] == runs[1]

    def test_mutation_rate_statistics(self):
        kmap = grid_map(docs_per_cluster=30)
        config = default_config()
        nav, history, rng = started_session(kmap, config, seed=3)
        draws = 0
        mutations = 0
        for i in range(700):
            register_click(nav, nav.entries[0].doc_id, config, history)
            report = renewal_tick(nav, kmap, config, rng, history)
            for r in report.replaced:
                if r.mode in ("mutation", "relevance"):
                    draws += 1
                    mutations += r.mode == "mutation"
        assert draws >= 2000
        assert abs(mutations / draws - 0.3) <= 0.02


class TestRecentlyShown:
    def _history(self, doc, iteration):
        history = DisplayHistory()
        history.record(doc, iteration)
        return history

    def test_inside_window(self):
        assert is_recently_shown(self._history("d", 100), "d", 115, 20)

    def test_just_outside_window(self):
        assert not is_recently_shown(self._history("d", 100), "d", 121, 20)

    def test_never_shown(self):
        assert not is_recently_shown(DisplayHistory(), "d", 5, 20)


class TestReset:
    def test_all_fitness_zero_after_reset(self):
        kmap = grid_map()
        config = default_config()
        nav, history, rng = started_session(kmap, config)
        register_click(nav, nav.entries[0].doc_id, config, history)
        reset_set(nav, kmap, config, rng, history)
        assert all(e.fitness == 0 for e in nav.entries)

    def test_rng_advances_between_resets(self):
        kmap = grid_map()
        config = default_config()
        nav, history, rng = started_session(kmap, config)
        reset_set(nav, kmap, config, rng, history)
        first = nav.doc_ids()
        reset_set(nav, kmap, config, rng, history)
        assert nav.doc_ids() != first

    def test_iteration_counter_preserved(self):
        kmap = grid_map()
        config = default_config()
        nav, history, rng = started_session(kmap, config)
        for _ in range(7):
            renewal_tick(nav, kmap, config, rng, history)
        reset_set(nav, kmap, config, rng, history)
        assert nav.iteration_counter == 7


class TestFavoriteBackfill:
    def test_favorited_doc_leaves_panel(self):
        kmap = grid_map()
        config = default_config()
        nav, history, rng = started_session(kmap, config)
        doc = nav.entries[3].doc_id
        replacement = engine.backfill_favorited_slot(
            nav, doc, kmap, config, rng, history, favorites=[doc], favorites_weight=50.0
        )
        assert doc not in nav.doc_ids()
        assert replacement.old_doc == doc
        assert len(set(nav.doc_ids())) == config.set_size

    def test_favorite_never_returns_via_renewal(self):
        kmap = grid_map()
        config = default_config()
        nav, history, rng = started_session(kmap, config)
        doc = nav.entries[3].doc_id
        engine.backfill_favorited_slot(
            nav, doc, kmap, config, rng, history, favorites=[doc], favorites_weight=50.0
        )
        for _ in range(60):
            renewal_tick(nav, kmap, config, rng, history, favorites=[doc], favorites_weight=50.0)
            assert doc not in nav.doc_ids()


class TestWarmStart:
    def test_fills_with_nearest_excluding_favorites(self):
        kmap = grid_map()
        config = default_config()
        point = kmap.coord_of("d000")
        favorites = ["d000"]
        nav = engine.warm_start_set(kmap, config, point, favorites=favorites)
        assert len(nav.doc_ids()) == config.set_size
        assert "d000" not in nav.doc_ids()
        ranked = sorted(
            (np.linalg.norm(kmap.coord_of(d) - point), d)
            for d in kmap.doc_ids
            if d != "d000"
        )
        assert sorted(nav.doc_ids()) == sorted(d for _, d in ranked[: config.set_size])


class TestReturnToRandomRegime:
    def test_idle_set_is_fully_random_after_max_fitness_intervals(self):
        """Without clicks, ageing drains the best link in max_fitness steps
        and every renewal after that is back on the random branch."""
        kmap = grid_map()
        config = default_config()
        nav, history, rng = started_session(kmap, config)
        register_click(nav, nav.entries[0].doc_id, config, history)
        register_click(nav, nav.entries[0].doc_id, config, history)
        max_fitness = nav.max_fitness()
        for _ in range(max_fitness):
            age_set(nav)
        assert nav.max_fitness() == 0
        report = renewal_tick(nav, kmap, config, rng, history)
        assert all(r.mode == "baseline" for r in report.replaced)
        assert report.interest_point is None
