"""Evolutionary link set: the adaptive panel shown to one user.

The set holds a fixed number of links, each with an integer fitness.
Clicks raise fitness, ageing decays it, and every renewal the lowest
(zero) fitness slots are recombined: replaced either with a random
document from the slot's cluster or with the document nearest to the
user's current interest point, with a configurable mutation probability
deciding between the two. Positive-fitness links and favorites are never
replaced, and documents shown recently are kept out of the panel.

All randomness flows through an injected numpy Generator and all timing
through the caller, so identical seeds give identical runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from evonav.errors import (
    EmptyCluster,
    MapTooSmall,
    NoCandidates,
    NoInterestSignal,
    NotInSet,
)
from evonav.mapping import KnowledgeMap, most_relevant, random_from_cluster


@dataclass
class EngineConfig:
    """Evolution constants. Defaults follow the experimentally tuned values."""

    set_size: int = 10
    links_replace: int = 3
    fitness_click_modifier: int | None = None  # None -> set_size
    ageing_interval: float = 1.0
    refresh_interval: float = 10.0
    mutation_probability: float = 0.3
    history_recent_iterations: int = 20
    favorites_fitness_const: int = 50
    dormant_count: float = 300.0
    rng_seed: int = 0

    def __post_init__(self):
        if not 7 <= self.set_size <= 10:
            raise ValueError("set_size must be in [7, 10]")
        if self.fitness_click_modifier is None:
            self.fitness_click_modifier = self.set_size
        if self.links_replace < 1 or self.links_replace > self.set_size / 2:
            raise ValueError("links_replace must stay well below set_size (at most half)")
        if self.ageing_interval <= 0 or self.refresh_interval <= 0:
            raise ValueError("intervals must be positive")
        if self.ageing_interval > self.refresh_interval:
            raise ValueError("ageing_interval cannot exceed refresh_interval")
        if not 0.0 <= self.mutation_probability <= 1.0:
            raise ValueError("mutation_probability must be in [0, 1]")


@dataclass
class SetEntry:
    doc_id: str
    fitness: int = 0
    entered_at_iteration: int = 0
    cluster_id: int = 1  # slot binding used by the random branch


@dataclass
class NavSet:
    entries: list[SetEntry]
    iteration_counter: int = 0
    paused: bool = False

    def doc_ids(self) -> list[str]:
        return [e.doc_id for e in self.entries]

    def entry(self, doc_id: str) -> SetEntry | None:
        for e in self.entries:
            if e.doc_id == doc_id:
                return e
        return None

    def max_fitness(self) -> int:
        return max((e.fitness for e in self.entries), default=0)


class DisplayHistory:
    """Per-user record of when each document was last on the panel."""

    def __init__(self):
        self.last_shown: dict[str, int] = {}

    def record(self, doc_id: str, iteration: int) -> None:
        self.last_shown[doc_id] = iteration

    def record_all(self, doc_ids, iteration: int) -> None:
        for doc_id in doc_ids:
            self.last_shown[doc_id] = iteration

    def recent_docs(self, iteration: int, window: int) -> set[str]:
        return {
            doc for doc, last in self.last_shown.items() if iteration - last <= window
        }


def is_recently_shown(history: DisplayHistory, doc_id: str, iteration: int, window: int) -> bool:
    """True iff the document was on the panel within the last `window` iterations."""
    last = history.last_shown.get(doc_id)
    return last is not None and iteration - last <= window


@dataclass
class Replacement:
    slot: int
    old_doc: str
    new_doc: str
    mode: str  # "baseline" | "mutation" | "relevance"
    draw: float | None = None  # the uniform draw behind a mutation decision


@dataclass
class RenewalReport:
    iteration: int
    replaced: list[Replacement] = field(default_factory=list)
    interest_point: np.ndarray | None = None
    favorites_weight: float | None = None
    max_set_fitness_before: int = 0
    skipped: bool = False


def _slot_cluster(slot: int, kmap: KnowledgeMap) -> int:
    # slot N draws from cluster N; wraps when the map has fewer clusters
    return (slot % kmap.cluster_count) + 1


def init_set(
    kmap: KnowledgeMap,
    config: EngineConfig,
    rng: np.random.Generator,
    history: DisplayHistory | None = None,
    iteration: int = 0,
) -> NavSet:
    """Fresh panel: one random document from each slot's cluster, all fitness 0."""
    if kmap.size < config.set_size:
        raise MapTooSmall(f"map holds {kmap.size} documents, need {config.set_size}")
    entries: list[SetEntry] = []
    chosen: set[str] = set()
    for slot in range(config.set_size):
        cluster = _slot_cluster(slot, kmap)
        doc = _draw_from_cluster(cluster, kmap, rng, chosen)
        chosen.add(doc)
        entries.append(
            SetEntry(doc_id=doc, fitness=0, entered_at_iteration=iteration, cluster_id=cluster)
        )
    nav_set = NavSet(entries=entries, iteration_counter=iteration)
    if history is not None:
        history.record_all(nav_set.doc_ids(), iteration)
    return nav_set


def reset_set(
    nav_set: NavSet,
    kmap: KnowledgeMap,
    config: EngineConfig,
    rng: np.random.Generator,
    history: DisplayHistory | None = None,
) -> NavSet:
    """User-driven reset: refill with random zero-fitness links.

    Same drawing contract as init_set; the iteration counter and pause
    flag carry over so display-history bookkeeping stays monotone.
    Favorites are untouched (they live on the profile, not the set).
    """
    fresh = init_set(kmap, config, rng, history=history, iteration=nav_set.iteration_counter)
    nav_set.entries = fresh.entries
    if history is not None:
        history.record_all(nav_set.doc_ids(), nav_set.iteration_counter)
    return nav_set


def register_click(
    nav_set: NavSet, doc_id: str, config: EngineConfig, history: DisplayHistory | None = None
) -> tuple[int, int]:
    """Raise the clicked link's fitness; returns (before, after)."""
    entry = nav_set.entry(doc_id)
    if entry is None:
        raise NotInSet(doc_id)
    before = entry.fitness
    entry.fitness += config.fitness_click_modifier
    if history is not None:
        history.record(doc_id, nav_set.iteration_counter)
    return before, entry.fitness


def age_set(nav_set: NavSet) -> list[tuple[str, int, int]]:
    """One ageing step: every positive fitness drops by 1 (floor at 0).

    Returns (doc_id, before, after) for each entry that changed.
    """
    changed = []
    for entry in nav_set.entries:
        if entry.fitness > 0:
            entry.fitness -= 1
            changed.append((entry.doc_id, entry.fitness + 1, entry.fitness))
    return changed


def compute_interest_point(
    nav_set: NavSet,
    kmap: KnowledgeMap,
    favorites: list[tuple[str, float]] = (),
) -> np.ndarray:
    """Fitness-weighted centroid of positive links plus weighted favorites.

    This is the query point for relevance-based replacement: it sits inside
    the convex hull of the contributing coordinates and moves toward links
    the user has rated up. Favorites enter with the effective favorites
    weight supplied by the caller.
    """
    weights = []
    coords = []
    for entry in nav_set.entries:
        if entry.fitness > 0:
            weights.append(float(entry.fitness))
            coords.append(kmap.coord_of(entry.doc_id))
    for doc_id, weight in favorites:
        if weight > 0:
            weights.append(float(weight))
            coords.append(kmap.coord_of(doc_id))
    if not weights:
        raise NoInterestSignal("no positive-fitness links and no favorites")
    weights_arr = np.array(weights)
    return np.average(np.vstack(coords), axis=0, weights=weights_arr)


def _draw_from_cluster(
    cluster_id: int, kmap: KnowledgeMap, rng: np.random.Generator, excluded: set[str]
) -> str:
    try:
        return random_from_cluster(cluster_id, kmap, rng, excluded)
    except EmptyCluster:
        pass
    # cluster exhausted: corpus-wide uniform over whatever is still eligible
    candidates = [d for d in kmap.doc_ids if d not in excluded]
    if candidates:
        return candidates[rng.integers(len(candidates))]
    raise EmptyCluster("no eligible documents anywhere in the map")


def _pick_random(
    cluster_id: int,
    kmap: KnowledgeMap,
    rng: np.random.Generator,
    excluded: set[str],
    hard_excluded: set[str],
) -> str:
    try:
        return _draw_from_cluster(cluster_id, kmap, rng, excluded)
    except EmptyCluster:
        # relax the recency/favorites exclusions, never set distinctness
        candidates = [d for d in kmap.doc_ids if d not in hard_excluded]
        if not candidates:
            raise
        return candidates[rng.integers(len(candidates))]


def _pick_relevant(
    point: np.ndarray, kmap: KnowledgeMap, excluded: set[str], hard_excluded: set[str]
) -> str:
    try:
        return most_relevant(point, kmap, excluded)
    except NoCandidates:
        return most_relevant(point, kmap, hard_excluded)


def renewal_tick(
    nav_set: NavSet,
    kmap: KnowledgeMap,
    config: EngineConfig,
    rng: np.random.Generator,
    history: DisplayHistory,
    favorites: list[str] = (),
    favorites_weight: float = 0.0,
    force_random: bool = False,
) -> RenewalReport:
    """One recombination round (the periodic set renewal).

    Replaces up to links_replace zero-fitness entries, oldest first. With
    no interest signal every replacement is a random draw from the slot's
    cluster; otherwise each slot mutates to a random draw with probability
    mutation_probability and is filled with the document nearest to the
    interest point the rest of the time. Arrivals avoid current members,
    favorites and anything shown within the recency window. force_random
    pins every slot to the random branch (the non-adaptive baseline).
    """
    if nav_set.paused:
        return RenewalReport(iteration=nav_set.iteration_counter, skipped=True)

    iteration = nav_set.iteration_counter + 1
    max_fitness_before = nav_set.max_fitness()
    favorites = list(favorites)
    favorite_set = set(favorites)

    replace_candidates = sorted(
        (e for e in nav_set.entries if e.fitness == 0 and e.doc_id not in favorite_set),
        key=lambda e: (e.entered_at_iteration, e.doc_id),
    )[: config.links_replace]

    interest_point = None
    weight = None
    has_signal = max_fitness_before > 0 or bool(favorites)
    if has_signal and not force_random:
        weight = favorites_weight
        interest_point = compute_interest_point(
            nav_set, kmap, [(doc, favorites_weight) for doc in favorites]
        )

    recent = history.recent_docs(iteration, config.history_recent_iterations)
    report = RenewalReport(
        iteration=iteration,
        interest_point=interest_point,
        favorites_weight=weight,
        max_set_fitness_before=max_fitness_before,
    )

    for entry in replace_candidates:
        slot = nav_set.entries.index(entry)
        live = set(nav_set.doc_ids())
        # every live member is within the recency window, so `excluded`
        # covers them; the hard floor only protects panel distinctness
        hard_excluded = live - {entry.doc_id}
        excluded = hard_excluded | {entry.doc_id} | favorite_set | recent
        if interest_point is None:
            new_doc = _pick_random(entry.cluster_id, kmap, rng, excluded, hard_excluded)
            mode, draw, new_cluster = "baseline", None, entry.cluster_id
        else:
            draw = float(rng.random())
            if draw < config.mutation_probability:
                new_doc = _pick_random(entry.cluster_id, kmap, rng, excluded, hard_excluded)
                mode, new_cluster = "mutation", entry.cluster_id
            else:
                new_doc = _pick_relevant(interest_point, kmap, excluded, hard_excluded)
                mode, new_cluster = "relevance", kmap.cluster_of(new_doc)
        report.replaced.append(
            Replacement(slot=slot, old_doc=entry.doc_id, new_doc=new_doc, mode=mode, draw=draw if mode != "baseline" else None)
        )
        nav_set.entries[slot] = SetEntry(
            doc_id=new_doc, fitness=0, entered_at_iteration=iteration, cluster_id=new_cluster
        )

    nav_set.iteration_counter = iteration
    history.record_all(nav_set.doc_ids(), iteration)
    return report


def backfill_favorited_slot(
    nav_set: NavSet,
    doc_id: str,
    kmap: KnowledgeMap,
    config: EngineConfig,
    rng: np.random.Generator,
    history: DisplayHistory,
    favorites: list[str],
    favorites_weight: float,
) -> Replacement | None:
    """A just-favorited link leaves the panel; refill its slot in place.

    The favorite keeps steering evolution through its weight, but the
    panel must not duplicate the favorites section, so the slot gets a new
    document with the same selection rule a renewal would use.
    """
    entry = nav_set.entry(doc_id)
    if entry is None:
        return None
    slot = nav_set.entries.index(entry)
    iteration = nav_set.iteration_counter
    favorite_set = set(favorites)
    recent = history.recent_docs(iteration, config.history_recent_iterations)
    current = set(nav_set.doc_ids())
    hard_excluded = current - {doc_id}
    excluded = hard_excluded | favorite_set | recent

    interest_point = None
    try:
        interest_point = compute_interest_point(
            nav_set, kmap, [(d, favorites_weight) for d in favorites]
        )
    except NoInterestSignal:
        pass

    if interest_point is None:
        new_doc = _pick_random(entry.cluster_id, kmap, rng, excluded, hard_excluded)
        mode, draw, new_cluster = "baseline", None, entry.cluster_id
    else:
        draw = float(rng.random())
        if draw < config.mutation_probability:
            new_doc = _pick_random(entry.cluster_id, kmap, rng, excluded, hard_excluded)
            mode, new_cluster = "mutation", entry.cluster_id
        else:
            new_doc = _pick_relevant(interest_point, kmap, excluded, hard_excluded)
            mode, new_cluster = "relevance", kmap.cluster_of(new_doc)
    nav_set.entries[slot] = SetEntry(
        doc_id=new_doc, fitness=0, entered_at_iteration=iteration, cluster_id=new_cluster
    )
    history.record(new_doc, iteration)
    return Replacement(slot=slot, old_doc=doc_id, new_doc=new_doc, mode=mode, draw=draw if mode != "baseline" else None)


def warm_start_set(
    kmap: KnowledgeMap,
    config: EngineConfig,
    interest_point: np.ndarray,
    favorites: list[str] = (),
) -> NavSet:
    """Rebuild a panel for a returning user from their stored interest point.

    Fills every slot with the nearest non-excluded documents; fitness
    starts at 0 and normal evolution (including mutation) resumes from the
    first renewal.
    """
    if kmap.size < config.set_size:
        raise MapTooSmall(f"map holds {kmap.size} documents, need {config.set_size}")
    entries = []
    excluded = set(favorites)
    for _ in range(config.set_size):
        doc = most_relevant(interest_point, kmap, excluded)
        excluded.add(doc)
        entries.append(
            SetEntry(doc_id=doc, fitness=0, entered_at_iteration=0, cluster_id=kmap.cluster_of(doc))
        )
    return NavSet(entries=entries)
