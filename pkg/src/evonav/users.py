"""Per-user state: identity, favorites, favorites history, dormancy.

Favorites are exempt from ageing and replacement; instead each carries a
time_alive counter of how long it has been held while its owner was
active. A user who makes no action for dormant_count seconds goes
dormant: accrual stops and every favorite pays a one-time penalty of
dormant_count seconds (floored at zero), so idle browser tabs do not
inflate interest data. History records survive removal and accumulate
across add/remove episodes, one record per (user, document).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from evonav.errors import AlreadyFavorite, NotAFavorite, UnknownDocument

if TYPE_CHECKING:
    from evonav.social import SocialInterestPoint


@dataclass
class FavoriteEntry:
    doc_id: str
    added_at: float
    updated_at: float
    time_alive: float = 0.0


@dataclass
class FavoritesHistoryRecord:
    doc_id: str
    timestamp: float       # last update
    time_alive: float = 0.0  # accumulated across all episodes


@dataclass
class UserProfile:
    user_id: str
    created_at: float
    last_action_at: float
    dormant: bool = False
    favorites: dict[str, FavoriteEntry] = field(default_factory=dict)
    history: dict[str, FavoritesHistoryRecord] = field(default_factory=dict)
    social_point: "SocialInterestPoint | None" = None


@dataclass
class DormancyEvent:
    """Emitted by tick_favorites when a user crosses into dormancy."""

    penalties: dict[str, tuple[float, float]]  # doc -> (before, after)


def touch(profile: UserProfile, now: float) -> None:
    """Any user action: refresh the activity clock and leave dormant mode."""
    profile.last_action_at = now
    profile.dormant = False


def add_favorite(
    profile: UserProfile, doc_id: str, now: float, known_docs=None
) -> FavoriteEntry:
    if known_docs is not None and doc_id not in known_docs:
        raise UnknownDocument(doc_id)
    if doc_id in profile.favorites:
        raise AlreadyFavorite(doc_id)
    entry = FavoriteEntry(doc_id=doc_id, added_at=now, updated_at=now)
    profile.favorites[doc_id] = entry
    record = profile.history.get(doc_id)
    if record is None:
        profile.history[doc_id] = FavoritesHistoryRecord(doc_id=doc_id, timestamp=now)
    else:
        # re-add: the history keeps its accumulated time, live entry restarts
        record.timestamp = now
    touch(profile, now)
    return entry


def remove_favorite(profile: UserProfile, doc_id: str, now: float) -> None:
    if doc_id not in profile.favorites:
        raise NotAFavorite(doc_id)
    del profile.favorites[doc_id]
    record = profile.history[doc_id]
    record.timestamp = now


def tick_favorites(
    profile: UserProfile, elapsed: float, now: float, dormant_count: float
) -> DormancyEvent | None:
    """Periodic accrual step.

    Active user: every favorite (and its history record) gains `elapsed`
    seconds. First tick past the inactivity threshold: dormant mode turns
    on and each favorite loses dormant_count seconds once, floored at 0;
    accrual then stays off until the next touch.
    """
    if profile.dormant:
        return None
    inactive = (now - profile.last_action_at) > dormant_count
    if inactive:
        profile.dormant = True
        penalties = {}
        for entry in profile.favorites.values():
            before = entry.time_alive
            applied = min(before, dormant_count)
            entry.time_alive = before - applied
            entry.updated_at = now
            record = profile.history[entry.doc_id]
            record.time_alive = max(0.0, record.time_alive - applied)
            penalties[entry.doc_id] = (before, entry.time_alive)
        return DormancyEvent(penalties=penalties)
    for entry in profile.favorites.values():
        entry.time_alive += elapsed
        entry.updated_at = now
        record = profile.history[entry.doc_id]
        record.time_alive += elapsed
        record.timestamp = now
    return None


def effective_favorites_fitness(profile: UserProfile, nav_set, favorites_fitness_const: int) -> int:
    """Weight of each favorite in interest calculations:
    max(favorites_fitness_const, 2 x the set's best fitness)."""
    max_fitness = nav_set.max_fitness() if nav_set is not None else 0
    return max(favorites_fitness_const, 2 * max_fitness)
