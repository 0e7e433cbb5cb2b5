"""Cross-user suggestions from favorites and favorites history.

Each user gets a social interest point: the mean coordinate of their live
favorites, or, when the favorites list is empty, a weighted mean over
their history where each record counts for (normalized holding time) x
(recency). Suggestion scoring walks every other user who ever favorited a
candidate document and sums those per-record weights scaled by how close
that user's interest point is to the querying user's.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from evonav.errors import NoSignal
from evonav.mapping import KnowledgeMap
from evonav.users import FavoritesHistoryRecord, UserProfile

LIVE_FAVORITES = "live_favorites"
HISTORY = "history"


@dataclass
class SocialInterestPoint:
    user_id: str
    coord: np.ndarray
    source: str  # LIVE_FAVORITES or HISTORY
    computed_at: float


@dataclass
class Suggestion:
    doc_id: str
    loi: float  # level of interest for the querying user
    contributing_users: int


def time_alive_modifier(record: FavoritesHistoryRecord, history: dict[str, FavoritesHistoryRecord]) -> float:
    """Holding time normalized against the user's longest-held record (0..1)."""
    longest = max((r.time_alive for r in history.values()), default=0.0)
    if longest <= 0.0:
        return 0.0
    return record.time_alive / longest


def age_modifier(record: FavoritesHistoryRecord, history: dict[str, FavoritesHistoryRecord], now: float) -> float:
    """Recency weight: 1 for a record updated now, 0 for the user's oldest.

    A history without timestamp spread (a single record, or live favorites
    whose records all advance in lockstep) has no old/new ordering, so
    every record counts as newest.
    """
    timestamps = [r.timestamp for r in history.values()]
    oldest = min(timestamps, default=now)
    newest = max(timestamps, default=now)
    if newest <= oldest or now <= oldest:
        return 1.0
    return (record.timestamp - oldest) / (now - oldest)


def compute_social_interest_point(
    profile: UserProfile, kmap: KnowledgeMap, now: float
) -> SocialInterestPoint:
    """Where this user's confirmed interests sit on the map.

    Live favorites win outright; only a user with none falls back to the
    weighted history mean. Raises NoSignal when there is nothing usable.
    """
    if profile.favorites:
        coords = np.vstack([kmap.coord_of(d) for d in profile.favorites])
        return SocialInterestPoint(
            user_id=profile.user_id,
            coord=coords.mean(axis=0),
            source=LIVE_FAVORITES,
            computed_at=now,
        )
    if profile.history:
        weights = []
        coords = []
        for record in profile.history.values():
            w = time_alive_modifier(record, profile.history) * age_modifier(
                record, profile.history, now
            )
            weights.append(w)
            coords.append(kmap.coord_of(record.doc_id))
        total = sum(weights)
        if total > 0.0:
            coord = np.average(np.vstack(coords), axis=0, weights=np.array(weights))
            return SocialInterestPoint(
                user_id=profile.user_id, coord=coord, source=HISTORY, computed_at=now
            )
    raise NoSignal(f"user {profile.user_id} has no favorites signal")


def interest_distance(user_a: UserProfile, user_b: UserProfile) -> float:
    """Euclidean distance between two users' stored social interest points."""
    if user_a.social_point is None or user_b.social_point is None:
        raise NoSignal("both users need a stored social interest point")
    return float(np.linalg.norm(user_a.social_point.coord - user_b.social_point.coord))


def _proximity(distance: float) -> float:
    return 1.0 / (1.0 + distance)


def _loi(doc_id: str, current: UserProfile, all_users, now: float) -> tuple[float, int]:
    if current.social_point is None:
        return 0.0, 0
    total = 0.0
    contributors = 0
    for other in all_users:
        if other.user_id == current.user_id or other.social_point is None:
            continue
        record = other.history.get(doc_id)
        if record is None:
            continue
        contribution = (
            age_modifier(record, other.history, now)
            * time_alive_modifier(record, other.history)
            * _proximity(interest_distance(current, other))
        )
        total += contribution
        if contribution > 0.0:
            contributors += 1
    return total, contributors


def compute_loi(doc_id: str, current: UserProfile, all_users, now: float) -> float:
    """Level of interest of one document for the current user.

    Sums, over every other user whose favorites history contains the
    document, that record's normalized holding time x recency, scaled by
    1/(1 + distance between the two users' interest points). Users without
    a stored interest point contribute nothing; so does a current user
    without one.
    """
    return _loi(doc_id, current, all_users, now)[0]


def suggestions(
    current: UserProfile,
    k: int,
    all_users,
    now: float,
    exclude: set[str] = frozenset(),
) -> list[Suggestion]:
    """Top-k documents by level of interest.

    The querying user's live favorites and anything in `exclude`
    (typically the current panel) never appear; zero-scored documents are
    dropped. Ties order by doc id.
    """
    all_users = list(all_users)
    candidates: set[str] = set()
    for other in all_users:
        if other.user_id != current.user_id:
            candidates.update(other.history)
    candidates -= set(current.favorites)
    candidates -= set(exclude)
    scored = []
    for doc_id in candidates:
        loi, contributors = _loi(doc_id, current, all_users, now)
        if loi > 0.0:
            scored.append(Suggestion(doc_id=doc_id, loi=loi, contributing_users=contributors))
    scored.sort(key=lambda s: (-s.loi, s.doc_id))
    return scored[:k]
