"""Durable user state: SQLite-backed, write-through, crash-safe.

Profiles, favorites, favorites history and stored social interest points
are persisted on every mutation inside one transaction, so a killed
process loses nothing that was acknowledged. Panels are deliberately not
stored: they are rebuilt per visit from the stored interest point.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from pathlib import Path

import numpy as np

from evonav.social import SocialInterestPoint
from evonav.users import FavoriteEntry, FavoritesHistoryRecord, UserProfile

SCHEMA_VERSION = 1

_SCHEMA = """
CREATE TABLE IF NOT EXISTS users (
    user_id        TEXT PRIMARY KEY,
    created_at     REAL NOT NULL,
    last_action_at REAL NOT NULL,
    dormant        INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS favorites (
    user_id    TEXT NOT NULL,
    doc_id     TEXT NOT NULL,
    time_alive REAL NOT NULL,
    added_at   REAL NOT NULL,
    updated_at REAL NOT NULL,
    PRIMARY KEY (user_id, doc_id)
);
CREATE TABLE IF NOT EXISTS favorites_history (
    user_id    TEXT NOT NULL,
    doc_id     TEXT NOT NULL,
    time_alive REAL NOT NULL,
    timestamp  REAL NOT NULL,
    PRIMARY KEY (user_id, doc_id)
);
CREATE TABLE IF NOT EXISTS social_points (
    user_id     TEXT PRIMARY KEY,
    coord       TEXT NOT NULL,
    source      TEXT NOT NULL,
    computed_at REAL NOT NULL
);
"""


class ProfileStore:
    def __init__(self, path: str | Path):
        self.path = str(path)
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._lock = threading.Lock()
        with self._lock, self._conn:
            version = self._conn.execute("PRAGMA user_version").fetchone()[0]
            if version == 0:
                self._conn.executescript(_SCHEMA)
                self._conn.execute(f"PRAGMA user_version = {SCHEMA_VERSION}")
            elif version != SCHEMA_VERSION:
                raise ValueError(f"store schema version {version} not supported")

    def close(self) -> None:
        self._conn.close()

    def save_profile(self, profile: UserProfile) -> None:
        """Write the whole profile in one transaction (rows are few per user)."""
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT OR REPLACE INTO users (user_id, created_at, last_action_at, dormant)"
                " VALUES (?, ?, ?, ?)",
                (profile.user_id, profile.created_at, profile.last_action_at, int(profile.dormant)),
            )
            self._conn.execute("DELETE FROM favorites WHERE user_id = ?", (profile.user_id,))
            self._conn.executemany(
                "INSERT INTO favorites (user_id, doc_id, time_alive, added_at, updated_at)"
                " VALUES (?, ?, ?, ?, ?)",
                [
                    (profile.user_id, e.doc_id, e.time_alive, e.added_at, e.updated_at)
                    for e in profile.favorites.values()
                ],
            )
            self._conn.execute(
                "DELETE FROM favorites_history WHERE user_id = ?", (profile.user_id,)
            )
            self._conn.executemany(
                "INSERT INTO favorites_history (user_id, doc_id, time_alive, timestamp)"
                " VALUES (?, ?, ?, ?)",
                [
                    (profile.user_id, r.doc_id, r.time_alive, r.timestamp)
                    for r in profile.history.values()
                ],
            )
            if profile.social_point is None:
                self._conn.execute(
                    "DELETE FROM social_points WHERE user_id = ?", (profile.user_id,)
                )
            else:
                point = profile.social_point
                self._conn.execute(
                    "INSERT OR REPLACE INTO social_points (user_id, coord, source, computed_at)"
                    " VALUES (?, ?, ?, ?)",
                    (
                        profile.user_id,
                        json.dumps([float(x) for x in point.coord]),
                        point.source,
                        point.computed_at,
                    ),
                )

    def load_profile(self, user_id: str) -> UserProfile | None:
        with self._lock:
            row = self._conn.execute(
                "SELECT user_id, created_at, last_action_at, dormant FROM users WHERE user_id = ?",
                (user_id,),
            ).fetchone()
            if row is None:
                return None
            return self._assemble(row)

    def load_all_profiles(self) -> dict[str, UserProfile]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT user_id, created_at, last_action_at, dormant FROM users ORDER BY user_id"
            ).fetchall()
            return {row[0]: self._assemble(row) for row in rows}

    def _assemble(self, row) -> UserProfile:
        user_id, created_at, last_action_at, dormant = row
        profile = UserProfile(
            user_id=user_id,
            created_at=created_at,
            last_action_at=last_action_at,
            dormant=bool(dormant),
        )
        for doc_id, time_alive, added_at, updated_at in self._conn.execute(
            "SELECT doc_id, time_alive, added_at, updated_at FROM favorites"
            " WHERE user_id = ? ORDER BY added_at, doc_id",
            (user_id,),
        ):
            profile.favorites[doc_id] = FavoriteEntry(
                doc_id=doc_id, added_at=added_at, updated_at=updated_at, time_alive=time_alive
            )
        for doc_id, time_alive, timestamp in self._conn.execute(
            "SELECT doc_id, time_alive, timestamp FROM favorites_history"
            " WHERE user_id = ? ORDER BY doc_id",
            (user_id,),
        ):
            profile.history[doc_id] = FavoritesHistoryRecord(
                doc_id=doc_id, time_alive=time_alive, timestamp=timestamp
            )
        point = self._conn.execute(
            "SELECT coord, source, computed_at FROM social_points WHERE user_id = ?",
            (user_id,),
        ).fetchone()
        if point is not None:
            profile.social_point = SocialInterestPoint(
                user_id=user_id,
                coord=np.array(json.loads(point[0]), dtype=float),
                source=point[1],
                computed_at=point[2],
            )
        return profile

    def dump_state(self) -> dict:
        """Canonical snapshot of every table, for golden comparisons."""
        with self._lock:
            return {
                "users": self._conn.execute(
                    "SELECT user_id, created_at, last_action_at, dormant FROM users"
                    " ORDER BY user_id"
                ).fetchall(),
                "favorites": self._conn.execute(
                    "SELECT user_id, doc_id, time_alive, added_at, updated_at FROM favorites"
                    " ORDER BY user_id, doc_id"
                ).fetchall(),
                "favorites_history": self._conn.execute(
                    "SELECT user_id, doc_id, time_alive, timestamp FROM favorites_history"
                    " ORDER BY user_id, doc_id"
                ).fetchall(),
                "social_points": self._conn.execute(
                    "SELECT user_id, coord, source, computed_at FROM social_points"
                    " ORDER BY user_id"
                ).fetchall(),
            }

    def export_history_jsonl(self, path: str | Path) -> int:
        """favorites_history as JSON lines; returns the row count."""
        with self._lock:
            rows = self._conn.execute(
                "SELECT user_id, doc_id, time_alive, timestamp FROM favorites_history"
                " ORDER BY user_id, doc_id"
            ).fetchall()
        with open(path, "w", encoding="utf-8") as fh:
            for user_id, doc_id, time_alive, timestamp in rows:
                fh.write(
                    json.dumps(
                        {
                            "user_id": user_id,
                            "doc_id": doc_id,
                            "time_alive": time_alive,
                            "timestamp": timestamp,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
        return len(rows)
