import sqlite3

import numpy as np
import pytest

from evonav.social import HISTORY, SocialInterestPoint
from evonav.store import ProfileStore
from evonav.users import FavoriteEntry, FavoritesHistoryRecord, UserProfile


def sample_profile():
    user = UserProfile(user_id="tok-1", created_at=10.0, last_action_at=55.0, dormant=True)
    user.favorites["d001"] = FavoriteEntry(doc_id="d001", added_at=12.0, updated_at=50.0, time_alive=38.0)
    user.history["d001"] = FavoritesHistoryRecord(doc_id="d001", timestamp=50.0, time_alive=38.0)
    user.history["d007"] = FavoritesHistoryRecord(doc_id="d007", timestamp=30.0, time_alive=5.5)
    user.social_point = SocialInterestPoint(
        user_id="tok-1", coord=np.array([1.5, -2.25]), source=HISTORY, computed_at=49.0
    )
    return user


class TestProfileStore:
    def test_roundtrip(self, tmp_path):
        store = ProfileStore(tmp_path / "s.db")
        store.save_profile(sample_profile())
        loaded = store.load_profile("tok-1")
        assert loaded.last_action_at == 55.0
        assert loaded.dormant is True
        assert loaded.favorites["d001"].time_alive == 38.0
        assert loaded.history["d007"].timestamp == 30.0
        assert np.array_equal(loaded.social_point.coord, [1.5, -2.25])
        assert loaded.social_point.source == HISTORY

    def test_missing_user(self, tmp_path):
        store = ProfileStore(tmp_path / "s.db")
        assert store.load_profile("nope") is None

    def test_save_is_upsert(self, tmp_path):
        store = ProfileStore(tmp_path / "s.db")
        user = sample_profile()
        store.save_profile(user)
        del user.favorites["d001"]
        user.dormant = False
        store.save_profile(user)
        loaded = store.load_profile("tok-1")
        assert loaded.favorites == {}
        assert loaded.dormant is False
        assert "d001" in loaded.history  # history survives removal

    def test_survives_reopen(self, tmp_path):
        path = tmp_path / "s.db"
        store = ProfileStore(path)
        store.save_profile(sample_profile())
        before = store.dump_state()
        store.close()
        reopened = ProfileStore(path)
        assert reopened.dump_state() == before

    def test_load_all(self, tmp_path):
        store = ProfileStore(tmp_path / "s.db")
        for uid in ("a", "b", "c"):
            store.save_profile(UserProfile(user_id=uid, created_at=1.0, last_action_at=1.0))
        assert sorted(store.load_all_profiles()) == ["a", "b", "c"]

    def test_export_history_jsonl(self, tmp_path):
        store = ProfileStore(tmp_path / "s.db")
        store.save_profile(sample_profile())
        out = tmp_path / "history.jsonl"
        assert store.export_history_jsonl(out) == 2
        lines = out.read_text().splitlines()
        assert len(lines) == 2
        assert '"doc_id": "d001"' in lines[0]

    def test_schema_version_guard(self, tmp_path):
        path = tmp_path / "s.db"
        conn = sqlite3.connect(path)
        conn.execute("PRAGMA user_version = 99")
        conn.commit()
        conn.close()
        with pytest.raises(ValueError, match="schema version"):
            ProfileStore(path)
