"""Cross-user suggestions.

Every user gets a social interest point from their favorites (or, once
the favorites list empties, from a recency- and holding-time-weighted
history mean). A document's level of interest for you sums other users'
normalized records, discounted by how far their interest point sits from
yours. Run: python demos/04_social_suggestions.py
"""

import numpy as np

from evonav.datasets import SyntheticCorpusConfig, synthetic_topic_corpus
from evonav.mapping import build_knowledge_map
from evonav.social import compute_loi, compute_social_interest_point, suggestions
from evonav.text import default_stop_words
from evonav.users import FavoritesHistoryRecord, UserProfile

docs, topic_of = synthetic_topic_corpus(SyntheticCorpusConfig(seed=20241))
kmap = build_knowledge_map(docs, default_stop_words(), cluster_count=10, seed=20241)
by_topic = {t: [d for d, tt in topic_of.items() if tt == t] for t in range(10)}

NOW = 1000.0
rng = np.random.default_rng(0)


def make_user(name, topic, n_records):
    """A user whose whole favorites history lives inside one topic."""
    user = UserProfile(user_id=name, created_at=0.0, last_action_at=NOW)
    for doc_id in by_topic[topic][:n_records]:
        user.history[doc_id] = FavoritesHistoryRecord(
            doc_id=doc_id,
            time_alive=float(rng.integers(50, 400)),
            timestamp=float(rng.integers(100, 1000)),
        )
    user.social_point = compute_social_interest_point(user, kmap, NOW)
    return user


# Three archivists with known tastes, plus the querying user.
alice = make_user("alice", topic=2, n_records=6)    # same interest as the querier
bob = make_user("bob", topic=2, n_records=4)        # same interest
carol = make_user("carol", topic=7, n_records=8)    # far away on the map
me = make_user("me", topic=2, n_records=2)

population = [me, alice, bob, carol]
print("interest point sources:", {u.user_id: u.social_point.source for u in population})

ranked = suggestions(me, 7, population, NOW)
print(f"\ntop suggestions for 'me' (topic 2 reader):")
for s in ranked:
    print(f"   {s.doc_id} [topic {topic_of[s.doc_id]}]  "
          f"loi={s.loi:.3f}  from {s.contributing_users} user(s)")

# Nearby users dominate: carol's topic-7 pages score far below.
carol_doc = by_topic[7][0]
print(f"\nloi of one of carol's pages for me: "
      f"{compute_loi(carol_doc, me, population, NOW):.4f}")
assert all(topic_of[s.doc_id] == 2 for s in ranked[:3])
