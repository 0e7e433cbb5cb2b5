"""Favorites, the interest point, and dormant mode.

Favorites are exempt from ageing and replacement, weigh at least 50
(or twice the best panel fitness) in the interest centroid, and their
holding time only accrues while the user is active: going quiet for
dormant_count seconds stops the clock and costs a one-time penalty.
Run: python demos/03_favorites_and_dormancy.py
"""

import numpy as np

from evonav.clock import VirtualClock
from evonav.datasets import SyntheticCorpusConfig, synthetic_topic_corpus
from evonav.engine import EngineConfig, compute_interest_point
from evonav.mapping import build_knowledge_map
from evonav.session import SessionRuntime
from evonav.text import default_stop_words
from evonav.users import UserProfile, effective_favorites_fitness

docs, topic_of = synthetic_topic_corpus(SyntheticCorpusConfig(seed=20241))
kmap = build_knowledge_map(docs, default_stop_words(), cluster_count=10, seed=20241)

config = EngineConfig(rng_seed=3, dormant_count=30.0)  # short dormancy for the demo
clock = VirtualClock()
profile = UserProfile(user_id="demo", created_at=0.0, last_action_at=0.0)
session = SessionRuntime(profile, kmap, config, np.random.default_rng(3), clock)
session.start()


def advance(seconds):
    for _ in range(int(seconds)):
        clock.advance(1.0)
        session.tick()


# Favoriting a panel link moves it to the favorites section and backfills
# the slot; the panel stays at full size.
doc = session.nav_set.entries[0].doc_id
session.add_favorite(doc)
print(f"favorited {doc}; still in panel? {doc in session.nav_set.doc_ids()}")
print(f"panel size: {len(session.nav_set.doc_ids())}")

# The favorite now steers evolution with weight max(50, 2 x best fitness).
weight = effective_favorites_fitness(profile, session.nav_set, config.favorites_fitness_const)
point = compute_interest_point(session.nav_set, kmap, [(doc, weight)])
print(f"favorites weight: {weight}")
print(f"interest point == favorite's coordinate? "
      f"{bool(np.allclose(point, kmap.coord_of(doc)))}")

# Holding time accrues per second of activity...
for _ in range(20):
    advance(1)
    session.click(session.nav_set.entries[0].doc_id)  # stay active
print(f"\ntime_alive after 20 active seconds: {profile.favorites[doc].time_alive:.0f}")

# ... until the user goes quiet. Accrual keeps running through the silent
# run-up, but 30 seconds of silence triggers dormant mode: a one-time 30 s
# penalty claws that run-up back and the clock stops.
advance(29)
print(f"time_alive during the silent run-up: {profile.favorites[doc].time_alive:.0f}")
advance(16)
print(f"dormant after 45 quiet seconds? {profile.dormant}")
print(f"time_alive after the 30 s penalty: {profile.favorites[doc].time_alive:.0f}")

advance(60)
print(f"time_alive after another quiet minute (unchanged): "
      f"{profile.favorites[doc].time_alive:.0f}")

# Any action wakes the user and accrual resumes.
session.click(session.nav_set.entries[0].doc_id)
advance(10)
print(f"time_alive after waking + 10 s: {profile.favorites[doc].time_alive:.0f}")
