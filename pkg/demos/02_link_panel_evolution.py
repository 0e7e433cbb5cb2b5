"""Watching the link panel evolve.

A fixed-size panel of links adapts to clicks: clicked links gain fitness
and survive; every refresh the weakest slots are recombined with either a
random document or the one nearest the user's interest point; ageing
pulls everything back toward the random regime when the user stops
clicking. Run: python demos/02_link_panel_evolution.py
"""

import numpy as np

from evonav.clock import VirtualClock
from evonav.datasets import SyntheticCorpusConfig, synthetic_topic_corpus
from evonav.engine import EngineConfig
from evonav.mapping import build_knowledge_map
from evonav.session import SessionRuntime
from evonav.text import default_stop_words
from evonav.users import UserProfile

docs, topic_of = synthetic_topic_corpus(SyntheticCorpusConfig(seed=20241))
kmap = build_knowledge_map(docs, default_stop_words(), cluster_count=10, seed=20241)

config = EngineConfig(rng_seed=7)
clock = VirtualClock()
profile = UserProfile(user_id="demo", created_at=0.0, last_action_at=0.0)
session = SessionRuntime(profile, kmap, config, np.random.default_rng(7), clock)
session.start()


def show(label):
    row = " ".join(
        f"{e.doc_id}[t{topic_of[e.doc_id]}]:{e.fitness:<3}" for e in session.nav_set.entries
    )
    print(f"{label:<26} {row}")


def advance(seconds):
    for _ in range(int(seconds)):
        clock.advance(1.0)
        session.tick()


show("initial (one per cluster)")

# The user is interested in topic 4: click its panel link three times.
target = next(e.doc_id for e in session.nav_set.entries if topic_of[e.doc_id] == 4)
for _ in range(3):
    session.click(target)
show("after 3 clicks on t4")

# Each refresh replaces the weakest slots; most arrivals now come from the
# neighborhood of the clicked document, with a 30% mutation rate keeping
# exploration alive.
for round_number in range(1, 4):
    advance(config.refresh_interval)
    show(f"after renewal {round_number}")

count = sum(1 for e in session.nav_set.entries if topic_of[e.doc_id] == 4)
print(f"\npanel now holds {count}/10 documents of topic 4")

# Stop clicking: ageing drains fitness one point per second, and the panel
# drifts back to random exploration.
advance(12 * config.refresh_interval)
show("after 12 idle renewals")
print("max fitness after idling:", session.nav_set.max_fitness())
