"""One user's live session: periodic evolution plus action dispatch.

SessionRuntime glues the engine, the profile and the clock together. A
scheduler (real thread in the service, hand-driven loop in simulations)
calls tick() once per ageing interval; user actions arrive as method
calls. Within a tick the order is: favorites accrual / dormancy check,
then set renewal when the refresh interval has elapsed, then ageing.
Renewal runs before ageing so that, at the default constants (click bonus
= set size = refresh/ageing ratio), a single click still counts as a
positive signal at the very next renewal.
"""

from __future__ import annotations

import numpy as np

from evonav import engine, users
from evonav.clock import Clock
from evonav.engine import DisplayHistory, EngineConfig, NavSet
from evonav.mapping import KnowledgeMap
from evonav.users import UserProfile

REFRESH_INTERVAL_MAX = 3600.0
_EPS = 1e-9


class SessionRuntime:
    def __init__(
        self,
        profile: UserProfile,
        kmap: KnowledgeMap,
        config: EngineConfig,
        rng: np.random.Generator,
        clock: Clock,
        store=None,
        trace: list | None = None,
        force_random: bool = False,
    ):
        self.profile = profile
        self.kmap = kmap
        self.config = config
        self.rng = rng
        self.clock = clock
        self.store = store
        self.trace = trace
        self.force_random = force_random
        self.history = DisplayHistory()
        self.refresh_interval = float(config.refresh_interval)
        self.nav_set: NavSet | None = None
        self._pause_remaining: float | None = None
        self._age_carry = 0.0
        now = clock.now()
        self._last_tick = now
        self._next_renewal_at = now + self.refresh_interval

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        """Build the initial panel: from the stored interest point when the
        user has one, random one-per-cluster otherwise."""
        if self.profile.social_point is not None:
            self.nav_set = engine.warm_start_set(
                self.kmap,
                self.config,
                self.profile.social_point.coord,
                favorites=list(self.profile.favorites),
            )
            self.history.record_all(self.nav_set.doc_ids(), 0)
            mode = "warm"
        else:
            self.nav_set = engine.init_set(self.kmap, self.config, self.rng, self.history)
            mode = "random"
        self._emit("init", mode=mode, set_after=self._set_snapshot())

    def tick(self) -> None:
        """One scheduler step (call once per ageing interval)."""
        now = self.clock.now()
        elapsed = now - self._last_tick
        self._last_tick = now

        event = users.tick_favorites(self.profile, elapsed, now, self.config.dormant_count)
        if event is not None:
            self._emit("dormant_onset", penalties={d: list(p) for d, p in event.penalties.items()})
        if event is not None or (self.profile.favorites and not self.profile.dormant):
            self._persist()  # accrual or penalty actually changed state

        if not self.nav_set.paused and now >= self._next_renewal_at - _EPS:
            self._renew(now)
            self._next_renewal_at = now + self.refresh_interval

        if not self.nav_set.paused:
            self._age_carry += elapsed
            while self._age_carry >= self.config.ageing_interval - _EPS:
                self._age_carry -= self.config.ageing_interval
                changed = engine.age_set(self.nav_set)
                if changed:
                    self._emit(
                        "ageing",
                        changes=[[doc, before, after] for doc, before, after in changed],
                        set_after=self._set_snapshot(),
                    )

    def _renew(self, now: float) -> None:
        weight = users.effective_favorites_fitness(
            self.profile, self.nav_set, self.config.favorites_fitness_const
        )
        report = engine.renewal_tick(
            self.nav_set,
            self.kmap,
            self.config,
            self.rng,
            self.history,
            favorites=list(self.profile.favorites),
            favorites_weight=weight,
            force_random=self.force_random,
        )
        self._emit(
            "renewal",
            iteration=report.iteration,
            replaced=[
                {"slot": r.slot, "old": r.old_doc, "new": r.new_doc, "mode": r.mode, "draw": r.draw}
                for r in report.replaced
            ],
            interest_point=None
            if report.interest_point is None
            else [float(x) for x in report.interest_point],
            favorites_weight=report.favorites_weight,
            max_set_fitness_before=report.max_set_fitness_before,
            set_after=self._set_snapshot(),
        )

    # -- user actions ------------------------------------------------------

    def click(self, doc_id: str) -> None:
        before, after = engine.register_click(self.nav_set, doc_id, self.config, self.history)
        users.touch(self.profile, self.clock.now())
        self._emit("click", doc=doc_id, fitness_before=before, fitness_after=after)
        self._persist()

    def add_favorite(self, doc_id: str) -> None:
        now = self.clock.now()
        users.add_favorite(self.profile, doc_id, now, known_docs=self.kmap.row)
        weight = users.effective_favorites_fitness(
            self.profile, self.nav_set, self.config.favorites_fitness_const
        )
        replacement = engine.backfill_favorited_slot(
            self.nav_set,
            doc_id,
            self.kmap,
            self.config,
            self.rng,
            self.history,
            favorites=list(self.profile.favorites),
            favorites_weight=weight,
        )
        self._emit(
            "favorite_add",
            doc=doc_id,
            backfill=None
            if replacement is None
            else {"slot": replacement.slot, "new": replacement.new_doc, "mode": replacement.mode},
        )
        self._persist()

    def remove_favorite(self, doc_id: str) -> None:
        now = self.clock.now()
        users.remove_favorite(self.profile, doc_id, now)
        users.touch(self.profile, now)
        self._emit("favorite_remove", doc=doc_id)
        self._persist()

    def reset(self) -> None:
        engine.reset_set(self.nav_set, self.kmap, self.config, self.rng, self.history)
        now = self.clock.now()
        users.touch(self.profile, now)
        self._next_renewal_at = now + self.refresh_interval
        self._pause_remaining = None
        self.nav_set.paused = False
        self._emit("reset", set_after=self._set_snapshot())
        self._persist()

    def set_paused(self, paused: bool) -> None:
        now = self.clock.now()
        users.touch(self.profile, now)
        if paused and not self.nav_set.paused:
            self._pause_remaining = max(0.0, self._next_renewal_at - now)
            self.nav_set.paused = True
        elif not paused and self.nav_set.paused:
            self._next_renewal_at = now + (self._pause_remaining or 0.0)
            self._pause_remaining = None
            self.nav_set.paused = False
        self._emit("pause", paused=self.nav_set.paused)
        self._persist()

    def set_refresh_interval(self, seconds: float) -> None:
        if not self.config.ageing_interval <= seconds <= REFRESH_INTERVAL_MAX:
            raise ValueError(
                f"refresh interval must be in [{self.config.ageing_interval}, {REFRESH_INTERVAL_MAX}]"
            )
        now = self.clock.now()
        users.touch(self.profile, now)
        self.refresh_interval = float(seconds)
        if self.nav_set.paused:
            self._pause_remaining = self.refresh_interval
        else:
            self._next_renewal_at = now + self.refresh_interval
        self._emit("refresh_interval", seconds=self.refresh_interval)
        self._persist()

    # -- views -------------------------------------------------------------

    def seconds_to_refresh(self) -> float:
        if self.nav_set.paused:
            return float(self._pause_remaining or 0.0)
        return max(0.0, self._next_renewal_at - self.clock.now())

    def view(self) -> dict:
        return {
            "set": [
                {
                    "doc_id": e.doc_id,
                    "title": self.kmap.title_of(e.doc_id),
                    "fitness": e.fitness,
                }
                for e in self.nav_set.entries
            ],
            "iteration": self.nav_set.iteration_counter,
            "seconds_to_next_refresh": round(self.seconds_to_refresh(), 3),
            "paused": self.nav_set.paused,
            "refresh_interval": self.refresh_interval,
        }

    def favorites_view(self) -> dict:
        return {
            "favorites": [
                {
                    "doc_id": e.doc_id,
                    "title": self.kmap.title_of(e.doc_id),
                    "time_alive": round(e.time_alive, 3),
                }
                for e in self.profile.favorites.values()
            ]
        }

    # -- internals ---------------------------------------------------------

    def _set_snapshot(self) -> list[list]:
        return [[e.doc_id, e.fitness] for e in self.nav_set.entries]

    def _emit(self, event: str, **payload) -> None:
        if self.trace is not None:
            record = {
                "event": event,
                "clock": self.clock.now(),
                "iteration": self.nav_set.iteration_counter if self.nav_set else 0,
            }
            record.update(payload)
            self.trace.append(record)

    def _persist(self) -> None:
        if self.store is not None:
            self.store.save_profile(self.profile)
