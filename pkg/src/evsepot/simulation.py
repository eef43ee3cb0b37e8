"""Simulated EV charging process backing the decoy dashboard.

A Station holds a fixed number of charging columns.  Each column either
hosts one ChargingSession or waits out an idle gap before a new vehicle
"arrives".  All randomness flows through per-column generators seeded from
one master seed, so a station is fully deterministic: same seed, same
advance/action sequence, same state.
"""

from __future__ import annotations

import random
import threading
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from typing import Optional


class SimulationError(Exception):
    pass


class ColumnOccupied(SimulationError):
    pass


class InvalidDemand(SimulationError):
    pass


class UnknownSession(SimulationError):
    pass


class IllegalTransition(SimulationError):
    pass


class Status(str, Enum):
    CHARGING = "Charging"
    PAUSED = "Paused"
    STOPPED = "Stopped"
    COMPLETED = "Completed"
    DEPARTED = "Departed"


class ActionKind(str, Enum):
    STOP = "Stop"
    PAUSE = "Pause"
    RESUME = "Resume"


# Legal (action, current status) -> new status. Everything else is an
# IllegalTransition. Stop is terminal: Resume never reverses it.
_TRANSITIONS = {
    (ActionKind.STOP, Status.CHARGING): Status.STOPPED,
    (ActionKind.STOP, Status.PAUSED): Status.STOPPED,
    (ActionKind.PAUSE, Status.CHARGING): Status.PAUSED,
    (ActionKind.RESUME, Status.PAUSED): Status.CHARGING,
}


@dataclass
class SessionProfile:
    """Distribution parameters for generated sessions, config-overridable."""

    battery_capacities_kwh: tuple = (24.0, 40.0, 52.0, 64.0, 75.0, 100.0)
    max_charge_rates_kw: tuple = (3.7, 7.4, 11.0, 22.0)
    dwell_min_s: float = 30 * 60.0
    dwell_max_s: float = 8 * 3600.0
    demand_fraction_min: float = 0.2
    demand_fraction_max: float = 0.9
    idle_gap_min_s: float = 60.0
    idle_gap_max_s: float = 20 * 60.0
    tariff_per_kwh: float = 0.40


@dataclass
class ChargingSession:
    session_id: str
    column_id: int
    arrival_time: float
    departure_time: float
    battery_capacity_kwh: float
    initial_energy_kwh: float
    requested_energy_kwh: float
    max_charge_rate_kw: float
    tariff_per_kwh: float
    delivered_energy_kwh: float = 0.0
    status: Status = Status.CHARGING


@dataclass
class ChargeAction:
    kind: ActionKind
    session_id: str
    source_ip: str = "-"
    received_at: float = 0.0


@dataclass(frozen=True)
class ColumnView:
    session_id: str
    status: str
    completion_pct: float
    delivered_kwh: float
    cost: float
    remaining_s: float


@dataclass(frozen=True)
class DashboardView:
    clock: float
    aggregate_demand_kw: float
    columns: tuple  # one ColumnView or None per column


def estimate_initial_energy(capacity_kwh: float, requested_kwh: float,
                            rng: random.Random) -> float:
    """Pick a plausible pre-existing battery charge.

    Uniform over [0, capacity - requested]: whatever the vehicle asks for
    must still fit in the battery.
    """
    if requested_kwh <= 0 or requested_kwh > capacity_kwh:
        raise InvalidDemand(
            f"requested {requested_kwh} kWh outside (0, {capacity_kwh}]")
    upper = capacity_kwh - requested_kwh
    if upper <= 0:
        return 0.0
    return rng.uniform(0.0, upper)


def completion_percentage(session: ChargingSession) -> float:
    pct = 100.0 * (session.initial_energy_kwh + session.delivered_energy_kwh) \
        / session.battery_capacity_kwh
    return min(100.0, max(0.0, pct))


def charging_cost(session: ChargingSession) -> float:
    """Cost of the energy delivered so far, rounded half-up to cents."""
    amount = Decimal(str(session.delivered_energy_kwh)) \
        * Decimal(str(session.tariff_per_kwh))
    return float(amount.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass
class _Column:
    rng: random.Random
    session: Optional[ChargingSession] = None
    next_arrival_at: float = 0.0
    # per-column counter so session ids don't depend on the interleaving of
    # arrivals across columns within one advance window
    counter: int = 0


class Station:
    """The simulated charging station.

    All mutations (advance, apply_action, generate_session) serialize on one
    internal lock; snapshot() returns an immutable view safe to share.
    """

    def __init__(self, seed: int = 0, column_count: int = 4,
                 profile: Optional[SessionProfile] = None,
                 populate: bool = True):
        if column_count < 1:
            raise ValueError("column_count must be >= 1")
        self.profile = profile or SessionProfile()
        self.clock = 0.0
        self._lock = threading.Lock()
        self._demand_kw = 0.0
        master = random.Random(seed)
        self._columns = [
            _Column(rng=random.Random(master.getrandbits(64)))
            for _ in range(column_count)
        ]
        if populate:
            for i in range(column_count):
                self.generate_session(i)

    # -- session generation -------------------------------------------------

    def generate_session(self, column_id: int) -> ChargingSession:
        with self._lock:
            col = self._columns[column_id]
            if col.session is not None and col.session.status != Status.DEPARTED:
                raise ColumnOccupied(f"column {column_id} is occupied")
            session = self._draw_session(column_id, self.clock, col)
            col.session = session
            self._demand_kw += session.max_charge_rate_kw
            return session

    def _draw_session(self, column_id: int, arrival: float,
                      col: "_Column") -> ChargingSession:
        p = self.profile
        rng = col.rng
        capacity = rng.choice(p.battery_capacities_kwh)
        rate = rng.choice(p.max_charge_rates_kw)
        dwell = rng.uniform(p.dwell_min_s, p.dwell_max_s)
        requested = capacity * rng.uniform(p.demand_fraction_min,
                                           p.demand_fraction_max)
        initial = estimate_initial_energy(capacity, requested, rng)
        col.counter += 1
        return ChargingSession(
            session_id=f"EVS-{column_id}-{col.counter:05d}",
            column_id=column_id,
            arrival_time=arrival,
            departure_time=arrival + dwell,
            battery_capacity_kwh=capacity,
            initial_energy_kwh=initial,
            requested_energy_kwh=requested,
            max_charge_rate_kw=rate,
            tariff_per_kwh=p.tariff_per_kwh,
        )

    # -- time ----------------------------------------------------------------

    def advance(self, dt: float) -> None:
        """Move the simulation clock forward by dt seconds.

        Columns evolve independently; each one is integrated exactly over
        the window, so splitting one advance into sub-steps changes nothing
        beyond float rounding.
        """
        if dt < 0:
            raise ValueError("dt must be >= 0")
        if dt == 0:
            return
        with self._lock:
            t0, t1 = self.clock, self.clock + dt
            for column_id, col in enumerate(self._columns):
                self._advance_column(column_id, col, t0, t1)
            self.clock = t1

    def _advance_column(self, column_id: int, col: _Column,
                        t0: float, t1: float) -> None:
        t = t0
        while t < t1:
            if col.session is None:
                if col.next_arrival_at > t1:
                    return
                arrival = max(col.next_arrival_at, t)
                session = self._draw_session(column_id, arrival, col)
                col.session = session
                self._demand_kw += session.max_charge_rate_kw
                t = arrival
                continue
            s = col.session
            window_end = min(t1, s.departure_time)
            if s.status == Status.CHARGING and window_end > t:
                gained = s.max_charge_rate_kw * (window_end - t) / 3600.0
                s.delivered_energy_kwh = min(
                    s.delivered_energy_kwh + gained, s.requested_energy_kwh)
                if s.delivered_energy_kwh >= s.requested_energy_kwh:
                    s.status = Status.COMPLETED
                    self._demand_kw -= s.max_charge_rate_kw
            if t1 >= s.departure_time:
                if s.status == Status.CHARGING:
                    self._demand_kw -= s.max_charge_rate_kw
                s.status = Status.DEPARTED
                col.session = None
                col.next_arrival_at = s.departure_time + col.rng.uniform(
                    self.profile.idle_gap_min_s, self.profile.idle_gap_max_s)
                t = s.departure_time
                continue
            return

    # -- actions ---------------------------------------------------------------

    def apply_action(self, action: ChargeAction) -> Status:
        """Apply a Stop/Pause/Resume to a session; returns the new status."""
        with self._lock:
            session = self._find(action.session_id)
            if session is None:
                raise UnknownSession(action.session_id)
            key = (action.kind, session.status)
            if key not in _TRANSITIONS:
                raise IllegalTransition(
                    f"{action.kind.value} on {session.status.value} session")
            new_status = _TRANSITIONS[key]
            if session.status == Status.CHARGING and new_status != Status.CHARGING:
                self._demand_kw -= session.max_charge_rate_kw
            elif session.status != Status.CHARGING and new_status == Status.CHARGING:
                self._demand_kw += session.max_charge_rate_kw
            session.status = new_status
            return new_status

    def _find(self, session_id: str) -> Optional[ChargingSession]:
        for col in self._columns:
            if col.session is not None and col.session.session_id == session_id:
                return col.session
        return None

    def find_session(self, session_id: str) -> Optional[ChargingSession]:
        with self._lock:
            return self._find(session_id)

    # -- views -------------------------------------------------------------------

    @property
    def aggregate_demand_kw(self) -> float:
        return self._demand_kw

    def recompute_demand_kw(self) -> float:
        """Demand summed from scratch; must agree with the running value."""
        return sum(col.session.max_charge_rate_kw for col in self._columns
                   if col.session is not None
                   and col.session.status == Status.CHARGING)

    def snapshot(self) -> DashboardView:
        with self._lock:
            views = []
            for col in self._columns:
                s = col.session
                if s is None:
                    views.append(None)
                    continue
                if s.status == Status.CHARGING and s.max_charge_rate_kw > 0:
                    remaining = min(
                        (s.requested_energy_kwh - s.delivered_energy_kwh)
                        / s.max_charge_rate_kw * 3600.0,
                        max(0.0, s.departure_time - self.clock))
                else:
                    remaining = max(0.0, s.departure_time - self.clock)
                views.append(ColumnView(
                    session_id=s.session_id,
                    status=s.status.value,
                    completion_pct=completion_percentage(s),
                    delivered_kwh=s.delivered_energy_kwh,
                    cost=charging_cost(s),
                    remaining_s=remaining,
                ))
            return DashboardView(
                clock=self.clock,
                aggregate_demand_kw=self._demand_kw,
                columns=tuple(views),
            )

    def sessions(self) -> list:
        with self._lock:
            return [col.session for col in self._columns
                    if col.session is not None]
