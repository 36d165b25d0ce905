"""Seedable discrete-event simulation of passenger and suspect movement.

The run proceeds in two phases. Phase one is an event-driven movement
simulation: arrivals per the traffic table, routing on the navigation
graph at a fixed walking speed, FIFO queueing at fare gates and ticket
machines, and scenario-specific suspect routes. Each agent leaves behind a
piecewise-linear path (time, position) record. Phase two evaluates camera
observations against those paths: geometric mode samples every present
agent on a fixed tick grid and computes angle/distance/density from the
actual geometry; stochastic mode draws the three terms once per
suspect-camera pair from configured distributions, ignoring geometry.

A run is fully determined by (seed, config, layout). Randomness comes
from named sub-streams of the master seed (arrival counts, route choices,
service delays, suspect injection, stochastic observations), each consumed
in a fixed generation order rather than event order, so results do not
depend on event interleaving.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .detection import (
    DetectionThreshold,
    DetectionWeights,
    NormalizationBounds,
    ObservationSample,
    detection_probability,
    trajectory_detected,
)
from .distributions import IntUniformSpec, NormalSpec
from .errors import ConfigError, LayoutError
from .geometry import Point2D, angle_between, angular_offset_deg, azimuth_of, unit_vector
from .station import Camera, CameraPreset, StationLayout, ZoneKind, shortest_route

WALKING_SPEED_MPS = 1.4


class TimeOfDay(Enum):
    """The three service periods partitioning 06:00-24:00."""

    MORNING = ("Morning", 6, 12)
    MIDDAY = ("Midday", 12, 18)
    AFTERNOON = ("Afternoon", 18, 24)

    def __init__(self, label: str, start_hour: int, end_hour: int):
        self.label = label
        self.start_hour = start_hour
        self.end_hour = end_hour

    @classmethod
    def from_name(cls, name: str) -> "TimeOfDay":
        for p in cls:
            if p.label.lower() == name.lower() or p.name.lower() == name.lower():
                return p
        raise ConfigError(f"unknown time of day {name!r}")


@dataclass(frozen=True)
class TrafficTable:
    """Arrival-rate distributions per period: street entrances per minute,
    platform arrivals (train alightings) per five minutes."""

    morning_entrance: NormalSpec = field(default_factory=lambda: NormalSpec(7, 1.5))
    morning_exit: NormalSpec = field(default_factory=lambda: NormalSpec(5, 2))
    midday_entrance: NormalSpec = field(default_factory=lambda: NormalSpec(5, 1.5))
    midday_exit: NormalSpec = field(default_factory=lambda: NormalSpec(7, 2))
    afternoon_entrance: NormalSpec = field(default_factory=lambda: NormalSpec(3, 1.5))
    afternoon_exit: NormalSpec = field(default_factory=lambda: NormalSpec(9, 2))

    def entrance_spec(self, period: TimeOfDay) -> NormalSpec:
        return {TimeOfDay.MORNING: self.morning_entrance,
                TimeOfDay.MIDDAY: self.midday_entrance,
                TimeOfDay.AFTERNOON: self.afternoon_entrance}[period]

    def exit_spec(self, period: TimeOfDay) -> NormalSpec:
        return {TimeOfDay.MORNING: self.morning_exit,
                TimeOfDay.MIDDAY: self.midday_exit,
                TimeOfDay.AFTERNOON: self.afternoon_exit}[period]

    @classmethod
    def negligible(cls) -> "TrafficTable":
        """All-but-empty traffic, for suspect-only studies."""
        z = NormalSpec(0.0, 1e-9, min_clamp=0.0)
        return cls(z, z, z, z, z, z)

    def to_dict(self) -> dict:
        return {
            "morning_entrance": self.morning_entrance.to_dict(),
            "morning_exit": self.morning_exit.to_dict(),
            "midday_entrance": self.midday_entrance.to_dict(),
            "midday_exit": self.midday_exit.to_dict(),
            "afternoon_entrance": self.afternoon_entrance.to_dict(),
            "afternoon_exit": self.afternoon_exit.to_dict(),
        }


class AgentKind(str, Enum):
    REGULAR = "regular"
    SUSPECT = "suspect"


class AgentPhase(str, Enum):
    WALKING = "walking"
    QUEUED = "queued"
    DEPARTED = "departed"


@dataclass
class Agent:
    """A simulated passenger or suspect."""

    id: str
    kind: AgentKind
    position: Point2D
    heading: tuple[float, float]
    route: list[str]
    spawn_time: float
    scenario: int | None = None
    speed: float = WALKING_SPEED_MPS
    phase: AgentPhase = AgentPhase.WALKING


@dataclass(frozen=True)
class SimConfig:
    """Everything a run needs besides the layout and duration."""

    preset: CameraPreset
    mode: str = "geometric"
    seed: int = 0
    period: TimeOfDay = TimeOfDay.MORNING
    weights: DetectionWeights = field(default_factory=DetectionWeights.equal)
    threshold: DetectionThreshold = field(default_factory=DetectionThreshold)
    bounds: NormalizationBounds = field(default_factory=NormalizationBounds)
    sample_interval: float = 0.5
    traffic: TrafficTable = field(default_factory=TrafficTable)
    gate_delay: NormalSpec = field(default_factory=lambda: NormalSpec(5, 2, min_clamp=1.0))
    machine_delay: NormalSpec = field(default_factory=lambda: NormalSpec(12, 2, min_clamp=6.0))
    suspects_per_hour: NormalSpec = field(default_factory=lambda: NormalSpec(8, 2.3, min_clamp=0.0))
    stochastic_a: NormalSpec = field(default_factory=lambda: NormalSpec(5.02, 1.49))
    stochastic_d: NormalSpec = field(default_factory=lambda: NormalSpec(5.02, 1.49))
    stochastic_n: IntUniformSpec = field(default_factory=lambda: IntUniformSpec(1, 18))
    scenario: int | None = None
    ticket_machine_fraction: float = 0.25
    loiter_dwell: NormalSpec = field(default_factory=lambda: NormalSpec(15, 5, min_clamp=2.0))
    record_samples: bool = True
    bernoulli_exceedance_p: float | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("geometric", "stochastic"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.sample_interval <= 0:
            raise ConfigError("sample_interval must be positive")
        if not 0.0 <= self.ticket_machine_fraction <= 1.0:
            raise ConfigError("ticket_machine_fraction outside [0, 1]")
        if self.scenario is not None and self.scenario not in (1, 2, 3):
            raise ConfigError(f"scenario must be 1, 2 or 3, got {self.scenario}")
        if (self.bernoulli_exceedance_p is not None
                and not 0.0 <= self.bernoulli_exceedance_p <= 1.0):
            raise ConfigError("bernoulli_exceedance_p outside [0, 1]")


@dataclass(frozen=True)
class Trajectory:
    agent_id: str
    kind: AgentKind
    scenario: int | None
    period: str
    spawn_time: float
    depart_time: float | None
    per_camera_max_p: dict[str, float]
    detected: bool
    samples: tuple[ObservationSample, ...] = ()

    def to_dict(self, include_samples: bool = True) -> dict:
        d = {
            "agent_id": self.agent_id,
            "kind": self.kind.value,
            "scenario": self.scenario,
            "period": self.period,
            "spawn_time": self.spawn_time,
            "depart_time": self.depart_time,
            "per_camera_max_p": dict(self.per_camera_max_p),
            "detected": self.detected,
        }
        if include_samples:
            d["samples"] = [
                {"camera_id": s.camera_id, "time": s.time, "a_deg": s.a_deg,
                 "d_m": s.d_m, "n_count": s.n_count, "p": s.p}
                for s in self.samples
            ]
        return d


@dataclass(frozen=True)
class PassengerCounts:
    spawned: int
    spawned_entrance: int
    spawned_exit_flow: int
    spawned_suspects: int
    served: int
    departed: int
    in_transit: int
    gate_services: int
    machine_services: int

    def to_dict(self) -> dict:
        return {
            "spawned": self.spawned,
            "spawned_entrance": self.spawned_entrance,
            "spawned_exit_flow": self.spawned_exit_flow,
            "spawned_suspects": self.spawned_suspects,
            "served": self.served,
            "departed": self.departed,
            "in_transit": self.in_transit,
            "gate_services": self.gate_services,
            "machine_services": self.machine_services,
        }


@dataclass(frozen=True)
class SimOutput:
    trajectories: tuple[Trajectory, ...]
    passenger_counts: PassengerCounts
    rng_seed: int
    period: str
    mode: str
    duration: float

    def suspect_trajectories(self) -> list[Trajectory]:
        return [t for t in self.trajectories if t.kind == AgentKind.SUSPECT]

    def to_dict(self) -> dict:
        return {
            "rng_seed": self.rng_seed,
            "period": self.period,
            "mode": self.mode,
            "duration": self.duration,
            "passenger_counts": self.passenger_counts.to_dict(),
            "trajectories": [t.to_dict() for t in self.trajectories],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def sample_delay(spec: NormalSpec, rng: np.random.Generator) -> float:
    """One service delay: a normal draw clamped to the spec's limits."""
    return spec.sample(rng)


# --- route planning ---------------------------------------------------------

_DWELL = "dwell"
_GATE = "gate"
_MACHINE = "machine"


@dataclass(frozen=True)
class _Step:
    node: str
    action: str | None = None


class _Router:
    """Caches shortest routes between node pairs for one layout."""

    def __init__(self, layout: StationLayout):
        self.layout = layout
        self._cache: dict[tuple[str, str], list[str]] = {}

    def route(self, a: str, b: str) -> list[str]:
        key = (a, b)
        if key not in self._cache:
            self._cache[key] = shortest_route(self.layout, a, b)
        return self._cache[key]

    def compose(self, stops: list[tuple[str, str | None]]) -> list[_Step]:
        """Chain shortest routes through the given (node, action) stops."""
        steps: list[_Step] = [_Step(stops[0][0], stops[0][1])]
        for (prev, _), (node, action) in zip(stops, stops[1:]):
            leg = self.route(prev, node)
            steps.extend(_Step(n) for n in leg[1:-1])
            steps.append(_Step(node, action))
        return steps


def _pick(rng: np.random.Generator, items: list[str]) -> str:
    return items[int(rng.integers(len(items)))]


def _zone_nodes(layout: StationLayout, kind: ZoneKind) -> list[str]:
    nodes = layout.nodes_of(kind)
    if not nodes:
        raise LayoutError(f"layout has no zone of kind {kind.value!r}")
    return nodes


def _service_nodes(layout: StationLayout, which: str) -> list[str]:
    out = list(getattr(layout.service_points, which))
    if not out:
        raise LayoutError(f"layout has no {which} service points")
    return out


def _scenario_stops(scenario: int, layout: StationLayout,
                    rng: np.random.Generator) -> list[tuple[str, str | None]]:
    entrances = _zone_nodes(layout, ZoneKind.ENTRANCE)
    if scenario == 1:
        waypoints = list(_zone_nodes(layout, ZoneKind.CONCOURSE))
        exits = _zone_nodes(layout, ZoneKind.EXIT)
        start = _pick(rng, entrances)
        w1 = _pick(rng, waypoints)
        rest = [w for w in waypoints if w != w1] or [w1]
        w2 = _pick(rng, rest)
        return [(start, None), (w1, _DWELL), (w2, _DWELL), (_pick(rng, exits), None)]
    if scenario == 2:
        machine = _pick(rng, _service_nodes(layout, "ticket_machines"))
        gate = _pick(rng, _service_nodes(layout, "gates"))
        platform = _pick(rng, _zone_nodes(layout, ZoneKind.PLATFORM))
        return [(_pick(rng, entrances), None), (machine, _MACHINE),
                (gate, _GATE), (platform, None)]
    if scenario == 3:
        gate = _pick(rng, _service_nodes(layout, "gates"))
        platform = _pick(rng, _zone_nodes(layout, ZoneKind.PLATFORM))
        return [(_pick(rng, entrances), None), (gate, _GATE), (platform, None)]
    raise ConfigError(f"scenario must be 1, 2 or 3, got {scenario}")


def scenario_route(scenario: int, layout: StationLayout,
                   rng: np.random.Generator) -> list[str]:
    """Node path a suspect of the given scenario walks: enter and loiter
    before leaving (1), buy a ticket then ride (2), or head straight for
    the platforms (3). Instances (entrance, machine, gate, ...) are chosen
    uniformly from the rng stream."""
    router = _Router(layout)
    return [s.node for s in router.compose(_scenario_stops(scenario, layout, rng))]


# --- single-pair observation (reference path) -------------------------------


def _in_view(camera: Camera, p: Point2D) -> tuple[bool, float]:
    d = camera.position.distance_to(p)
    if not camera.min_range_m <= d <= camera.max_range_m:
        return False, d
    bearing = azimuth_of(p.x - camera.position.x, p.y - camera.position.y)
    if angular_offset_deg(bearing, camera.pan_deg) > camera.fov_deg / 2.0:
        return False, d
    return True, d


def observe(camera: Camera, agent: Agent, all_agents: list[Agent],
            w: DetectionWeights, b: NormalizationBounds,
            mode: str = "geometric", *, cfg: SimConfig | None = None,
            rng: np.random.Generator | None = None,
            time: float = 0.0) -> ObservationSample | None:
    """Evaluate one camera against one agent.

    Geometric mode returns None when the agent is outside the camera's
    view cone or range; otherwise the angular deviation is computed so
    that an agent walking head-on toward the camera scores 0 degrees, and
    the density term counts every agent in view (including this one).
    Stochastic mode draws the three terms from the configured
    distributions and never returns None.
    """
    if mode == "stochastic":
        if cfg is None or rng is None:
            raise ConfigError("stochastic observe needs cfg and rng")
        if cfg.bernoulli_exceedance_p is not None:
            hit = rng.uniform() < cfg.bernoulli_exceedance_p
            return ObservationSample(camera.id, time, 0.0, 0.0, 0,
                                     1.0 if hit else 0.0)
        a = max(0.0, cfg.stochastic_a.sample(rng))
        d = max(0.0, cfg.stochastic_d.sample(rng))
        n = cfg.stochastic_n.sample(rng)
        return ObservationSample(camera.id, time, a, d, n,
                                 detection_probability(a, d, n, w, b))

    visible, dist = _in_view(camera, agent.position)
    if not visible:
        return None
    ax, ay = unit_vector(camera.pan_deg)
    a_deg = 180.0 - angle_between(ax, ay, agent.heading[0], agent.heading[1])
    a_deg = min(180.0, max(0.0, a_deg))
    n = sum(1 for other in all_agents if _in_view(camera, other.position)[0])
    n = min(n, b.n_max)
    p = detection_probability(a_deg, dist, n, w, b)
    return ObservationSample(camera.id, time, a_deg, dist, n, p)


def suspect_trajectory_verdict(samples: list[ObservationSample],
                               t: DetectionThreshold) -> tuple[dict[str, float], bool]:
    """Per-camera best score over a trajectory plus the detection verdict."""
    maxima: dict[str, float] = {}
    for s in samples:
        if s.camera_id not in maxima or s.p > maxima[s.camera_id]:
            maxima[s.camera_id] = s.p
    return maxima, trajectory_detected(list(maxima.values()), t)


# --- the engine --------------------------------------------------------------


@dataclass
class _SimAgent:
    gen_seq: int
    kind: AgentKind
    flow: str  # entrance | exit_flow
    scenario: int | None
    spawn_time: float
    steps: list[_Step]
    gate_delay: float = 0.0
    machine_delay: float = 0.0
    dwells: list[float] = field(default_factory=list)
    # run state
    id: str = ""
    cursor: int = 0
    dwell_i: int = 0
    waypoints_t: list[float] = field(default_factory=list)
    waypoints_xy: list[tuple[float, float]] = field(default_factory=list)
    depart_time: float | None = None
    served: bool = False


class _Queue:
    """Single-server FIFO service point."""

    __slots__ = ("waiting", "busy")

    def __init__(self) -> None:
        self.waiting: list = []
        self.busy = False


_EV_SPAWN = 0
_EV_ARRIVE = 1
_EV_SERVICE_DONE = 2
_EV_RESUME = 3


def _streams(seed: int) -> dict[str, np.random.Generator]:
    root = np.random.SeedSequence(seed)
    names = ("arrivals", "routes", "delays", "suspects", "observations")
    return {name: np.random.default_rng(child)
            for name, child in zip(names, root.spawn(len(names)))}


def _generate_agents(layout: StationLayout, cfg: SimConfig, duration: float,
                     rng_arrivals: np.random.Generator,
                     rng_routes: np.random.Generator,
                     rng_delays: np.random.Generator,
                     rng_suspects: np.random.Generator) -> list[_SimAgent]:
    router = _Router(layout)
    # zone lookups are lazy: a layout only needs the kinds its flows use
    cache: dict[str, list[str]] = {}

    def nodes(kind: ZoneKind) -> list[str]:
        if kind.value not in cache:
            cache[kind.value] = _zone_nodes(layout, kind)
        return cache[kind.value]

    def service(which: str) -> list[str]:
        return _service_nodes(layout, which)

    entrance_spec = cfg.traffic.entrance_spec(cfg.period)
    exit_spec = cfg.traffic.exit_spec(cfg.period)

    agents: list[_SimAgent] = []
    seq = 0

    # street-entrance passengers, one count draw per simulated minute
    for minute in range(math.ceil(duration / 60.0)):
        count = entrance_spec.sample_count(rng_arrivals)
        times = rng_arrivals.uniform(minute * 60.0, (minute + 1) * 60.0, count)
        for t in times:
            if t >= duration:
                continue
            start = _pick(rng_routes, nodes(ZoneKind.ENTRANCE))
            buys = rng_routes.uniform() < cfg.ticket_machine_fraction
            stops: list[tuple[str, str | None]] = [(start, None)]
            if buys:
                stops.append((_pick(rng_routes, service("ticket_machines")),
                              _MACHINE))
            stops.append((_pick(rng_routes, service("gates")), _GATE))
            stops.append((_pick(rng_routes, nodes(ZoneKind.PLATFORM)), None))
            agents.append(_SimAgent(seq, AgentKind.REGULAR, "entrance", None,
                                    float(t), router.compose(stops)))
            seq += 1

    # platform arrivals in batches every five minutes (train alightings)
    for batch in range(1, int(duration // 300.0) + 1):
        t = batch * 300.0
        if t >= duration:
            break
        count = exit_spec.sample_count(rng_arrivals)
        for _ in range(count):
            stops = [(_pick(rng_routes, nodes(ZoneKind.PLATFORM)), None),
                     (_pick(rng_routes, service("gates")), _GATE),
                     (_pick(rng_routes, nodes(ZoneKind.EXIT)), None)]
            agents.append(_SimAgent(seq, AgentKind.REGULAR, "exit_flow", None,
                                    t, router.compose(stops)))
            seq += 1

    # suspects: hourly count draws, arrival instants uniform within the hour
    for hour in range(math.ceil(duration / 3600.0)):
        count = cfg.suspects_per_hour.sample_count(rng_suspects)
        times = rng_suspects.uniform(hour * 3600.0, (hour + 1) * 3600.0, count)
        for t in times:
            if t >= duration:
                continue
            scenario = cfg.scenario or int(rng_suspects.integers(1, 4))
            steps = router.compose(_scenario_stops(scenario, layout, rng_suspects))
            agents.append(_SimAgent(seq, AgentKind.SUSPECT, "entrance", scenario,
                                    float(t), steps))
            seq += 1

    # pre-draw every service delay and dwell in generation order, so delays
    # are independent of event interleaving
    for a in agents:
        for s in a.steps:
            if s.action == _GATE:
                a.gate_delay = sample_delay(cfg.gate_delay, rng_delays)
            elif s.action == _MACHINE:
                a.machine_delay = sample_delay(cfg.machine_delay, rng_delays)
            elif s.action == _DWELL:
                a.dwells.append(sample_delay(cfg.loiter_dwell, rng_delays))

    agents.sort(key=lambda a: (a.spawn_time, a.gen_seq))
    prefix = {("regular", "entrance"): "p", ("regular", "exit_flow"): "x",
              ("suspect", "entrance"): "s"}
    for i, a in enumerate(agents):
        a.id = f"{prefix[(a.kind.value, a.flow)]}{i:06d}"
    return agents


def _run_movement(layout: StationLayout, cfg: SimConfig, duration: float,
                  agents: list[_SimAgent]) -> tuple[int, int]:
    """Advance the event queue to the end of the run; returns the number of
    gate and machine services completed."""
    nodes = layout.nav_nodes
    queues: dict[str, _Queue] = {}
    for n in layout.service_points.gates + layout.service_points.ticket_machines:
        queues[n] = _Queue()
    gate_services = 0
    machine_services = 0

    heap: list[tuple[float, int, int, object]] = []
    seq = 0

    def push(t: float, ev: int, payload: object) -> None:
        nonlocal seq
        heapq.heappush(heap, (t, seq, ev, payload))
        seq += 1

    def start_walk(a: _SimAgent, t: float) -> None:
        """Schedule the hop to the next step; departs if the route is done."""
        a.cursor += 1
        if a.cursor >= len(a.steps):
            a.depart_time = t
            return
        src = nodes[a.steps[a.cursor - 1].node]
        dst = nodes[a.steps[a.cursor].node]
        dt = src.distance_to(dst) / WALKING_SPEED_MPS
        a.waypoints_t.append(t + dt)
        a.waypoints_xy.append(dst.as_tuple())
        push(t + dt, _EV_ARRIVE, a)

    def begin_service(node: str, t: float) -> None:
        q = queues[node]
        a: _SimAgent = q.waiting[0]
        delay = a.gate_delay if a.steps[a.cursor].action == _GATE else a.machine_delay
        q.busy = True
        push(t + delay, _EV_SERVICE_DONE, node)

    def arrive(a: _SimAgent, t: float) -> None:
        action = a.steps[a.cursor].action
        if action in (_GATE, _MACHINE):
            q = queues[a.steps[a.cursor].node]
            q.waiting.append(a)
            if not q.busy:
                begin_service(a.steps[a.cursor].node, t)
        elif action == _DWELL:
            push(t + a.dwells[a.dwell_i], _EV_RESUME, a)
            a.dwell_i += 1
        else:
            start_walk(a, t)

    for a in agents:
        push(a.spawn_time, _EV_SPAWN, a)

    while heap:
        t, _, ev, payload = heapq.heappop(heap)
        if t > duration:
            break
        if ev == _EV_SPAWN:
            a = payload
            p0 = nodes[a.steps[0].node]
            a.waypoints_t.append(t)
            a.waypoints_xy.append(p0.as_tuple())
            arrive(a, t)
        elif ev == _EV_ARRIVE:
            arrive(payload, t)
        elif ev == _EV_RESUME:
            a = payload
            a.waypoints_t.append(t)
            a.waypoints_xy.append(a.waypoints_xy[-1])
            start_walk(a, t)
        elif ev == _EV_SERVICE_DONE:
            node = payload
            q = queues[node]
            a = q.waiting.pop(0)
            a.served = True
            if a.steps[a.cursor].action == _GATE:
                gate_services += 1
            else:
                machine_services += 1
            q.busy = False
            a.waypoints_t.append(t)
            a.waypoints_xy.append(a.waypoints_xy[-1])
            start_walk(a, t)
            if q.waiting:
                begin_service(node, t)
    return gate_services, machine_services


def _segment_headings(xy: np.ndarray) -> np.ndarray:
    """Unit heading per waypoint interval; stationary intervals carry the
    last moving heading (and leading ones borrow the first)."""
    m = len(xy)
    dirs = np.zeros((m, 2))
    deltas = np.diff(xy, axis=0)
    lens = np.hypot(deltas[:, 0], deltas[:, 1])
    last = None
    for i in range(m - 1):
        if lens[i] > 1e-12:
            last = deltas[i] / lens[i]
        dirs[i] = last if last is not None else (0.0, 0.0)
    dirs[m - 1] = dirs[m - 2] if m > 1 else (0.0, 0.0)
    # leading stationary intervals take the first moving heading
    first = None
    for i in range(m - 1):
        if lens[i] > 1e-12:
            first = deltas[i] / lens[i]
            break
    if first is not None:
        for i in range(m - 1):
            if lens[i] > 1e-12:
                break
            dirs[i] = first
    return dirs


def _geometric_observations(cfg: SimConfig, agents: list[_SimAgent],
                            duration: float):
    """Vectorized tick-grid sampling of every present agent against every
    camera. Returns per-agent/camera maxima and (optionally) raw samples."""
    dt = cfg.sample_interval
    n_ticks = int(math.ceil(duration / dt))
    cams = cfg.preset.cameras
    n_agents = len(agents)

    tick_parts, agent_parts, x_parts, y_parts, hx_parts, hy_parts = [], [], [], [], [], []
    for ai, a in enumerate(agents):
        t_end = min(a.depart_time if a.depart_time is not None else duration, duration)
        k0 = int(math.ceil(a.spawn_time / dt))
        k1 = min(int(math.ceil(t_end / dt)), n_ticks)
        if k1 <= k0:
            continue
        ticks = np.arange(k0, k1)
        times = ticks * dt
        wt = np.asarray(a.waypoints_t)
        xy = np.asarray(a.waypoints_xy)
        xs = np.interp(times, wt, xy[:, 0])
        ys = np.interp(times, wt, xy[:, 1])
        seg = np.clip(np.searchsorted(wt, times, side="right") - 1, 0, len(wt) - 1)
        dirs = _segment_headings(xy)
        tick_parts.append(ticks)
        agent_parts.append(np.full(len(ticks), ai))
        x_parts.append(xs)
        y_parts.append(ys)
        hx_parts.append(dirs[seg, 0])
        hy_parts.append(dirs[seg, 1])

    maxima = np.full((n_agents, len(cams)), np.nan)
    samples_per_agent: list[list[ObservationSample]] = [[] for _ in range(n_agents)]
    if not tick_parts:
        return maxima, samples_per_agent

    tick_idx = np.concatenate(tick_parts)
    agent_idx = np.concatenate(agent_parts)
    x = np.concatenate(x_parts)
    y = np.concatenate(y_parts)
    hx = np.concatenate(hx_parts)
    hy = np.concatenate(hy_parts)

    b = cfg.bounds
    w = cfg.weights
    for ci, cam in enumerate(cams):
        dx = x - cam.position.x
        dy = y - cam.position.y
        dist = np.hypot(dx, dy)
        bearing = np.degrees(np.arctan2(dy, dx)) % 360.0
        offset = np.abs(bearing - cam.pan_deg) % 360.0
        offset = np.minimum(offset, 360.0 - offset)
        in_view = ((dist >= cam.min_range_m) & (dist <= cam.max_range_m)
                   & (offset <= cam.fov_deg / 2.0))
        if not in_view.any():
            continue
        counts = np.bincount(tick_idx[in_view], minlength=int(tick_idx.max()) + 1)

        ax, ay = unit_vector(cam.pan_deg)
        cosang = np.clip(ax * hx[in_view] + ay * hy[in_view], -1.0, 1.0)
        a_deg = 180.0 - np.degrees(np.arccos(cosang))
        d_m = dist[in_view]
        n_raw = counts[tick_idx[in_view]]

        a_norm = np.where(a_deg > b.a_max, 0.0, 1.0 - np.minimum(a_deg, b.a_max) / b.a_max)
        d_norm = np.clip((d_m - b.d_min) / b.d_max, 0.0, 1.0)
        n_capped = np.minimum(n_raw, b.n_max)
        n_norm = n_capped / b.n_max
        if b.inverted_dn:
            d_norm = 1.0 - d_norm
            n_norm = 1.0 - n_norm
        p = w.w_a * a_norm + w.w_d * d_norm + w.w_n * n_norm

        np.fmax.at(maxima[:, ci], agent_idx[in_view], p)
        if cfg.record_samples:
            times_v = tick_idx[in_view] * dt
            aidx_v = agent_idx[in_view]
            for j in range(len(p)):
                samples_per_agent[aidx_v[j]].append(ObservationSample(
                    cam.id, float(times_v[j]), float(a_deg[j]), float(d_m[j]),
                    int(n_capped[j]), float(p[j])))
    if cfg.record_samples:
        for lst in samples_per_agent:
            lst.sort(key=lambda s: (s.time, s.camera_id))
    return maxima, samples_per_agent


def _stochastic_observations(cfg: SimConfig, agents: list[_SimAgent],
                             rng: np.random.Generator):
    """One draw of the three observation terms per suspect-camera pair."""
    cams = cfg.preset.cameras
    maxima = np.full((len(agents), len(cams)), np.nan)
    samples_per_agent: list[list[ObservationSample]] = [[] for _ in agents]
    for ai, a in enumerate(agents):
        if a.kind != AgentKind.SUSPECT:
            continue
        for ci, cam in enumerate(cams):
            if cfg.bernoulli_exceedance_p is not None:
                hit = rng.uniform() < cfg.bernoulli_exceedance_p
                s = ObservationSample(cam.id, a.spawn_time, 0.0, 0.0, 0,
                                      1.0 if hit else 0.0)
            else:
                a_deg = max(0.0, cfg.stochastic_a.sample(rng))
                d_m = max(0.0, cfg.stochastic_d.sample(rng))
                n = cfg.stochastic_n.sample(rng)
                s = ObservationSample(cam.id, a.spawn_time, a_deg, d_m, n,
                                      detection_probability(a_deg, d_m, n,
                                                            cfg.weights, cfg.bounds))
            maxima[ai, ci] = s.p
            if cfg.record_samples:
                samples_per_agent[ai].append(s)
    return maxima, samples_per_agent


def run_simulation(layout: StationLayout, cfg: SimConfig,
                   duration: float) -> SimOutput:
    """Run one seeded simulation of the given duration (seconds)."""
    if duration <= 0:
        raise ConfigError(f"duration must be positive, got {duration}")
    streams = _streams(cfg.seed)
    agents = _generate_agents(layout, cfg, duration, streams["arrivals"],
                              streams["routes"], streams["delays"],
                              streams["suspects"])
    gate_services, machine_services = _run_movement(layout, cfg, duration, agents)

    if cfg.mode == "geometric":
        maxima, samples = _geometric_observations(cfg, agents, duration)
    else:
        maxima, samples = _stochastic_observations(cfg, agents,
                                                   streams["observations"])

    cam_ids = [c.id for c in cfg.preset.cameras]
    trajectories = []
    for ai, a in enumerate(agents):
        per_cam = {cam_ids[ci]: float(maxima[ai, ci])
                   for ci in range(len(cam_ids)) if not np.isnan(maxima[ai, ci])}
        detected = trajectory_detected(list(per_cam.values()), cfg.threshold)
        trajectories.append(Trajectory(
            agent_id=a.id, kind=a.kind, scenario=a.scenario,
            period=cfg.period.label, spawn_time=a.spawn_time,
            depart_time=a.depart_time, per_camera_max_p=per_cam,
            detected=detected, samples=tuple(samples[ai])))

    departed = sum(1 for a in agents if a.depart_time is not None)
    counts = PassengerCounts(
        spawned=len(agents),
        spawned_entrance=sum(1 for a in agents
                             if a.kind == AgentKind.REGULAR and a.flow == "entrance"),
        spawned_exit_flow=sum(1 for a in agents if a.flow == "exit_flow"),
        spawned_suspects=sum(1 for a in agents if a.kind == AgentKind.SUSPECT),
        served=sum(1 for a in agents if a.served),
        departed=departed,
        in_transit=len(agents) - departed,
        gate_services=gate_services,
        machine_services=machine_services,
    )
    return SimOutput(
        trajectories=tuple(trajectories),
        passenger_counts=counts,
        rng_seed=cfg.seed,
        period=cfg.period.label,
        mode=cfg.mode,
        duration=float(duration),
    )
