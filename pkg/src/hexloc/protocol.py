"""Distributed anchor-driven localization over a connected network.

The mobile anchor first localizes one sensor by a random walk, then runs a
stack-guided depth-first tour: it drives the inscribed hexagon around the
sensor on top of the stack (localizing that sensor's neighbors), moves r/2
toward it, and asks it for the neighbor with the most non-localized
neighbors (NLN degree).  A positive answer is pushed and visited next; a
zero answer pops the stack and the anchor returns to the new top.  The
tour ends when the stack empties, at which point every sensor of a
connected network holds an estimate.

Simulation model: unit-disk communication of radius r for anchor and
sensors, instantaneous and lossless; the anchor moves at 1 m/s and
broadcasts every u metres while walking or driving a hexagon (transfer
legs are silent); control messages are instantaneous.  Everything is
deterministic given the seed, which only feeds the walk directions.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional

from .geom import (Circle, Lrh, Point2D, closest_point_on_circle, dist,
                   hexagon_perimeter_point, lrh_from_vertex, point_along,
                   polyline_length)
from .localizer import (BeaconPoint, BeaconRecord, CandidatePair,
                        LocalizationParams, best_schedule_match,
                        candidate_positions, largest_pair)

DEFAULT_WALK_BUDGET = 500


# ---------------------------------------------------------------------------
# network
# ---------------------------------------------------------------------------

@dataclass
class SensorNode:
    id: int
    true_position: Point2D
    neighbor_ids: frozenset[int]
    nln_degree: int
    estimated_position: Optional[Point2D] = None
    beacon_log: list[BeaconRecord] = field(default_factory=list)


@dataclass
class Network:
    sensors: list[SensorNode]
    r: float


def build_network(positions: list[Point2D], r: float) -> Network:
    """Unit-disk network over the given positions; must be connected."""
    if not positions:
        raise ValueError("network needs at least one sensor")
    if not r > 0:
        raise ValueError("communication range must be positive")
    n = len(positions)
    neighbors: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if dist(positions[i], positions[j]) <= r:
                neighbors[i].add(j)
                neighbors[j].add(i)
    # breadth-first reachability from sensor 0
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for j in neighbors[i]:
                if j not in seen:
                    seen.add(j)
                    nxt.append(j)
        frontier = nxt
    if len(seen) != n:
        raise ValueError("disconnected network")
    sensors = [SensorNode(id=i, true_position=positions[i],
                          neighbor_ids=frozenset(neighbors[i]),
                          nln_degree=len(neighbors[i]))
               for i in range(n)]
    return Network(sensors=sensors, r=r)


def edge_count(net: Network) -> int:
    return sum(len(s.neighbor_ids) for s in net.sensors) // 2


def path_length_bound(net: Network, bootstrap_allowance: float = 0.0) -> float:
    """Worst-case tour length 6r(|V|-1) + 2r(|E|-1) plus the walk allowance."""
    v = len(net.sensors)
    e = edge_count(net)
    return (6.0 * net.r * max(v - 1, 0) + 2.0 * net.r * max(e - 1, 0)
            + bootstrap_allowance)


# ---------------------------------------------------------------------------
# protocol messages and anchor state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Message:
    kind: str  # Beacon | PositionAnnounce | NlnRequest | NlnReply | NextDestination
    sender: object  # "anchor" or a sensor id
    payload: object


@dataclass(frozen=True)
class NlnReply:
    sender_id: int
    nln_degree: int
    position: Optional[Point2D]


@dataclass
class AnchorState:
    position: Point2D
    stack: list[int] = field(default_factory=list)
    mode: str = "bootstrap"
    path_trace: list[Point2D] = field(default_factory=list)
    current_lrh: Optional[Lrh] = None


def select_next_destination(sensor: SensorNode,
                            replies: list[NlnReply]) -> Optional[NlnReply]:
    """Reply with the largest NLN degree; ties go to the smallest id."""
    best: Optional[NlnReply] = None
    for rep in replies:
        if best is None or (rep.nln_degree, -rep.sender_id) > (best.nln_degree, -best.sender_id):
            best = rep
    return best


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

@dataclass
class LocalizationResult:
    estimates: dict[int, Point2D]
    errors: dict[int, float]
    path_trace: list[Point2D]
    total_path_length: float
    lrh_count: int
    events: list[tuple]
    bootstrap_id: int
    bootstrap_length: float
    sensor_count: int

    @property
    def localized_fraction(self) -> float:
        return len(self.estimates) / self.sensor_count


def events_to_csv(events: list[tuple]) -> str:
    lines = ["time,actor,event,payload"]
    for t, actor, ev, payload in events:
        lines.append(f"{t!r},{actor},{ev},{payload}")
    return "\n".join(lines) + "\n"


def trace_to_csv(trace: list[Point2D]) -> str:
    lines = ["x,y"]
    for p in trace:
        lines.append(f"{p.x!r},{p.y!r}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# simulation engine
# ---------------------------------------------------------------------------

class _Simulation:
    """Single-run state: one anchor, one network, one seed."""

    def __init__(self, net: Network, params: LocalizationParams,
                 anchor_start: Point2D, seed: int,
                 walk_budget: int = DEFAULT_WALK_BUDGET):
        if abs(net.r - params.r) > 1e-9 * net.r:
            raise ValueError("network range and parameters disagree")
        k = params.r / params.u
        if abs(k - round(k)) > 1e-9 * k or round(k) < 8:
            raise ValueError("invalid beacon spacing")
        self.net = net
        self.params = params
        self.rng = random.Random(seed)
        self.walk_budget = walk_budget
        self.anchor = AnchorState(position=anchor_start,
                                  path_trace=[anchor_start])
        self.clock = 0.0
        self.events: list[tuple] = []
        self.lrh_count = 0
        self.traversal_seq = 0
        # per traversal, per sensor: heard broadcasts as (arc index, time, position)
        self.records: dict[int, dict[int, list[tuple[int, float, Point2D]]]] = {}
        xs = [s.true_position.x for s in net.sensors] + [anchor_start.x]
        ys = [s.true_position.y for s in net.sensors] + [anchor_start.y]
        r = params.r
        self.bbox = (min(xs) - r, min(ys) - r, max(xs) + r, max(ys) + r)
        self.bootstrap_length = 0.0
        self.bootstrap_id: Optional[int] = None

    # -- logging ------------------------------------------------------------

    def log(self, actor, event: str, payload: str = ""):
        self.events.append((self.clock, actor, event, payload))

    # -- movement -----------------------------------------------------------

    def move_to(self, target: Point2D, mode: str):
        d = dist(self.anchor.position, target)
        if d > 0:
            self.clock += d  # 1 m/s, silent leg
            self.anchor.position = target
            self.anchor.path_trace.append(target)
        self.anchor.mode = mode
        self.log("anchor", "move", f"{mode};{target.x!r};{target.y!r}")

    # -- radio --------------------------------------------------------------

    def broadcast(self, pos: Point2D, traversal_id: int, arc_idx: int,
                  lrh: Optional[Lrh]):
        per_sensor = self.records.setdefault(traversal_id, {})
        for s in self.net.sensors:
            if dist(s.true_position, pos) <= self.params.r:
                per_sensor.setdefault(s.id, []).append((arc_idx, self.clock, pos))
                s.beacon_log.append(BeaconRecord(self.clock, pos, lrh))

    def announce(self, sensor: SensorNode):
        """Localized sensor broadcasts its estimate; neighbors update NLN."""
        for j in sorted(sensor.neighbor_ids):
            self.net.sensors[j].nln_degree -= 1
        self.log(sensor.id, "announce",
                 f"{sensor.estimated_position.x!r};{sensor.estimated_position.y!r}")

    # -- bootstrap walk -----------------------------------------------------

    def _walk_segment(self, start: Point2D, angle: float,
                      length: float) -> list[Point2D]:
        """Straight segment of the walk, reflected at the bounding box."""
        x0, y0, x1, y1 = self.bbox
        px, py = start.x, start.y
        dx, dy = math.cos(angle), math.sin(angle)
        corners = [start]
        remaining = length
        for _ in range(64):
            if remaining <= 0:
                break
            hits = []
            if dx > 1e-15:
                hits.append(((x1 - px) / dx, "x"))
            elif dx < -1e-15:
                hits.append(((x0 - px) / dx, "x"))
            if dy > 1e-15:
                hits.append(((y1 - py) / dy, "y"))
            elif dy < -1e-15:
                hits.append(((y0 - py) / dy, "y"))
            step = min((h for h in hits), default=(remaining, ""))
            travel = min(step[0], remaining)
            px, py = px + dx * travel, py + dy * travel
            corners.append(Point2D(px, py))
            remaining -= travel
            if travel == step[0] and step[1] == "x":
                dx = -dx
            elif travel == step[0] and step[1] == "y":
                dy = -dy
        return corners

    def _confirmed_walk_beacon_points(self, sensor_id: int,
                                      now: float) -> list[BeaconPoint]:
        """Beacon points of the walk whose silence gaps are already known.

        A trailing record only qualifies once t0 has passed without a
        newer reception, so the extraction never changes its mind later.
        """
        recs = self.records.get(0, {}).get(sensor_id, [])
        t0 = self.params.t0
        points = []
        for i, (seq, t, pos) in enumerate(recs):
            gap_before = i == 0 or t - recs[i - 1][1] > t0
            if i < len(recs) - 1:
                gap_after = recs[i + 1][1] - t > t0
            else:
                gap_after = now - t > t0
            if seq == 0:
                # walk start: only the missing next broadcast pins it to
                # the annulus, the silence before says nothing
                gap_before = False
            if gap_before:
                points.append(BeaconPoint(pos, t, "gap-before"))
            elif gap_after:
                points.append(BeaconPoint(pos, t, "gap-after"))
        return points

    def _try_bootstrap_fix(self, sensor: SensorNode, now: float) -> bool:
        """Localize from three walk beacon points if they discriminate."""
        r, u = self.params.r, self.params.u
        bps = self._confirmed_walk_beacon_points(sensor.id, now)
        if len(bps) < 3:
            return False
        c1, c2, l = largest_pair(bps)
        if l < (r - u) or l > 2.0 * r:
            return False
        # third point: farthest from the pair line, for a stable side test
        ax, ay = c1.position.x, c1.position.y
        ux, uy = (c2.position.x - ax) / l, (c2.position.y - ay) / l
        third, perp = None, 0.0
        for bp in bps:
            if bp is c1 or bp is c2:
                continue
            d = abs(-uy * (bp.position.x - ax) + ux * (bp.position.y - ay))
            if d > perp:
                third, perp = bp, d
        if third is None or perp < 1e-6 * r:
            return False  # collinear, keep walking
        pair = candidate_positions(c1.position, c2.position, self.params)
        m_q = abs(dist(pair.q, third.position) - r)
        m_m = abs(dist(pair.q_mirror, third.position) - r)
        if abs(m_q - m_m) <= u:
            return False  # third point does not discriminate yet
        sensor.estimated_position = pair.q if m_q < m_m else pair.q_mirror
        return True

    def run_bootstrap(self) -> int:
        """Random walk until one sensor self-localizes; returns its id."""
        self.anchor.mode = "bootstrap"
        self.log("anchor", "bootstrap-start", "")
        r, u = self.params.r, self.params.u
        seq = 0
        carry = 0.0  # distance until the next broadcast along the walk
        self.broadcast(self.anchor.position, 0, seq, None)
        walk_start_idx = len(self.anchor.path_trace) - 1
        for _ in range(self.walk_budget):
            angle = self.rng.uniform(0.0, 2.0 * math.pi)
            corners = self._walk_segment(self.anchor.position, angle, 2.0 * r)
            for nxt in corners[1:]:
                seg = dist(self.anchor.position, nxt)
                done = 0.0
                while carry + (seg - done) >= u:
                    step = u - carry
                    pos = point_along(self.anchor.position, nxt, done + step)
                    done += step
                    carry = 0.0
                    self.clock += step
                    seq += 1
                    self.broadcast(pos, 0, seq, None)
                    for s in self.net.sensors:
                        if s.estimated_position is None and \
                                self._try_bootstrap_fix(s, self.clock):
                            # cut the walk at the current anchor position
                            self.clock += 0.0
                            self.anchor.position = pos
                            self.anchor.path_trace.append(pos)
                            self.bootstrap_length = polyline_length(
                                self.anchor.path_trace[walk_start_idx:])
                            self.bootstrap_id = s.id
                            self.log("anchor", "bootstrap-end", f"sensor={s.id}")
                            self.announce(s)
                            return s.id
                carry += seg - done
                self.clock += seg - done
                self.anchor.position = nxt
                self.anchor.path_trace.append(nxt)
        raise ValueError("bootstrap failed")

    # -- hexagon traversal ----------------------------------------------------

    def traverse_lrh(self, center_id: int) -> None:
        params = self.params
        r, u = params.r, params.u
        center = self.net.sensors[center_id]
        est = center.estimated_position
        vertex = closest_point_on_circle(Circle(est, r), self.anchor.position)
        self.move_to(vertex, "approach")
        lrh = lrh_from_vertex(est, vertex)
        self.anchor.current_lrh = lrh
        self.anchor.mode = "lrh-traversal"
        self.traversal_seq += 1
        tid = self.traversal_seq
        self.log("anchor", "lrh-start", f"center={center_id};traversal={tid}")
        self.clock += params.t0  # planning pause keeps gap semantics clean
        n_arcs = round(6.0 * r / u) + 1
        start_time = self.clock
        for k in range(n_arcs):
            arc = k * u
            pos = hexagon_perimeter_point(lrh, arc)
            self.clock = start_time + arc
            self.broadcast(pos, tid, k, lrh)
        for v in lrh.vertices[1:]:
            self.anchor.path_trace.append(v)
        self.anchor.path_trace.append(lrh.vertices[0])
        self.anchor.position = lrh.vertices[0]
        self.lrh_count += 1
        self.log("anchor", "lrh-end", f"center={center_id};traversal={tid}")
        self._localize_from_traversal(center, tid, lrh, n_arcs)
        self.anchor.current_lrh = None

    def _traversal_beacon_points(self, recs: list[tuple[int, float, Point2D]],
                                 last_arc: int) -> list[BeaconPoint]:
        """Gap rule over one traversal's receptions.

        Legs before and after a traversal are silent for longer than t0,
        so the first and last receptions qualify on their outer side; a
        two-arc hole inside means a missed broadcast, i.e. a real gap.
        The broadcasts at arc 0 and at the closing arc are where the
        anchor started and stopped, not boundary crossings; they count
        only when the neighbouring broadcast u away was missed, which
        pins the sensor to the r-u..r annulus anyway.
        """
        points = []
        for i, (arc, t, pos) in enumerate(recs):
            gap_before = i == 0 or arc - recs[i - 1][0] >= 2
            gap_after = i == len(recs) - 1 or recs[i + 1][0] - arc >= 2
            if arc == 0:
                gap_before, ok = False, gap_after
            elif arc == last_arc:
                gap_after, ok = False, gap_before
            else:
                ok = gap_before or gap_after
            if ok:
                kind = "gap-before" if gap_before else "gap-after"
                points.append(BeaconPoint(pos, t, kind))
        return points

    def _localize_from_traversal(self, center: SensorNode, tid: int,
                                 lrh: Lrh, n_arcs: int) -> None:
        """Neighbors of the traversed sensor compute their positions.

        A sensor only trusts a traversal around a sensor whose position
        announcement it heard (its neighbor); everything it needs - the
        hexagon, the schedule, its own receptions - is then local.
        """
        r, u = self.params.r, self.params.u
        per_sensor = self.records.get(tid, {})
        schedule = [hexagon_perimeter_point(lrh, k * u) for k in range(n_arcs - 1)]
        for j in sorted(center.neighbor_ids):
            sensor = self.net.sensors[j]
            if sensor.estimated_position is not None:
                continue
            recs = per_sensor.get(j, [])
            if not recs:
                continue
            bps = self._traversal_beacon_points(recs, n_arcs - 1)
            if len(bps) < 2:
                continue
            c1, c2, l = largest_pair(bps)
            if l < (r - u) * (1.0 - 1e-12):
                continue  # pair too narrow for the error guarantee
            pair = candidate_positions(c1.position, c2.position, self.params)
            received = {pos for (_, _, pos) in recs}
            est = best_schedule_match(pair, received, schedule, r, lrh.center)
            sensor.estimated_position = est
            self.log(j, "localized", f"traversal={tid};x={est.x!r};y={est.y!r}")
            self.announce(sensor)

    # -- destination queries --------------------------------------------------

    def request_next(self, top_id: int) -> Optional[NlnReply]:
        top = self.net.sensors[top_id]
        self.anchor.mode = "await-destination"
        self.log("anchor", "request", f"top={top_id}")
        replies = []
        for j in sorted(top.neighbor_ids):
            nb = self.net.sensors[j]
            replies.append(NlnReply(sender_id=j, nln_degree=nb.nln_degree,
                                    position=nb.estimated_position))
        sel = select_next_destination(top, replies)
        if sel is None:
            self.log(top_id, "reply", "none")
        else:
            self.log(top_id, "reply", f"next={sel.sender_id};nln={sel.nln_degree}")
        return sel

    # -- main loop --------------------------------------------------------------

    def run(self) -> LocalizationResult:
        r = self.params.r
        boot_id = self.run_bootstrap()
        self.anchor.stack.append(boot_id)
        self.log("anchor", "push", f"sensor={boot_id}")
        needs_traversal = True
        while self.anchor.stack:
            top_id = self.anchor.stack[-1]
            top = self.net.sensors[top_id]
            if needs_traversal:
                self.traverse_lrh(top_id)
                # move r/2 toward the sensor to guarantee being in its range
                target = point_along(self.anchor.position,
                                     top.estimated_position, r / 2.0)
                self.move_to(target, "transit")
                needs_traversal = False
            sel = self.request_next(top_id)
            if sel is not None and sel.nln_degree > 0 and sel.position is not None:
                self.anchor.stack.append(sel.sender_id)
                self.log("anchor", "push", f"sensor={sel.sender_id}")
                needs_traversal = True
            else:
                self.anchor.stack.pop()
                self.log("anchor", "pop", f"sensor={top_id}")
                if self.anchor.stack:
                    new_top = self.net.sensors[self.anchor.stack[-1]]
                    est = new_top.estimated_position
                    if dist(self.anchor.position, est) > r / 2.0:
                        target = closest_point_on_circle(
                            Circle(est, r / 2.0), self.anchor.position)
                        self.move_to(target, "transit")
        self.anchor.mode = "done"
        self.log("anchor", "done", f"lrh_count={self.lrh_count}")

        estimates = {s.id: s.estimated_position for s in self.net.sensors
                     if s.estimated_position is not None}
        errors = {i: dist(est, self.net.sensors[i].true_position)
                  for i, est in estimates.items()}
        return LocalizationResult(
            estimates=estimates,
            errors=errors,
            path_trace=list(self.anchor.path_trace),
            total_path_length=polyline_length(self.anchor.path_trace),
            lrh_count=self.lrh_count,
            events=self.events,
            bootstrap_id=boot_id,
            bootstrap_length=self.bootstrap_length,
            sensor_count=len(self.net.sensors),
        )


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------

def run_localization(net: Network, params: LocalizationParams,
                     anchor_start: Point2D, seed: int,
                     walk_budget: int = DEFAULT_WALK_BUDGET) -> LocalizationResult:
    """Execute the full tour; every sensor is localized on return."""
    return _Simulation(net, params, anchor_start, seed, walk_budget).run()


def bootstrap_localize(net: Network, params: LocalizationParams,
                       anchor_start: Point2D, seed: int,
                       walk_budget: int = DEFAULT_WALK_BUDGET
                       ) -> tuple[int, Point2D, list[Point2D]]:
    """Run only the random-walk phase.

    Returns the id of the first self-localized sensor, the anchor's end
    position and the walk polyline.  Raises ValueError("bootstrap failed")
    when the segment budget runs out first.
    """
    sim = _Simulation(net, params, anchor_start, seed, walk_budget)
    sensor_id = sim.run_bootstrap()
    return sensor_id, sim.anchor.position, list(sim.anchor.path_trace)
