"""Deliberate search planners (A*, BFS, DFS) with full exploration traces.

Every probe made while expanding a state is logged as an ExplorationEvent,
including invalid ones (out-of-bounds, obstacle, precondition failure,
already-visited), so that a run's states-explored count covers both valid
and invalid explorations. Runs can be truncated afterwards to a state
budget: a truncated run keeps its plan only if the goal was discovered
within the budget.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, replace

from .domains import candidate_actions, step

VALID = "valid"
INVALID = "invalid"


@dataclass(frozen=True)
class TraceConfig:
    """Recording options for a search run.

    valid_cap / invalid_cap limit how many valid / invalid probes get
    recorded per expansion (the blocks-domain verbalization cap); capped
    probes still enter the frontier. seed drives the random choice of
    which invalid probes to keep.
    """

    valid_cap: int | None = None
    invalid_cap: int | None = None
    seed: int = 0


@dataclass(frozen=True)
class ExplorationEvent:
    index: int
    state: object  # probed successor; None when the probe has no legal result
    parent: int | None  # event index that introduced the parent state; None for start
    parent_state: object
    action: object
    validity: str  # "valid" | "invalid"
    reason: str | None = None
    g: int | None = None
    t: int | None = None
    f: int | None = None


@dataclass(frozen=True)
class SearchRun:
    problem: object
    algorithm: str  # "astar" | "bfs" | "dfs"
    events: tuple
    plan: tuple | None
    events_at_goal: int | None  # recorded-event count when the goal was found

    @property
    def states_explored(self):
        return len(self.events)


def manhattan(a, b):
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def _below_map(state):
    below = {}
    for stack in state:
        prev = None
        for block in stack:
            below[block] = prev  # None means table
            prev = block
    return below


def blocks_mismatch(a, b):
    """Number of blocks whose supporting block (or table) differs."""
    ba, bb = _below_map(a), _below_map(b)
    return sum(1 for block in ba if ba[block] != bb.get(block, None))


def heuristic_for(problem):
    if problem.domain == "maze":
        return manhattan
    return blocks_mismatch


def _reconstruct(came_from, state, start):
    actions = []
    while state != start:
        parent, action = came_from[state]
        actions.append(action)
        state = parent
    actions.reverse()
    return tuple(actions)


class _Recorder:
    """Buffers one expansion's probes and applies the recording caps."""

    def __init__(self, config):
        self.config = config
        self.rng = random.Random(config.seed)
        self.events = []
        self.state_event = {}  # state -> event index that introduced it

    def flush(self, probes):
        """probes: list of dicts with keys matching ExplorationEvent fields."""
        valid = [p for p in probes if p["validity"] == VALID]
        invalid = [p for p in probes if p["validity"] == INVALID]
        if self.config.valid_cap is not None and len(valid) > self.config.valid_cap:
            valid = sorted(valid, key=lambda p: (p["t"] if p["t"] is not None else 0))
            valid = valid[: self.config.valid_cap]
        if self.config.invalid_cap is not None and len(invalid) > self.config.invalid_cap:
            invalid = self.rng.sample(invalid, self.config.invalid_cap)
        keep = set(map(id, valid)) | set(map(id, invalid))
        for p in probes:
            if id(p) not in keep:
                continue
            idx = len(self.events)
            event = ExplorationEvent(index=idx, **p)
            self.events.append(event)
            if event.validity == VALID and event.state not in self.state_event:
                self.state_event[event.state] = idx


def astar(problem, config=TraceConfig()):
    """A* with unit edge costs; frontier ordered by f, ties by lower
    heuristic then insertion order. Terminates once the goal is generated
    (optimal under the admissible, consistent domain heuristics)."""
    h = heuristic_for(problem)
    start, goal = problem.start, problem.goal
    if start == goal:
        return SearchRun(problem, "astar", (), (), 0)
    rec = _Recorder(config)
    g_score = {start: 0}
    came_from = {}
    counter = 0
    frontier = [(h(start, goal), h(start, goal), counter, start)]
    closed = set()
    while frontier:
        _, _, _, current = heapq.heappop(frontier)
        if current in closed:
            continue
        closed.add(current)
        parent_idx = rec.state_event.get(current)
        probes = []
        goal_found = False
        for action in candidate_actions(problem, current):
            nxt, reason = step(problem, current, action)
            if nxt is None:
                probes.append(dict(state=None, parent=parent_idx, parent_state=current,
                                   action=action, validity=INVALID, reason=reason))
                continue
            tentative = g_score[current] + 1
            if nxt in g_score:
                probes.append(dict(state=nxt, parent=parent_idx, parent_state=current,
                                   action=action, validity=INVALID, reason="already-visited"))
                if tentative < g_score[nxt] and nxt not in closed:
                    g_score[nxt] = tentative
                    came_from[nxt] = (current, action)
                    counter += 1
                    t = h(nxt, goal)
                    heapq.heappush(frontier, (tentative + t, t, counter, nxt))
                continue
            g_score[nxt] = tentative
            came_from[nxt] = (current, action)
            t = h(nxt, goal)
            probes.append(dict(state=nxt, parent=parent_idx, parent_state=current,
                               action=action, validity=VALID, reason=None,
                               g=tentative, t=t, f=tentative + t))
            if nxt == goal:
                goal_found = True
            else:
                counter += 1
                heapq.heappush(frontier, (tentative + t, t, counter, nxt))
        rec.flush(probes)
        if goal_found:
            plan = _reconstruct(came_from, goal, start)
            return SearchRun(problem, "astar", tuple(rec.events), plan, len(rec.events))
    return SearchRun(problem, "astar", tuple(rec.events), None, None)


def bfs(problem, config=TraceConfig()):
    """Breadth-first search with a FIFO frontier; optimal in these
    unit-cost domains."""
    start, goal = problem.start, problem.goal
    if start == goal:
        return SearchRun(problem, "bfs", (), (), 0)
    rec = _Recorder(config)
    depth = {start: 0}
    came_from = {}
    queue = [start]
    head = 0
    while head < len(queue):
        current = queue[head]
        head += 1
        parent_idx = rec.state_event.get(current)
        probes = []
        goal_found = False
        for action in candidate_actions(problem, current):
            nxt, reason = step(problem, current, action)
            if nxt is None:
                probes.append(dict(state=None, parent=parent_idx, parent_state=current,
                                   action=action, validity=INVALID, reason=reason))
                continue
            if nxt in depth:
                probes.append(dict(state=nxt, parent=parent_idx, parent_state=current,
                                   action=action, validity=INVALID, reason="already-visited"))
                continue
            depth[nxt] = depth[current] + 1
            came_from[nxt] = (current, action)
            probes.append(dict(state=nxt, parent=parent_idx, parent_state=current,
                               action=action, validity=VALID, reason=None, g=depth[nxt]))
            if nxt == goal:
                goal_found = True
            else:
                queue.append(nxt)
        rec.flush(probes)
        if goal_found:
            plan = _reconstruct(came_from, goal, start)
            return SearchRun(problem, "bfs", tuple(rec.events), plan, len(rec.events))
    return SearchRun(problem, "bfs", tuple(rec.events), None, None)


def dfs(problem, config=TraceConfig()):
    """Depth-first search with an explicit stack; successors are pushed in
    reverse canonical order so the first canonical action is explored
    first. Returns the first plan found, not necessarily optimal."""
    start, goal = problem.start, problem.goal
    if start == goal:
        return SearchRun(problem, "dfs", (), (), 0)
    rec = _Recorder(config)
    seen = {start}
    came_from = {}
    depth = {start: 0}
    stack = [start]
    while stack:
        current = stack.pop()
        parent_idx = rec.state_event.get(current)
        probes = []
        children = []
        goal_found = False
        for action in candidate_actions(problem, current):
            nxt, reason = step(problem, current, action)
            if nxt is None:
                probes.append(dict(state=None, parent=parent_idx, parent_state=current,
                                   action=action, validity=INVALID, reason=reason))
                continue
            if nxt in seen:
                probes.append(dict(state=nxt, parent=parent_idx, parent_state=current,
                                   action=action, validity=INVALID, reason="already-visited"))
                continue
            seen.add(nxt)
            depth[nxt] = depth[current] + 1
            came_from[nxt] = (current, action)
            probes.append(dict(state=nxt, parent=parent_idx, parent_state=current,
                               action=action, validity=VALID, reason=None, g=depth[nxt]))
            if nxt == goal:
                goal_found = True
            else:
                children.append(nxt)
        rec.flush(probes)
        if goal_found:
            plan = _reconstruct(came_from, goal, start)
            return SearchRun(problem, "dfs", tuple(rec.events), plan, len(rec.events))
        stack.extend(reversed(children))
    return SearchRun(problem, "dfs", tuple(rec.events), None, None)


ENGINES = {"astar": astar, "bfs": bfs, "dfs": dfs}


def run_engine(name, problem, config=TraceConfig()):
    try:
        engine = ENGINES[name]
    except KeyError:
        raise ValueError(f"unknown engine {name!r}") from None
    return engine(problem, config)


def truncate_run(run, cap):
    """Cut a run after `cap` recorded events. The plan survives only if the
    goal had been discovered within the first `cap` events."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if cap >= len(run.events):
        return run
    reached = run.events_at_goal is not None and run.events_at_goal <= cap
    return replace(
        run,
        events=run.events[:cap],
        plan=run.plan if reached else None,
        events_at_goal=run.events_at_goal if reached else None,
    )


def render_trace(run):
    """Compact one-event-per-line debugging view."""
    lines = []
    for e in run.events:
        scores = ""
        if e.g is not None:
            scores = f" g={e.g}"
            if e.t is not None:
                scores += f" t={e.t} f={e.f}"
        tag = VALID if e.validity == VALID else f"invalid:{e.reason}"
        lines.append(f"{e.index}: {e.parent_state} --{e.action}--> {e.state} [{tag}]{scores}")
    lines.append(f"plan: {list(run.plan) if run.plan is not None else 'failure'}")
    return "\n".join(lines)
