"""Planning domains: grid-maze navigation and blocks stacking.

States are plain hashable values: a maze state is a ``(row, col)`` tuple,
a blocks state is a tuple of stacks, each stack a bottom-to-top tuple of
block labels, with stacks sorted by their bottom block so equal
configurations compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

MAZE_ACTIONS = ("up", "down", "left", "right")

# up decreases the row index (screen order)
_MAZE_DELTAS = {
    "up": (-1, 0),
    "down": (1, 0),
    "left": (0, -1),
    "right": (0, 1),
}

_OPPOSITE = {"up": "down", "down": "up", "left": "right", "right": "left"}

TABLE = "table"


@dataclass(frozen=True)
class MazeGrid:
    rows: int
    cols: int
    obstacles: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise ValueError("grid dimensions must be positive")
        for (r, c) in self.obstacles:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise ValueError(f"obstacle {(r, c)} out of bounds")

    def in_bounds(self, state):
        r, c = state
        return 0 <= r < self.rows and 0 <= c < self.cols

    def free_cells(self):
        return [
            (r, c)
            for r in range(self.rows)
            for c in range(self.cols)
            if (r, c) not in self.obstacles
        ]


@dataclass(frozen=True)
class PlanningProblem:
    domain: str  # "maze" | "blocks"
    start: object
    goal: object
    grid: MazeGrid | None = None
    blocks: tuple = ()  # block universe, sorted labels (blocks domain)
    gold_plan: tuple | None = None
    optimal_length: int | None = None
    problem_id: str = ""
    split: str = ""

    def __post_init__(self):
        if self.domain not in ("maze", "blocks"):
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.domain == "maze":
            if self.grid is None:
                raise ValueError("maze problem needs a grid")
            for name, s in (("start", self.start), ("goal", self.goal)):
                if not self.grid.in_bounds(s):
                    raise ValueError(f"{name} {s} out of bounds")
                if s in self.grid.obstacles:
                    raise ValueError(f"{name} {s} is an obstacle")
        else:
            for name, s in (("start", self.start), ("goal", self.goal)):
                labels = sorted(b for stack in s for b in stack)
                if labels != sorted(self.blocks):
                    raise ValueError(f"{name} does not use the block universe exactly once each")


def opposite_action(action):
    return _OPPOSITE[action]


def canonical_blocks(stacks):
    """Drop empty stacks and sort by bottom block label."""
    return tuple(sorted((tuple(s) for s in stacks if s), key=lambda s: s[0]))


def maze_step(grid, state, action):
    """Apply a maze action. Returns (next_state, None) or (None, reason)."""
    dr, dc = _MAZE_DELTAS[action]
    nxt = (state[0] + dr, state[1] + dc)
    if not grid.in_bounds(nxt):
        return None, "out-of-bounds"
    if nxt in grid.obstacles:
        return None, "obstacle"
    return nxt, None


def blocks_step(state, action):
    """Move a clear block onto the table or onto another clear block.

    Returns (next_state, None) or (None, reason) with reason one of
    block-not-clear | destination-not-clear | destination-missing | self-move.
    """
    block, dest = action
    tops = {s[-1]: i for i, s in enumerate(state)}
    if block == dest:
        return None, "self-move"
    src = None
    for i, s in enumerate(state):
        if block in s:
            src = i
            break
    if src is None:
        raise ValueError(f"unknown block {block!r}")
    if state[src][-1] != block:
        return None, "block-not-clear"
    if dest == TABLE:
        if len(state[src]) == 1:
            # already on the table; moving it there changes nothing
            return None, "self-move"
        new = [list(s) for s in state]
        new[src].pop()
        new.append([block])
        return canonical_blocks(new), None
    if not any(dest in s for s in state):
        return None, "destination-missing"
    if dest not in tops:
        return None, "destination-not-clear"
    new = [list(s) for s in state]
    new[src].pop()
    new[tops[dest]].append(block)
    return canonical_blocks(new), None


def step(problem, state, action):
    if problem.domain == "maze":
        return maze_step(problem.grid, state, action)
    return blocks_step(state, action)


def candidate_actions(problem, state):
    """All actions probed during search, in canonical order (including
    ones that will turn out invalid)."""
    if problem.domain == "maze":
        return list(MAZE_ACTIONS)
    dests = sorted(problem.blocks) + [TABLE]
    return [(b, d) for b in sorted(problem.blocks) for d in dests if d != b]


def valid_actions(problem, state):
    """Actions whose step result is valid, in canonical order."""
    out = []
    for a in candidate_actions(problem, state):
        nxt, _ = step(problem, state, a)
        if nxt is not None:
            out.append(a)
    return out


def validate_plan(problem, plan):
    """Execute the plan from the start state.

    Returns (True, None) when every transition is legal and the final
    state equals the goal, else (False, failing_step_index) with steps
    counted from 1; a goal mismatch at the end reports index len(plan).
    An empty plan is valid iff start == goal.
    """
    state = problem.start
    for i, action in enumerate(plan):
        nxt, _ = step(problem, state, action)
        if nxt is None:
            return False, i + 1
        state = nxt
    if state != problem.goal:
        return False, max(len(plan), 1)
    return True, None


def plan_states(problem, plan):
    """State sequence s0..sn traversed by a plan (must be valid steps)."""
    states = [problem.start]
    for action in plan:
        nxt, reason = step(problem, states[-1], action)
        if nxt is None:
            raise ValueError(f"illegal step {action!r}: {reason}")
        states.append(nxt)
    return states


def render_maze(problem):
    """Text rendering: '.' free, '#' obstacle, 'S' start, 'G' goal."""
    grid = problem.grid
    rows = []
    for r in range(grid.rows):
        row = []
        for c in range(grid.cols):
            if (r, c) == problem.start:
                row.append("S")
            elif (r, c) == problem.goal:
                row.append("G")
            elif (r, c) in grid.obstacles:
                row.append("#")
            else:
                row.append(".")
        rows.append("".join(row))
    return "\n".join(rows)
