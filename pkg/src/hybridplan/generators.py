"""Seeded problem-set generators for both domains.

Mazes: 5x5 grids with a fixed obstacle count, balanced so every optimal
plan length bucket holds an equal share per split. Blocks: random stack
configurations of 4-7 blocks, split by optimal plan length so the test
split is strictly longer-horizon than train/val.

The oracles used here (plain BFS for mazes, a lean A* for blocks) are
kept separate from the trace-recording engines in search.py so generated
optimal lengths can serve as an independent check on those engines.
"""

from __future__ import annotations

import heapq
import random
import string
from collections import deque
from dataclasses import dataclass

from .domains import (
    MAZE_ACTIONS,
    MazeGrid,
    PlanningProblem,
    blocks_step,
    canonical_blocks,
    maze_step,
    valid_actions,
)
from .search import blocks_mismatch


class GenerationExhausted(Exception):
    """Raised when a bucket cannot be filled within the attempt limit."""


@dataclass(frozen=True)
class MazeDatasetConfig:
    rows: int = 5
    cols: int = 5
    obstacle_fraction: float = 0.4
    min_length: int = 1
    max_length: int = 8
    split_sizes: tuple = (3200, 400, 400)  # train / val / test
    max_attempts: int = 2_000_000

    @property
    def obstacle_count(self):
        return int(self.obstacle_fraction * self.rows * self.cols)


@dataclass(frozen=True)
class BlocksDatasetConfig:
    min_blocks: int = 4
    max_blocks: int = 7
    split_sizes: tuple = (3000, 250, 200)
    train_lengths: tuple = (1, 6)  # also val
    test_lengths: tuple = (7, 10)
    max_attempts: int = 2_000_000


SPLITS = ("train", "val", "test")


def maze_distances(grid, start):
    """BFS distances and parents from start over free cells."""
    dist = {start: 0}
    parent = {}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        for action in MAZE_ACTIONS:
            nxt, _ = maze_step(grid, cur, action)
            if nxt is not None and nxt not in dist:
                dist[nxt] = dist[cur] + 1
                parent[nxt] = (cur, action)
                queue.append(nxt)
    return dist, parent


def _extract_plan(parent, start, goal):
    actions = []
    cur = goal
    while cur != start:
        cur, action = parent[cur]
        actions.append(action)
    actions.reverse()
    return tuple(actions)


def generate_maze_dataset(seed, config=MazeDatasetConfig()):
    """Returns {split: [PlanningProblem]} balanced over plan lengths."""
    rng = random.Random(seed)
    lengths = range(config.min_length, config.max_length + 1)
    n_lengths = len(lengths)
    for size in config.split_sizes:
        if size % n_lengths != 0:
            raise ValueError("split sizes must divide evenly across length buckets")
    quota = {
        (split, length): size // n_lengths
        for split, size in zip(SPLITS, config.split_sizes)
        for length in lengths
    }
    cells = [(r, c) for r in range(config.rows) for c in range(config.cols)]
    out = {split: [] for split in SPLITS}
    attempts = 0
    while any(quota.values()):
        attempts += 1
        if attempts > config.max_attempts:
            missing = {k: v for k, v in quota.items() if v}
            raise GenerationExhausted(f"unfilled maze buckets after {attempts - 1} attempts: {missing}")
        obstacles = frozenset(rng.sample(cells, config.obstacle_count))
        grid = MazeGrid(config.rows, config.cols, obstacles)
        free = grid.free_cells()
        start = rng.choice(free)
        dist, parent = maze_distances(grid, start)
        candidates = [
            (goal, d)
            for goal, d in dist.items()
            if config.min_length <= d <= config.max_length
        ]
        rng.shuffle(candidates)
        for goal, length in candidates:
            open_splits = [s for s in SPLITS if quota[(s, length)] > 0]
            if not open_splits:
                continue
            # fill the neediest split first so buckets close together
            split = max(open_splits, key=lambda s: (quota[(s, length)], -SPLITS.index(s)))
            quota[(split, length)] -= 1
            plan = _extract_plan(parent, start, goal)
            out[split].append(
                PlanningProblem(
                    domain="maze", start=start, goal=goal, grid=grid,
                    gold_plan=plan, optimal_length=length, split=split,
                )
            )
            break  # one problem per sampled grid keeps grids varied
    for split in SPLITS:
        rng.shuffle(out[split])
        out[split] = [
            _with_id(p, f"maze-{split}-{i:05d}") for i, p in enumerate(out[split])
        ]
    return out


def _with_id(problem, problem_id):
    from dataclasses import replace

    return replace(problem, problem_id=problem_id)


def random_blocks_state(rng, blocks):
    """Random stack configuration: blocks placed one by one, each going
    onto a uniformly chosen existing stack or a new one."""
    order = list(blocks)
    rng.shuffle(order)
    stacks = []
    for block in order:
        slot = rng.randrange(len(stacks) + 1)
        if slot == len(stacks):
            stacks.append([block])
        else:
            stacks[slot].append(block)
    return canonical_blocks(stacks)


def blocks_optimal_plan(problem, max_expansions=None):
    """Lean A* (mismatch heuristic, admissible and consistent) returning an
    optimal plan, or None when unreachable."""
    start, goal = problem.start, problem.goal
    if start == goal:
        return ()
    g_score = {start: 0}
    came_from = {}
    counter = 0
    frontier = [(blocks_mismatch(start, goal), counter, start)]
    closed = set()
    expansions = 0
    while frontier:
        _, _, current = heapq.heappop(frontier)
        if current in closed:
            continue
        closed.add(current)
        expansions += 1
        if max_expansions is not None and expansions > max_expansions:
            return None
        for action in valid_actions(problem, current):
            nxt, _ = blocks_step(current, action)
            tentative = g_score[current] + 1
            if nxt in g_score and tentative >= g_score[nxt]:
                continue
            g_score[nxt] = tentative
            came_from[nxt] = (current, action)
            if nxt == goal:
                actions = []
                cur = goal
                while cur != start:
                    cur, act = came_from[cur]
                    actions.append(act)
                actions.reverse()
                return tuple(actions)
            counter += 1
            heapq.heappush(frontier, (tentative + blocks_mismatch(nxt, goal), counter, nxt))
    return None


def generate_blocks_dataset(seed, config=BlocksDatasetConfig()):
    """Returns {split: [PlanningProblem]} with train/val in the short
    length band and test in the long one; duplicate (start, goal) pairs
    are dropped."""
    rng = random.Random(seed)
    remaining = dict(zip(SPLITS, config.split_sizes))
    out = {split: [] for split in SPLITS}
    seen = set()
    attempts = 0
    while any(remaining.values()):
        attempts += 1
        if attempts > config.max_attempts:
            raise GenerationExhausted(f"unfilled blocks splits after {attempts - 1} attempts: {remaining}")
        short_open = remaining["train"] > 0 or remaining["val"] > 0
        if short_open:
            n = rng.randint(config.min_blocks, config.max_blocks)
        else:
            # long-horizon pairs come almost exclusively from big universes
            n = rng.randint(max(config.min_blocks, config.max_blocks - 1), config.max_blocks)
        blocks = tuple(string.ascii_uppercase[:n])
        start = random_blocks_state(rng, blocks)
        goal = random_blocks_state(rng, blocks)
        if start == goal:
            continue
        key = (start, goal)
        if key in seen:
            continue
        problem = PlanningProblem(domain="blocks", start=start, goal=goal, blocks=blocks)
        plan = blocks_optimal_plan(problem)
        length = len(plan)
        lo, hi = config.train_lengths
        tlo, thi = config.test_lengths
        if lo <= length <= hi and short_open:
            split = max(("train", "val"), key=lambda s: remaining[s])
        elif tlo <= length <= thi and remaining["test"] > 0:
            split = "test"
        else:
            continue
        seen.add(key)
        remaining[split] -= 1
        out[split].append(
            PlanningProblem(
                domain="blocks", start=start, goal=goal, blocks=blocks,
                gold_plan=plan, optimal_length=length, split=split,
            )
        )
    for split in SPLITS:
        out[split] = [
            _with_id(p, f"blocks-{split}-{i:05d}") for i, p in enumerate(out[split])
        ]
    return out


def blocks_bfs_length(problem):
    """Exhaustive BFS oracle length; independent of the A* route."""
    if problem.start == problem.goal:
        return 0
    dist = {problem.start: 0}
    queue = deque([problem.start])
    while queue:
        cur = queue.popleft()
        for action in valid_actions(problem, cur):
            nxt, _ = blocks_step(cur, action)
            if nxt in dist:
                continue
            dist[nxt] = dist[cur] + 1
            if nxt == problem.goal:
                return dist[nxt]
            queue.append(nxt)
    return None
