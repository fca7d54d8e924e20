"""Hardness functions over (sub-)goals and hardness-based ranking.

Three selectors: maze-obstacles counts obstacle cells in the rectangle
spanned by the two states, maze-manhattan is plain Manhattan distance,
blocks-distance charges 1 per misplaced block plus 1 more when the
misplaced block is buried in a stack.
"""

from __future__ import annotations

from .search import manhattan

SELECTORS = ("maze-obstacles", "maze-manhattan", "blocks-distance")


def default_selector(domain):
    return "maze-obstacles" if domain == "maze" else "blocks-distance"


def _neighbor_maps(state):
    below, above = {}, {}
    for stack in state:
        prev = None
        for block in stack:
            below[block] = prev
            if prev is not None:
                above[prev] = block
            prev = block
        above[prev] = None
    return below, above


def blocks_distance(a, b):
    """A block is misplaced when its neighbor below or above differs
    between the two states; buried misplaced blocks cost double."""
    below_a, above_a = _neighbor_maps(a)
    below_b, above_b = _neighbor_maps(b)
    cost = 0
    for block in below_a:
        misplaced = below_a[block] != below_b.get(block) or above_a[block] != above_b.get(block)
        if misplaced:
            cost += 1
            if below_a[block] is not None:
                cost += 1
    return cost


def obstacle_count(grid, a, b):
    r0, r1 = sorted((a[0], b[0]))
    c0, c1 = sorted((a[1], b[1]))
    return sum(1 for (r, c) in grid.obstacles if r0 <= r <= r1 and c0 <= c <= c1)


def hardness(selector, problem, a, b):
    if a == b:
        return 0
    if selector == "maze-obstacles":
        return obstacle_count(problem.grid, a, b)
    if selector == "maze-manhattan":
        return manhattan(a, b)
    if selector == "blocks-distance":
        return blocks_distance(a, b)
    raise ValueError(f"unknown hardness selector {selector!r}")


def hardness_fn(selector, problem):
    return lambda a, b: hardness(selector, problem, a, b)


def rank_problems(problems, selector):
    """Stable ascending sort by hardness of the (start, goal) pair."""
    return sorted(problems, key=lambda p: hardness(selector, p, p.start, p.goal))
