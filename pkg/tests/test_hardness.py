import random

import pytest

from hybridplan.domains import MazeGrid, PlanningProblem, canonical_blocks
from hybridplan.hardness import (
    blocks_distance,
    default_selector,
    hardness,
    obstacle_count,
    rank_problems,
)


def maze_problem(obstacles, start=(0, 0), goal=(4, 4)):
    return PlanningProblem(domain="maze", start=start, goal=goal,
                           grid=MazeGrid(5, 5, frozenset(obstacles)))


class TestMazeObstacles:
    def test_counts_inside_rectangle_only(self):
        p = maze_problem({(1, 1), (3, 3)})
        assert hardness("maze-obstacles", p, (0, 0), (2, 2)) == 1

    def test_symmetry(self):
        rng = random.Random(1)
        for _ in range(100):
            p = maze_problem({(rng.randrange(5), rng.randrange(5)) for _ in range(5)}
                             - {(0, 0), (4, 4)})
            a = (rng.randrange(5), rng.randrange(5))
            b = (rng.randrange(5), rng.randrange(5))
            assert hardness("maze-obstacles", p, a, b) == hardness("maze-obstacles", p, b, a)

    def test_monotone_under_containment(self):
        grid = MazeGrid(5, 5, frozenset({(1, 1), (2, 3), (3, 2)}))
        inner = obstacle_count(grid, (1, 1), (2, 2))
        outer = obstacle_count(grid, (0, 0), (4, 4))
        assert inner <= outer

    def test_degenerate_pair_is_zero(self):
        p = maze_problem({(1, 1)})
        assert hardness("maze-obstacles", p, (2, 2), (2, 2)) == 0


class TestMazeManhattan:
    def test_is_manhattan(self):
        p = maze_problem(())
        assert hardness("maze-manhattan", p, (0, 0), (3, 4)) == 7
        assert hardness("maze-manhattan", p, (3, 4), (0, 0)) == 7


class TestBlocksDistance:
    def _problem(self, start, goal, blocks):
        return PlanningProblem(domain="blocks", start=start, goal=goal, blocks=blocks)

    def test_identity_zero(self):
        s = canonical_blocks([["A", "B"], ["C"]])
        p = self._problem(s, s, ("A", "B", "C"))
        assert hardness("blocks-distance", p, s, s) == 0

    def test_swap_costs_three(self):
        a = canonical_blocks([["A", "B"]])
        b = canonical_blocks([["B", "A"]])
        # A misplaced on table: +1; B misplaced and buried: +2
        assert blocks_distance(a, b) == 3

    def test_above_neighbor_counts(self):
        # A keeps its support but loses its rider: misplaced under the OR
        # reading (+1); B is misplaced and buried (+2)
        a = canonical_blocks([["A", "B"]])
        b = canonical_blocks([["A"], ["B"]])
        assert blocks_distance(a, b) == 3

    def test_unstack_costs(self):
        # B loses its rider (+1, on table); C changes support and is off
        # the table (+2)
        a = canonical_blocks([["A"], ["B", "C"]])
        b = canonical_blocks([["A"], ["B"], ["C"]])
        assert blocks_distance(a, b) == 3


class TestRanking:
    def test_pairwise_order(self):
        light = maze_problem({(4, 0)}, start=(0, 0), goal=(2, 2))
        heavy = maze_problem({(1, 1), (2, 2)}, start=(0, 0), goal=(3, 3))
        assert rank_problems([heavy, light], "maze-obstacles") == [light, heavy]

    def test_stability_on_ties(self):
        problems = [maze_problem((), start=(0, 0), goal=(i, 0)) for i in range(1, 5)]
        assert rank_problems(problems, "maze-obstacles") == problems

    def test_agrees_with_recomputation_oracle(self):
        rng = random.Random(17)
        problems = []
        for _ in range(100):
            obstacles = set()
            while len(obstacles) < 6:
                obstacles.add((rng.randrange(5), rng.randrange(5)))
            grid = MazeGrid(5, 5, frozenset(obstacles))
            free = grid.free_cells()
            start, goal = rng.sample(free, 2)
            problems.append(PlanningProblem(domain="maze", start=start, goal=goal, grid=grid))
        ranked = rank_problems(problems, "maze-obstacles")
        scores = [hardness("maze-obstacles", p, p.start, p.goal) for p in ranked]
        assert scores == sorted(scores)
        assert sorted(map(id, ranked)) == sorted(map(id, problems))


def test_unknown_selector_rejected():
    p = maze_problem(())
    with pytest.raises(ValueError):
        hardness("maze-euclid", p, (0, 0), (1, 1))


def test_default_selectors():
    assert default_selector("maze") == "maze-obstacles"
    assert default_selector("blocks") == "blocks-distance"
