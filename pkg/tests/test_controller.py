import pytest

from hybridplan.controller import (
    SYS1,
    SYS2,
    ControllerConfig,
    HybridController,
    build_controller_dataset,
    edge_window_decompose,
    maze_skeleton,
    sliding_window_decompose,
    window_length,
)
from hybridplan.domains import plan_states
from hybridplan.hardness import hardness_fn


def brute_force_window(problem, gold_plan, x, selector):
    """Independent enumeration of every placement of the x*n window."""
    states = plan_states(problem, gold_plan)
    n = len(states) - 1
    w = window_length(x, n)
    hfn = hardness_fn(selector, problem)
    scored = []
    for u in range(0, n - w + 1):
        v = u + w
        score = hfn(states[0], states[u]) - hfn(states[u], states[v]) + hfn(states[v], states[n])
        scored.append((score, u, v))
    _, u, v = min(scored, key=lambda t: (t[0], t[1]))
    return states[u], states[v]


def assert_chained(problem, meta):
    assert meta[0].start == problem.start
    assert meta[-1].goal == problem.goal
    for a, b in zip(meta, meta[1:]):
        assert a.goal == b.start
    assert sum(1 for sg in meta if sg.mode == SYS2) == 1
    assert 1 <= len(meta) <= 3


class TestSlidingWindow:
    def test_matches_bruteforce_oracle(self, small_maze_dataset):
        problems = [p for p in small_maze_dataset["train"] if p.optimal_length >= 2][:100]
        for p in problems:
            for x in (0.25, 0.5, 0.75):
                meta = sliding_window_decompose(p, p.gold_plan, x)
                su, sv = brute_force_window(p, p.gold_plan, x, "maze-obstacles")
                sys2 = [sg for sg in meta if sg.mode == SYS2][0]
                assert (sys2.start, sys2.goal) == (su, sv)
                assert_chained(p, meta)

    def test_x_one_whole_plan_window(self, small_maze_dataset):
        p = next(p for p in small_maze_dataset["train"] if p.optimal_length == 8)
        meta = sliding_window_decompose(p, p.gold_plan, 1.0)
        assert meta == tuple(meta) and len(meta) == 1
        assert meta[0].mode == SYS2
        assert (meta[0].start, meta[0].goal) == (p.start, p.goal)

    def test_length_one_plan_clamps(self, small_maze_dataset):
        p = next(p for p in small_maze_dataset["train"] if p.optimal_length == 1)
        meta = sliding_window_decompose(p, p.gold_plan, 0.3)
        assert len(meta) == 1 and meta[0].mode == SYS2

    def test_rejects_x_zero(self, small_maze_dataset):
        p = small_maze_dataset["train"][0]
        with pytest.raises(ValueError):
            sliding_window_decompose(p, p.gold_plan, 0.0)


class TestEdgeWindow:
    def test_only_edge_placements(self, small_maze_dataset):
        problems = [p for p in small_maze_dataset["train"] if p.optimal_length >= 4][:50]
        for p in problems:
            meta = edge_window_decompose(p, p.gold_plan, 0.5)
            assert len(meta) <= 2
            sys2 = [sg for sg in meta if sg.mode == SYS2][0]
            assert sys2.start == p.start or sys2.goal == p.goal
            assert_chained(p, meta)

    def test_never_beats_sliding_window(self, small_maze_dataset):
        problems = [p for p in small_maze_dataset["train"] if p.optimal_length >= 4][:50]
        for p in problems:
            states = plan_states(p, p.gold_plan)
            hfn = hardness_fn("maze-obstacles", p)

            def objective(meta):
                sys2 = [sg for sg in meta if sg.mode == SYS2][0]
                return (hfn(p.start, sys2.start) - hfn(sys2.start, sys2.goal)
                        + hfn(sys2.goal, p.goal))

            slide = objective(sliding_window_decompose(p, p.gold_plan, 0.5))
            edge = objective(edge_window_decompose(p, p.gold_plan, 0.5))
            assert edge >= slide

    def test_x_one_single_window(self, small_maze_dataset):
        p = next(p for p in small_maze_dataset["train"] if p.optimal_length >= 4)
        meta = edge_window_decompose(p, p.gold_plan, 1.0)
        assert len(meta) == 1 and meta[0].mode == SYS2


class TestBuildControllerDataset:
    def test_easy_count_floor(self, small_maze_dataset):
        problems = small_maze_dataset["train"][:9]
        records = build_controller_dataset(problems, ControllerConfig(x=0.5))
        easy = [m for _, m in records if len(m) == 1 and m[0].mode == SYS1]
        assert len(easy) == int(0.5 * 9) == 4

    def test_x_zero_all_easy(self, small_maze_dataset):
        problems = small_maze_dataset["train"][:20]
        records = build_controller_dataset(problems, ControllerConfig(x=0.0))
        assert all(len(m) == 1 and m[0].mode == SYS1 for _, m in records)

    def test_x_one_no_easy(self, small_maze_dataset):
        problems = small_maze_dataset["train"][:20]
        records = build_controller_dataset(problems, ControllerConfig(x=1.0))
        for p, m in records:
            assert len(m) == 1 and m[0].mode == SYS2
            assert (m[0].start, m[0].goal) == (p.start, p.goal)

    def test_hard_instances_are_the_hardest(self, small_maze_dataset):
        from hybridplan.hardness import hardness

        problems = small_maze_dataset["train"][:40]
        records = build_controller_dataset(problems, ControllerConfig(x=0.5))
        scores = [hardness("maze-obstacles", p, p.start, p.goal) for p, _ in records]
        assert scores == sorted(scores)

    def test_variant_no_subgoal(self, small_maze_dataset):
        problems = small_maze_dataset["train"][:10]
        records = build_controller_dataset(problems, ControllerConfig(x=1.0, variant="no-subgoal"))
        assert all(m[0].mode == SYS2 and len(m) == 1 for _, m in records)


class TestRuntimeController:
    def _fitted(self, ds, **kwargs):
        return HybridController(ControllerConfig(**kwargs)).fit(ds["train"])

    def test_requires_fit(self, small_maze_dataset):
        ctl = HybridController(ControllerConfig(x=0.5))
        with pytest.raises(RuntimeError):
            ctl.decompose(small_maze_dataset["test"][0])

    def test_easy_below_threshold(self, small_maze_dataset):
        from hybridplan.hardness import hardness

        ctl = self._fitted(small_maze_dataset, x=0.5)
        tau = ctl.threshold()
        for p in small_maze_dataset["test"]:
            meta = ctl.decompose(p)
            score = hardness("maze-obstacles", p, p.start, p.goal)
            if score < tau:
                assert len(meta) == 1 and meta[0].mode == SYS1
            else:
                assert any(sg.mode == SYS2 for sg in meta)

    def test_saturated_bias_all_hard(self, small_maze_dataset):
        ctl = self._fitted(small_maze_dataset, x=0.5, bias=1.0)
        for p in small_maze_dataset["test"][:40]:
            meta = ctl.decompose(p)
            assert any(sg.mode == SYS2 for sg in meta)
            assert_chained(p, meta)

    def test_x_zero_all_easy(self, small_maze_dataset):
        ctl = self._fitted(small_maze_dataset, x=0.0)
        for p in small_maze_dataset["test"]:
            meta = ctl.decompose(p)
            assert meta == (meta[0],) and meta[0].mode == SYS1

    def test_monotone_in_bias(self, small_maze_dataset):
        counts = []
        for step in range(-10, 11):
            ctl = self._fitted(small_maze_dataset, x=0.5, bias=step / 10)
            hard = sum(
                1 for p in small_maze_dataset["test"]
                if any(sg.mode == SYS2 for sg in ctl.decompose(p)))
            counts.append(hard)
        assert counts == sorted(counts)

    def test_random_variant_monotone_and_seeded(self, small_maze_dataset):
        test = small_maze_dataset["test"]
        counts = []
        for bias in (-1.0, -0.5, 0.0, 0.5, 1.0):
            ctl = self._fitted(small_maze_dataset, x=0.5, bias=bias, variant="random", seed=3)
            hard = sum(1 for p in test if ctl.decompose(p)[0].mode == SYS2)
            counts.append(hard)
        assert counts == sorted(counts)
        a = self._fitted(small_maze_dataset, x=0.5, variant="random", seed=3)
        b = self._fitted(small_maze_dataset, x=0.5, variant="random", seed=3)
        assert [a.decompose(p) for p in test] == [b.decompose(p) for p in test]

    def test_no_subgoal_variant(self, small_maze_dataset):
        ctl = self._fitted(small_maze_dataset, x=0.5, bias=1.0, variant="no-subgoal")
        for p in small_maze_dataset["test"][:20]:
            meta = ctl.decompose(p)
            assert meta == ((meta[0]),) if len(meta) == 1 else False
            assert meta[0].mode == SYS2
            assert (meta[0].start, meta[0].goal) == (p.start, p.goal)

    def test_calibration_roundtrip(self, small_maze_dataset):
        ctl = self._fitted(small_maze_dataset, x=0.5)
        clone = HybridController(ControllerConfig(x=0.5)).load_calibration(ctl.calibration)
        assert clone.threshold() == ctl.threshold()

    def test_decompositions_chain(self, small_maze_dataset):
        ctl = self._fitted(small_maze_dataset, x=0.75)
        for p in small_maze_dataset["test"]:
            assert_chained_or_single(p, ctl.decompose(p))


def assert_chained_or_single(problem, meta):
    assert meta[0].start == problem.start
    assert meta[-1].goal == problem.goal
    for a, b in zip(meta, meta[1:]):
        assert a.goal == b.start


class TestMazeSkeleton:
    def test_endpoints_and_free_cells(self, small_maze_dataset):
        for p in small_maze_dataset["test"][:40]:
            skel = maze_skeleton(p)
            assert skel[0] == p.start and skel[-1] == p.goal
            assert all(cell not in p.grid.obstacles for cell in skel)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ControllerConfig(x=1.5)
        with pytest.raises(ValueError):
            ControllerConfig(bias=2.0)
        with pytest.raises(ValueError):
            ControllerConfig(variant="oracle")
