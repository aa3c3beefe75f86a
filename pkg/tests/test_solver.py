"""Tests for limit modes, the objective, the packer, replay and the oracle."""

import pytest

from colopack.exceptions import (
    DanglingReferenceError,
    FleetParseError,
    InfeasibleTaskError,
    InstanceTooLargeError,
    MissingPercentileError,
    SolverConfigError,
)
from colopack.models import LimitMode, RelocateMove, SolverConfig, SwapMove
from colopack.solver import (
    PHASES,
    LocalSearch,
    brute_force_optimal,
    effective_limits,
    feasible,
    first_fit_decreasing,
    objective,
    replay,
    replay_result,
    solve,
)


def _config(w_hosts=1.0, w_cost=0.0, w_frag=0.0, w_sens=0.0, **extra):
    extra.setdefault("limit_mode", LimitMode.ORIGINAL)
    return SolverConfig(w_hosts=w_hosts, w_cost=w_cost, w_frag=w_frag, w_sens=w_sens, **extra)


HOSTS_ONLY = _config()


class TestEffectiveLimits:
    """Test which limits each mode packs with."""

    @pytest.fixture
    def task(self, make_task):
        return make_task("t1", 18, 55, p99=(11, 8.9))

    def test_original(self, task):
        """Test that the baseline mode uses requests."""
        limits = effective_limits(task, LimitMode.ORIGINAL)
        assert (limits.cpu_cores, limits.memory_gb) == (18, 55)

    def test_p99(self, task):
        """Test that P99 uses both percentiles."""
        limits = effective_limits(task, LimitMode.P99)
        assert (limits.cpu_cores, limits.memory_gb) == (11, 8.9)

    def test_p99_cpu(self, task):
        """Test that P99CPU keeps the memory request."""
        limits = effective_limits(task, LimitMode.P99_CPU)
        assert (limits.cpu_cores, limits.memory_gb) == (11, 55)

    def test_p99_mem(self, task):
        """Test that P99Mem keeps the cpu request."""
        limits = effective_limits(task, LimitMode.P99_MEM)
        assert (limits.cpu_cores, limits.memory_gb) == (18, 8.9)

    def test_missing_percentile(self, make_task):
        """Test that percentile modes need percentiles."""
        with pytest.raises(MissingPercentileError):
            effective_limits(make_task("t1", 1, 1), LimitMode.P99_SENS)


class TestFeasible:
    """Test the host capacity predicate."""

    @pytest.fixture
    def big_fleet(self, make_arch, make_fleet, make_task):
        archs = [make_arch("Big", cores=48, memory=32)]
        return make_fleet({"h1": "Big"}, [make_task("t1", 20, 10)], {"t1": "h1"}, archs=archs)

    @pytest.mark.parametrize(
        ("cpu", "memory", "expected"),
        [(27, 22, True), (29, 22, False), (28, 22, True), (1, 23, False)],
    )
    def test_incoming(self, big_fleet, make_task, cpu, memory, expected):
        """Test capacity with an incoming task; exact fill is feasible."""
        incoming = make_task("t2", cpu, memory)
        assert feasible(big_fleet, big_fleet.assignment, "h1", [incoming]) is expected

    def test_empty_host(self, big_fleet):
        """Test that an empty host is feasible."""
        assert feasible(big_fleet, {}, "h1")

    def test_incoming_resident_not_double_counted(self, big_fleet):
        """Test that a resident passed as incoming counts once."""
        task = big_fleet.task("t1")
        assert feasible(big_fleet, big_fleet.assignment, "h1", [task, task])


class TestObjective:
    """Test the weighted objective."""

    def test_empty_fleet(self, make_fleet):
        """Test that no tasks cost nothing."""
        assert objective(make_fleet({"h1": "Small"}), config=HOSTS_ONLY) == 0.0

    def test_host_count(self, two_host_fleet):
        """Test the host term."""
        assert objective(two_host_fleet, config=HOSTS_ONLY) == 2.0
        assert objective(two_host_fleet, {"t1": "h1", "t2": "h1"}, HOSTS_ONLY) == 1.0

    def test_exact_fill_has_no_fragmentation(self, two_host_fleet):
        """Test that a full host pays only its host weight."""
        config = _config(w_hosts=1, w_frag=1)
        assert objective(two_host_fleet, {"t1": "h1", "t2": "h1"}, config) == pytest.approx(1.0)

    def test_fragmentation_normalized_by_fleet(self, two_host_fleet):
        """Test stranded capacity normalized by fleet totals."""
        config = _config(w_hosts=0, w_frag=1)
        # each host strands 2 of 8 cores and 4 of 16 GiB
        assert objective(two_host_fleet, config=config) == pytest.approx(1.0)

    def test_cost_weight(self, make_arch, make_fleet, make_task):
        """Test the cost term."""
        fleet = make_fleet(
            {"h1": "Big"},
            [make_task("t1", 1, 1)],
            {"t1": "h1"},
            archs=[make_arch("Big", cost_weight=2.5)],
        )
        assert objective(fleet, config=_config(w_hosts=0, w_cost=1)) == 2.5

    def test_sensitivity_excess(self, two_host_fleet, sensitivity_table):
        """Test that only load above 1.0 is penalized."""
        table = sensitivity_table({"t1": (0.7, 0.2, 0.2), "t2": (0.5, 0.2, 0.2)})
        config = _config(w_hosts=0, w_sens=1)

        together = objective(two_host_fleet, {"t1": "h1", "t2": "h1"}, config, table)
        apart = objective(two_host_fleet, config=config, table=table)

        assert together == pytest.approx(0.2)
        assert apart == 0.0

    def test_sensitivity_needs_table(self, two_host_fleet):
        """Test that a sensitivity weight without a table is rejected."""
        with pytest.raises(SolverConfigError):
            objective(two_host_fleet, config=_config(w_sens=1))


class TestSolve:
    """Test the greedy packer."""

    def test_consolidates_two_hosts(self, two_host_fleet):
        """Test that two half-full hosts are merged."""
        result = solve(two_host_fleet, HOSTS_ONLY)

        assert result.final == {"t1": "h2", "t2": "h2"}
        assert result.moves_applied == [RelocateMove(task_id="t1", from_host="h1", to_host="h2")]
        assert result.initial_objective == 2.0
        assert result.objective_trace == [1.0]
        assert result.stats.freed == {"Small": 1}
        assert result.stats.accepted_by_phase["relocate"] == 1

    def test_nothing_fits(self, make_fleet, make_task):
        """Test that tasks too large to share a host stay put."""
        fleet = make_fleet(
            {"h1": "Small", "h2": "Small"},
            [make_task("t1", 3, 4), make_task("t2", 3, 4)],
            {"t1": "h1", "t2": "h2"},
        )

        result = solve(fleet, HOSTS_ONLY)

        assert result.final == fleet.assignment
        assert result.moves_applied == []
        assert result.final_objective == result.initial_objective

    def test_sensitivity_keeps_tasks_apart(self, two_host_fleet, sensitivity_table):
        """Test that a heavy sensitivity weight outweighs freeing a host."""
        table = sensitivity_table({"t1": (0.6, 0.0, 0.0), "t2": (0.6, 0.0, 0.0)})
        config = _config(w_sens=10)

        result = solve(two_host_fleet, config, table)

        assert result.final == two_host_fleet.assignment
        assert brute_force_optimal(two_host_fleet, config, table) == result.final

    def test_zero_budget(self, two_host_fleet):
        """Test that no moves are applied without a budget."""
        result = solve(two_host_fleet, _config(max_moves=0))
        assert result.final == result.initial
        assert result.objective_trace == []

    def test_evacuation(self, make_fleet, make_task):
        """Test emptying a host when no single move improves."""
        fleet = make_fleet(
            {"h1": "Small", "h2": "Small"},
            [make_task(t, 1, 1) for t in ("t1", "t2", "t3", "t4")],
            {"t1": "h1", "t2": "h1", "t3": "h2", "t4": "h2"},
        )

        result = solve(fleet, HOSTS_ONLY)

        assert set(result.final.values()) == {"h2"}
        assert len(result.moves_applied) == 2
        assert result.objective_trace == [1.0]
        assert result.stats.accepted_by_phase["evacuate"] == 1

    def test_swap_relieves_hot_spot(self, make_fleet, make_task, sensitivity_table):
        """Test that exchanging tasks spreads sensitive work across full hosts."""
        fleet = make_fleet(
            {"h1": "Small", "h2": "Small"},
            [make_task(t, 2, 2) for t in ("a", "b", "c", "d")],
            {"a": "h1", "b": "h1", "c": "h2", "d": "h2"},
        )
        table = sensitivity_table(
            {"a": (0.8, 0.0, 0.0), "b": (0.8, 0.0, 0.0), "c": (0.1, 0.0, 0.0), "d": (0.1, 0.0, 0.0)}
        )

        result = solve(fleet, _config(w_sens=10), table)

        assert result.moves_applied == [SwapMove(task_a="a", task_b="c", host_a="h1", host_b="h2")]
        assert result.final == {"a": "h2", "b": "h1", "c": "h1", "d": "h2"}
        assert result.final_objective == pytest.approx(2.0)

    def test_repair(self, make_fleet, make_task):
        """Test that an overloaded starting host is repaired first."""
        fleet = make_fleet(
            {"h1": "Small", "h2": "Small"},
            [make_task("a", 3, 4), make_task("b", 3, 4)],
            {"a": "h1", "b": "h1"},
        )

        result = solve(fleet, HOSTS_ONLY)

        assert result.repair_moves == [RelocateMove(task_id="a", from_host="h1", to_host="h2")]
        assert result.initial_objective == 2.0
        assert replay_result(fleet, result) == result.final

    def test_unplaceable_task(self, make_fleet, make_task):
        """Test that a task larger than every host is reported."""
        fleet = make_fleet({"h1": "Small"}, [make_task("t1", 5, 1)], {"t1": "h1"})
        with pytest.raises(InfeasibleTaskError):
            solve(fleet, HOSTS_ONLY)

    def test_sens_mode_needs_table(self, make_fleet, make_task):
        """Test that P99Sens without a table is a configuration error."""
        fleet = make_fleet({"h1": "Small"}, [make_task("t1", 1, 1, p99=(1, 1))], {"t1": "h1"})
        with pytest.raises(SolverConfigError):
            solve(fleet, SolverConfig.preset(LimitMode.P99_SENS))

    def test_p99_packs_tighter(self, make_fleet, make_task):
        """Test that percentile limits let tasks share a host."""
        fleet = make_fleet(
            {"h1": "Small", "h2": "Small"},
            [make_task("t1", 3, 4, p99=(1, 2)), make_task("t2", 3, 4, p99=(1, 2))],
            {"t1": "h1", "t2": "h2"},
        )

        baseline = solve(fleet, _config())
        p99 = solve(fleet, _config(limit_mode=LimitMode.P99))

        assert len(set(baseline.final.values())) == 2
        assert len(set(p99.final.values())) == 1

    def test_deterministic(self, small_synthetic):
        """Test that repeated runs give identical results."""
        config = SolverConfig.preset(LimitMode.ORIGINAL, max_moves=50)

        first = solve(small_synthetic.fleet, config)
        second = solve(small_synthetic.fleet, config)

        assert first == second

    def test_trace_decreasing(self, small_synthetic):
        """Test that every accepted step lowers the objective."""
        result = solve(small_synthetic.fleet, SolverConfig.preset(LimitMode.ORIGINAL))

        values = [result.initial_objective, *result.objective_trace]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert len(result.moves_applied) <= 400
        assert sorted(result.stats.accepted_by_phase) == sorted(PHASES)
        assert replay_result(small_synthetic.fleet, result) == result.final

    def test_no_improving_relocation_left(self, small_synthetic):
        """Test that a converged run leaves no improving single-task move behind."""
        search = LocalSearch(
            small_synthetic.fleet, SolverConfig.preset(LimitMode.ORIGINAL, max_moves=10_000)
        )
        result = search.run()
        state = search.state

        assert len(result.moves_applied) < 10_000
        for task in range(len(state.task_ids)):
            _, deltas, fits = state.relocation_deltas(task)
            assert not (fits & (deltas < -search.eps)).any(), state.task_ids[task]

    def test_converged_phases_do_no_work(self, small_synthetic):
        """Test that failed evacuations and repacks are not scored again on an unchanged fleet."""
        search = LocalSearch(
            small_synthetic.fleet, SolverConfig.preset(LimitMode.ORIGINAL, max_moves=10_000)
        )
        search.run()
        evaluations = search.evaluations

        assert not search._relocate_phase()
        assert not search._evacuate_phase()
        assert not search._repack_phase()
        assert search.evaluations == evaluations


class TestInitialPlacement:
    """Test first-fit-decreasing placement."""

    def test_first_fit_decreasing(self, make_fleet, make_task):
        """Test largest-first placement into the first host with room."""
        fleet = make_fleet(
            {"h1": "Small", "h2": "Small"},
            [make_task("a", 3, 4), make_task("b", 2, 4), make_task("c", 1, 2)],
            {"a": "h1", "b": "h1", "c": "h1"},
        )
        assert first_fit_decreasing(fleet) == {"a": "h1", "b": "h2", "c": "h1"}

    def test_cheapest_host_opened_first(self, make_arch, make_fleet, make_task):
        """Test that closed hosts open in cost-weight order."""
        archs = [make_arch("Dear", cost_weight=2.5), make_arch("Cheap", cost_weight=1.0)]
        fleet = make_fleet(
            {"a-host": "Dear", "z-host": "Cheap"},
            [make_task("t1", 1, 1)],
            {"t1": "a-host"},
            archs=archs,
        )
        assert first_fit_decreasing(fleet) == {"t1": "z-host"}

    def test_infeasible(self, make_fleet, make_task):
        """Test that a task larger than every free host is reported."""
        fleet = make_fleet(
            {"h1": "Small"},
            [make_task("a", 3, 1), make_task("b", 3, 1)],
            {"a": "h1", "b": "h1"},
        )
        with pytest.raises(InfeasibleTaskError):
            first_fit_decreasing(fleet)


class TestReplay:
    """Test move log replay."""

    def test_relocate_and_swap(self, make_fleet, make_task):
        """Test applying both move kinds in order."""
        fleet = make_fleet(
            {"h1": "Small", "h2": "Small"},
            [make_task("a", 1, 1), make_task("b", 1, 1)],
            {"a": "h1", "b": "h2"},
        )
        moves = [
            SwapMove(task_a="a", task_b="b", host_a="h1", host_b="h2"),
            RelocateMove(task_id="b", from_host="h1", to_host="h2"),
        ]
        assert replay(fleet, fleet.assignment, moves) == {"a": "h2", "b": "h2"}

    def test_wrong_source(self, two_host_fleet):
        """Test that a move must start where the task is."""
        move = RelocateMove(task_id="t1", from_host="h2", to_host="h1")
        with pytest.raises(FleetParseError):
            replay(two_host_fleet, two_host_fleet.assignment, [move])

    def test_unknown_task(self, two_host_fleet):
        """Test that moves must name known tasks."""
        move = RelocateMove(task_id="t9", from_host="h1", to_host="h2")
        with pytest.raises(DanglingReferenceError):
            replay(two_host_fleet, two_host_fleet.assignment, [move])

    def test_unknown_host(self, two_host_fleet):
        """Test that moves must name known hosts."""
        move = RelocateMove(task_id="t1", from_host="h1", to_host="h9")
        with pytest.raises(DanglingReferenceError):
            replay(two_host_fleet, two_host_fleet.assignment, [move])

    def test_overload_under_mode(self, make_fleet, make_task):
        """Test that a checked replay rejects overloading moves."""
        fleet = make_fleet(
            {"h1": "Small", "h2": "Small"},
            [make_task("a", 3, 1), make_task("b", 3, 1)],
            {"a": "h1", "b": "h2"},
        )
        move = RelocateMove(task_id="a", from_host="h1", to_host="h2")

        assert replay(fleet, fleet.assignment, [move]) == {"a": "h2", "b": "h2"}
        with pytest.raises(InfeasibleTaskError):
            replay(fleet, fleet.assignment, [move], mode=LimitMode.ORIGINAL)


class TestOracle:
    """Test the exhaustive optimum."""

    def test_consolidates(self, two_host_fleet):
        """Test the optimum of the two-host fleet; ties go to the first placement."""
        assert brute_force_optimal(two_host_fleet, HOSTS_ONLY) == {"t1": "h1", "t2": "h1"}

    def test_too_large(self, make_fleet, make_task):
        """Test the instance size guard."""
        tasks = [make_task(f"t{i}", 0.1, 0.1) for i in range(9)]
        fleet = make_fleet({"h1": "Small"}, tasks, {t.id: "h1" for t in tasks})
        with pytest.raises(InstanceTooLargeError):
            brute_force_optimal(fleet, HOSTS_ONLY)

    def test_no_feasible_placement(self, make_fleet, make_task):
        """Test that an infeasible instance is reported."""
        fleet = make_fleet(
            {"h1": "Small"}, [make_task("a", 3, 1), make_task("b", 3, 1)], {"a": "h1", "b": "h1"}
        )
        with pytest.raises(InfeasibleTaskError):
            brute_force_optimal(fleet, HOSTS_ONLY)

    def test_empty(self, make_fleet):
        """Test that an empty fleet has the empty optimum."""
        assert brute_force_optimal(make_fleet({"h1": "Small"}), HOSTS_ONLY) == {}
