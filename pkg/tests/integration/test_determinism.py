"""Repeatability and replayability of whole packer runs."""

import pytest

from colopack.models import Fleet, LimitMode, SolverConfig
from colopack.pipeline import cluster_stage, percentile_stage, table_stage
from colopack.solver import replay_result, solve

pytestmark = [pytest.mark.slow, pytest.mark.integration]


@pytest.fixture(scope="module")
def prepared(small_synthetic):
    """The small synthetic fleet with limits and profiles, and its table."""
    with_limits, _ = percentile_stage(small_synthetic.fleet, small_synthetic.trace())
    clustered, _ = cluster_stage(with_limits, seed=0)
    return clustered, table_stage(clustered)


@pytest.mark.parametrize("mode", list(LimitMode), ids=lambda m: m.value)
def test_identical_runs_serialize_identically(prepared, mode):
    """Test that two runs on the same inputs produce byte-identical results."""
    fleet, table = prepared
    config = SolverConfig.preset(mode)

    first = solve(fleet, config, table)
    second = solve(fleet, config, table)

    assert first.model_dump_json() == second.model_dump_json()


@pytest.mark.parametrize("mode", list(LimitMode), ids=lambda m: m.value)
def test_trace_and_replay(prepared, mode):
    """Test a strictly decreasing objective trace and a feasible move log."""
    fleet, table = prepared
    result = solve(fleet, SolverConfig.preset(mode), table)

    values = [result.initial_objective, *result.objective_trace]
    assert all(later < earlier for earlier, later in zip(values, values[1:]))
    assert replay_result(fleet, result) == result.final


def test_input_order_does_not_matter(prepared):
    """Test that listing hosts and tasks in another order gives the same result."""
    fleet, table = prepared
    shuffled = Fleet(
        architectures=fleet.architectures[::-1],
        hosts=fleet.hosts[::-1],
        tasks=fleet.tasks[::-1],
        assignment=dict(sorted(fleet.assignment.items(), reverse=True)),
    )
    config = SolverConfig.preset(LimitMode.P99_SENS)

    assert solve(shuffled, config, table) == solve(fleet, config, table)
