"""The packer against exhaustive search on tiny random instances.

Each instance has two to six tasks on two or three hosts of two
architectures, a Type I and a Type II, with a feasible random starting
placement. The packer must stay feasible, come within one host of the
optimum and within 15% of its objective.
"""

import numpy as np
import pytest

from colopack.metrics import interference
from colopack.models import (
    ArchSpec,
    Fleet,
    Host,
    LimitMode,
    ResourceVector,
    SensitivityProfile,
    ServerType,
    SolverConfig,
    TaskProfile,
)
from colopack.sensitivity import build_table
from colopack.solver import brute_force_optimal, objective, replay_result, solve

pytestmark = [pytest.mark.slow, pytest.mark.integration]

N_INSTANCES = 200
MAX_GAP = 1.15

ARCHS = [
    ArchSpec(
        name="Compact",
        server_type=ServerType.TYPE_I,
        capacity=ResourceVector(cpu_cores=8, memory_gb=16, membw_gbps=16, netbw_gbps=8),
        score=1.0,
    ),
    ArchSpec(
        name="Large",
        server_type=ServerType.TYPE_II,
        capacity=ResourceVector(cpu_cores=16, memory_gb=48, membw_gbps=40, netbw_gbps=12),
        score=1.5,
    ),
]


def _instance(seed: int) -> Fleet | None:
    """A random tiny fleet, or None when the random placement got stuck."""
    rng = np.random.default_rng(seed)
    hosts = [
        Host(id=f"h{i}", arch=ARCHS[int(rng.integers(len(ARCHS)))].name)
        for i in range(int(rng.integers(2, 4)))
    ]
    capacity = {a.name: np.array(a.capacity.as_tuple()[:2]) for a in ARCHS}
    room = {h.id: capacity[h.arch].copy() for h in hosts}

    tasks, assignment = [], {}
    for i in range(int(rng.integers(2, 7))):
        p99 = np.array([rng.uniform(0.5, 5.0), rng.uniform(1.0, 12.0)])
        options = [h for h in sorted(room) if np.all(room[h] >= p99)]
        if not options:
            return None
        host_id = options[int(rng.integers(len(options)))]
        room[host_id] -= p99
        task_id = f"t{i}"
        cpu, membw, netbw = (float(v) for v in rng.uniform(0.1, 0.7, 3))
        assignment[task_id] = host_id
        tasks.append(
            TaskProfile(
                id=task_id,
                job_id=f"job-{seed}",
                requested=ResourceVector(cpu_cores=2 * p99[0], memory_gb=2 * p99[1]),
                p99=ResourceVector(cpu_cores=p99[0], memory_gb=p99[1]),
                base_sensitivity=SensitivityProfile(
                    base_arch="Compact", cpu=cpu, membw=membw, netbw=netbw
                ),
            )
        )
    return Fleet(architectures=ARCHS, hosts=hosts, tasks=tasks, assignment=assignment)


@pytest.fixture(scope="module")
def instances() -> list[Fleet]:
    fleets: list[Fleet] = []
    seed = 0
    while len(fleets) < N_INSTANCES:
        fleet = _instance(seed)
        if fleet is not None:
            fleets.append(fleet)
        seed += 1
    return fleets


def _hosts(assignment: dict[str, str]) -> int:
    return len(set(assignment.values()))


# ============================================================================
# OPTIMALITY GAP
# ============================================================================


def test_within_gap_of_optimum(instances):
    """Test feasibility, host count and objective gap on every instance."""
    config = SolverConfig.preset(LimitMode.P99)
    assert config.w_sens == 0.0

    for index, fleet in enumerate(instances):
        result = solve(fleet, config)
        optimum = brute_force_optimal(fleet, config)

        assert replay_result(fleet, result) == result.final, index
        assert _hosts(result.final) <= _hosts(optimum) + 1, index
        best = objective(fleet, optimum, config)
        assert objective(fleet, result.final, config) <= MAX_GAP * best + 1e-9, index


def test_never_worse_than_start(instances):
    """Test that the packer never raises the objective of a feasible start."""
    config = SolverConfig.preset(LimitMode.P99)

    for fleet in instances:
        result = solve(fleet, config)
        assert result.final_objective <= result.initial_objective
        assert objective(fleet, result.final, config) == pytest.approx(result.final_objective)


# ============================================================================
# SENSITIVITY WEIGHTING
# ============================================================================


def test_sensitivity_weight_lowers_interference(instances):
    """Test that weighting sensitivity lowers total interference over the suite."""
    plain = SolverConfig.preset(LimitMode.P99)
    aware = SolverConfig.preset(LimitMode.P99_SENS)
    assert aware.w_sens > 0

    plain_excess = aware_excess = 0.0
    for fleet in instances:
        table = build_table(fleet.tasks, fleet.architectures)
        plain_excess += interference(fleet, solve(fleet, plain).final, table).excess
        aware_excess += interference(fleet, solve(fleet, aware, table).final, table).excess

    assert plain_excess > 0
    assert aware_excess < plain_excess


def test_sensitivity_weight_never_raises_optimal_interference(instances):
    """Test on every instance that the weighted optimum carries no more excess than the plain one."""
    plain = SolverConfig.preset(LimitMode.P99)
    aware = SolverConfig.preset(LimitMode.P99_SENS)

    for index, fleet in enumerate(instances):
        table = build_table(fleet.tasks, fleet.architectures)
        plain_excess = interference(fleet, brute_force_optimal(fleet, plain), table).excess
        aware_excess = interference(fleet, brute_force_optimal(fleet, aware, table), table).excess

        assert aware_excess <= plain_excess + 1e-9, index
