from fractions import Fraction

import pytest

from pairnet.cnf import CnfFormula, Flavor, is_satisfiable, random_3sat, random_monotone_1in3, satisfying_assignments
from pairnet.config import SolverCaps
from pairnet.cyclecover import decode_cover, find_c6_cover
from pairnet.errors import AssignmentDoesNotSatisfy, AssignmentNotOneInThree, BadFormula
from pairnet.instance import Objective, StructureKind, cost, validate_metric, validate_solution
from pairnet.oracle import exact_opt
from pairnet.reductions import (
    GADGET_EDGES,
    PUBLISHED_GADGET_EDGES,
    gadget_states,
    hardness_accounting,
    path_lengths,
    reduce_1in3_to_2matching,
    reduce_3sat_to_2mst,
    verify_forward_2matching,
    verify_forward_2mst,
)

SAT_ONE = CnfFormula(1, ((1, 1, 1),))
UNSAT_ONE = CnfFormula(1, ((1, 1, 1), (-1, -1, -1)))


def test_path_lengths():
    assert path_lengths(2, 1) == {"p": 2, "p_b": 5, "p_r": 7}
    assert path_lengths(2, 1, "paper") == {"p": 9, "p_b": 11, "p_r": 20}
    assert path_lengths(2, 1, "cubic") == path_lengths(2, 1, "paper")
    with pytest.raises(BadFormula):
        path_lengths(2, 1, "tiny")


def test_3sat_instance_shape():
    cnf = CnfFormula(2, ((1, -2, 2),))
    artifacts = reduce_3sat_to_2mst(cnf)
    inst = artifacts.instance
    assert inst.n_nodes == 18
    assert set(inst.distinct_weights()) == {1, 2}
    assert validate_metric(inst) == []
    assert artifacts.annotations[0] == "x1" and artifacts.annotations[3] == "~x2"
    assert artifacts.annotations[4] == "r[0]" and artifacts.annotations[5] == "b[0]"
    assert artifacts.annotations[17] == "clause1[1]"
    assert inst.meta["mode"] == "compact"


def test_3sat_forward_direction():
    cnf = CnfFormula(3, ((1, 2, -3), (-1, -2, 3)))
    artifacts = reduce_3sat_to_2mst(cnf)
    for assignment in satisfying_assignments(cnf):
        assert verify_forward_2mst(artifacts, assignment)
    with pytest.raises(AssignmentDoesNotSatisfy):
        verify_forward_2mst(artifacts, (True, True, False))


def test_3sat_paper_mode_forward():
    cnf = CnfFormula(2, ((1, 2, 2),))
    artifacts = reduce_3sat_to_2mst(cnf, "paper")
    assert artifacts.mode == "paper"
    assert artifacts.instance.n_pairs == 2 + path_lengths(2, 1, "paper")["p_r"]
    assert reduce_3sat_to_2mst(cnf, "cubic").instance == artifacts.instance
    assert verify_forward_2mst(artifacts, (True, False))


def test_3sat_reduction_rejects_1in3():
    with pytest.raises(BadFormula):
        reduce_3sat_to_2mst(CnfFormula(3, ((1, 2, 3),), Flavor.MONOTONE_ONE_IN_THREE))


@pytest.mark.parametrize("cnf, expected", [(SAT_ONE, 1), (UNSAT_ONE, 2)])
def test_3sat_bottleneck_optimum(cnf, expected):
    artifacts = reduce_3sat_to_2mst(cnf)
    assert artifacts.instance.n_pairs <= 12
    result = exact_opt(artifacts.instance, StructureKind.SPANNING_TREE, Objective.BOTTLENECK)
    assert result.best_value == expected


@pytest.mark.slow
def test_3sat_equivalence_sweep():
    caps = SolverCaps().with_oracle_cap(14)
    for seed in range(20):
        n_vars, n_clauses = 1 + seed % 2, 1 + (seed // 2) % 2
        base = random_3sat(3, n_clauses, seed)
        # fold the three variables onto n_vars so tiny formulas stay tiny
        clauses = tuple(
            tuple((abs(lit) - 1) % n_vars + 1 if lit > 0 else -((abs(lit) - 1) % n_vars + 1) for lit in clause)
            for clause in base.clauses
        )
        cnf = CnfFormula(n_vars, clauses)
        artifacts = reduce_3sat_to_2mst(cnf)
        value = exact_opt(artifacts.instance, StructureKind.SPANNING_TREE, Objective.BOTTLENECK, caps).best_value
        assert (value == 1) == is_satisfiable(cnf)


@pytest.mark.slow
def test_3sat_paper_mode_forward_sweep():
    checked = 0
    for seed in range(100):
        cnf = random_3sat(3, 1 + seed % 2, seed)
        assignment = next(satisfying_assignments(cnf), None)
        if assignment is None:
            continue
        assert verify_forward_2mst(reduce_3sat_to_2mst(cnf, "paper"), assignment)
        checked += 1
        if checked == 10:
            break
    assert checked == 10


# ---------------------------------------------------------------------------
# 1-in-3 SAT -> 2-matching


def test_gadget_states():
    assert gadget_states("variable") == [frozenset({"e_F"}), frozenset({"e_T"})]
    assert len(gadget_states("clause")) == 3
    assert len(gadget_states("connection")) == 2


def test_matching_reduction_shape():
    artifacts = reduce_1in3_to_2matching(CnfFormula(3, ((1, 2, 3),), "1in3"))
    graph = artifacts.graph
    assert graph.n_pairs == 3 * 2 + 4 + 3 * 4
    assert graph.n_real == 44
    assert graph.structural_violations() == []
    assert set(artifacts.instance.distinct_weights()) == {1, 2}
    assert artifacts.annotations[0] == "variable.1.p"
    assert artifacts.owners[6] == ("clause", 1)


def test_matching_forward_direction():
    artifacts = reduce_1in3_to_2matching(CnfFormula(3, ((1, 2, 3),), "1in3"))
    check = verify_forward_2matching(artifacts, (True, False, False))
    assert check.ok
    assert check.edges_per_clause == (GADGET_EDGES["clause"],)
    assert check.edges_per_variable == (6, 6, 6)
    assert check.edges_per_connection == (12, 12, 12)
    assert check.published == PUBLISHED_GADGET_EDGES
    assert check.published_gap() == {"clause": GADGET_EDGES["clause"] - 16}
    assert all(length % 6 == 0 for length in check.cover.lengths())

    coloring, pair = decode_cover(artifacts.graph, check.cover)
    assert validate_solution(artifacts.instance, pair) == []
    assert cost(artifacts.instance, pair, Objective.BOTTLENECK) == 1

    with pytest.raises(AssignmentNotOneInThree):
        verify_forward_2matching(artifacts, (True, True, False))


def test_matching_reduction_rejects_3sat():
    with pytest.raises(BadFormula):
        reduce_1in3_to_2matching(CnfFormula(3, ((1, -2, 3),)))


@pytest.mark.parametrize("seed", range(5))
def test_random_matching_reductions_are_well_formed(seed):
    cnf = random_monotone_1in3(4, 2, seed)
    artifacts = reduce_1in3_to_2matching(cnf)
    assert artifacts.graph.structural_violations() == []
    for assignment in satisfying_assignments(cnf):
        assert verify_forward_2matching(artifacts, assignment).ok


def test_default_cover_cap_fits_smallest_reduction():
    graph = reduce_1in3_to_2matching(CnfFormula(3, ((1, 2, 3),), "1in3")).graph
    assert graph.n_real <= SolverCaps().c6_real_nodes


@pytest.mark.slow
def test_cover_search_agrees_with_satisfiability():
    sat = reduce_1in3_to_2matching(CnfFormula(3, ((1, 2, 3),), "1in3"))
    cover = find_c6_cover(sat.graph)
    assert cover is not None
    coloring, pair = decode_cover(sat.graph, cover)
    assert validate_solution(sat.instance, pair) == []

    unsat = reduce_1in3_to_2matching(CnfFormula(1, ((1, 1, 1),), "1in3"))
    assert find_c6_cover(unsat.graph) is None


def test_hardness_accounting():
    published = hardness_accounting()
    assert published == {"min_sum": Fraction(4152, 5), "min_max": Fraction(2076, 5)}
    counted = hardness_accounting(clause_edges=GADGET_EDGES["clause"])
    assert counted["min_sum"] == published["min_sum"] - 15 * 4
