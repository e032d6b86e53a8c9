import pytest

from relu2.reductions import (Hypergraph, SetCoverInstance, build_gadget, compose_with_gadget, cycle_graph,
                              reduce_coloring, reduce_dks, reduce_set_cover)
from relu2.trainer import TrainOptions
from relu2.verify import (FAIL, PASS, UNVERIFIABLE, VerifyReport, check_soundness_gap, check_witness,
                          report_from_dict, roundtrip_setcover)

SC = SetCoverInstance(3, ({1, 2}, {2, 3}, {3}))
TRIANGLE = Hypergraph(3, ((0, 1), (1, 2), (0, 2)))


def test_setcover_witness_report():
    rep = check_witness(reduce_set_cover(SC), [0, 1], tol=1e-12)
    assert rep.status == PASS and rep.overall
    c = rep.checks[0]
    assert c.expected == pytest.approx((0.01 / 9) ** 2 * 2 / 8)


def test_coloring_witness_report():
    rep = check_witness(reduce_coloring(cycle_graph(4), 2), [0, 1, 0, 1])
    assert rep.overall
    assert rep.checks[0].observed <= 1e-12


@pytest.mark.parametrize("T", [(0, 1), (0, 2)])
def test_dks_witness_report(T):
    out = reduce_dks(cycle_graph(4), 2, 1, allow_nonpositive_gap=True)
    rep = check_witness(out, T, tol=1e-12)
    assert rep.overall
    names = [c.name for c in rep.checks]
    assert "constant-sample loss" in names and "cardinality loss" in names


def test_dks_soundness_is_formula_level():
    out = reduce_dks(cycle_graph(4), 2, 1, allow_nonpositive_gap=True)
    rep = check_soundness_gap(out)
    assert rep.overall and "formula-level" in rep.note


def test_soundness_triangle():
    rep = check_soundness_gap(reduce_coloring(TRIANGLE, 2))
    assert rep.overall
    assert rep.checks[0].relation == ">"
    assert rep.checks[0].observed > 1 / 115200


def test_soundness_even_cycle():
    rep = check_soundness_gap(reduce_coloring(cycle_graph(4), 2))
    assert rep.overall and rep.checks[0].observed <= 1e-8


def test_soundness_reduced_gadget():
    rep = check_soundness_gap(build_gadget(2, 2), TrainOptions(bounded=True))
    assert rep.overall
    assert {c.name for c in rep.checks} == {"trainer optimum at a=(+1,+1)", "trainer optimum at a=(-1,+1)",
                                            "trainer optimum at a=(-1,-1)"}


def test_soundness_setcover():
    assert check_soundness_gap(reduce_set_cover(SC)).overall


def test_unverifiable_past_cap():
    out = compose_with_gadget(reduce_coloring(cycle_graph(4), 2), 2, build_gadget(2, simple_pair=True))
    rep = check_soundness_gap(out, TrainOptions(bounded=True, enum_cap=8))
    assert rep.status == UNVERIFIABLE and not rep.overall
    assert "unverifiable" in rep.note


def test_strict_exceedance():
    rep = VerifyReport()
    rep.add_gt("at the bound", 1.0, 1.0 + 1e-12, 1e-9)
    assert rep.finish().status == FAIL
    rep = VerifyReport()
    rep.add_gt("above", 1.0, 1.1, 1e-9)
    assert rep.finish().status == PASS


def test_wrong_witness_fails():
    out = reduce_set_cover(SC)
    rep = check_witness(out, [0, 1, 2], tol=1e-12)
    # a larger cover is a valid witness whose loss matches its own size
    assert rep.overall
    with pytest.raises(ValueError):
        check_witness(out, "not a cover")


def test_roundtrip():
    rep = roundtrip_setcover(SC)
    assert rep.overall and "t* = 2" in rep.checks[0].name
    rep = roundtrip_setcover(SetCoverInstance(2, ({1, 2}, {1})))
    assert rep.overall and "t* = 1" in rep.checks[0].name
    rep = roundtrip_setcover(SetCoverInstance(3, ({1}, {2})))
    assert rep.status == FAIL and "rejected" in rep.note


def test_report_roundtrip():
    rep = check_witness(reduce_set_cover(SC), [0, 1])
    back = report_from_dict(rep.to_dict())
    assert back.to_dict() == rep.to_dict()
