import pytest

from ccrs.sim.doc_sim import DocSimulator
from ccrs.sim.equivalence import build_simulator, check_equivalence
from ccrs.sim.hdl_sim import HdlSimulator
from ccrs.sim.stimulus import SimulationError

from conftest import compile_source, corpus_documents, lower_top


def test_commutativity_proved_in_four_evaluations():
    a = compile_source("module m(input a, input b, output y); assign y = a & b; endmodule")
    b = compile_source("module m(input a, input b, output y); assign y = b & a; endmodule")
    verdict = check_equivalence(a, b)
    assert verdict.is_equivalent
    assert verdict.mode == "exhaustive"
    assert verdict.evaluations == 4


def test_and_vs_or_counterexample():
    a = compile_source("module m(input a, input b, output y); assign y = a & b; endmodule")
    b = compile_source("module m(input a, input b, output y); assign y = a | b; endmodule")
    verdict = check_equivalence(a, b)
    assert verdict.kind == "counterexample"
    row = verdict.stimulus.cycles[verdict.cycle]
    assert (row["a"], row["b"]) in {(0, 1), (1, 0)}  # the only disagreeing points
    assert verdict.port == "y"
    # the counterexample replays to a real mismatch
    ta = HdlSimulator(a).run(verdict.stimulus)
    tb = HdlSimulator(b).run(verdict.stimulus)
    assert ta.cycles[verdict.cycle]["y"] != tb.cycles[verdict.cycle]["y"]


def test_majority_proved_in_eight_evaluations():
    src = "module m(input a, input b, input c, output y);" \
          " assign y = (a & b) | (a & c) | (b & c); endmodule"
    design, _, doc = lower_top(src)
    verdict = check_equivalence(design, doc)
    assert verdict.is_equivalent and verdict.evaluations == 8


def test_sequential_exhaustive_depth():
    src = ("module m(input clk, input en, output reg [1:0] q);"
           " always @(posedge clk) begin if (en) q <= q + 2'd1; end endmodule")
    design, _, doc = lower_top(src)
    verdict = check_equivalence(design, doc, depth=4)
    assert verdict.is_equivalent
    assert verdict.evaluations == (2 ** 1) ** 4 * 4  # all sequences, 4 cycles each


def test_random_mode_reports_inconclusive_pass():
    src = "module m(input a, input b, output y); assign y = a & b; endmodule"
    design, _, doc = lower_top(src)
    verdict = check_equivalence(design, doc, mode="random", vectors=50, cycles=4)
    assert verdict.kind == "inconclusive"
    assert verdict.evaluations == 50


def test_tiny_budget_falls_back_to_random():
    src = "module m(input a, input b, output y); assign y = a & b; endmodule"
    design, _, doc = lower_top(src)
    verdict = check_equivalence(design, doc, budget=1, vectors=10)
    assert verdict.mode == "random"
    assert verdict.kind == "inconclusive"


def test_same_seed_same_verdict():
    a = compile_source(
        "module m(input [3:0] v, output [3:0] y); assign y = v + 4'd1; endmodule")
    b = compile_source(
        "module m(input [3:0] v, output [3:0] y); assign y = v + 4'd2; endmodule")
    v1 = check_equivalence(a, b, mode="random", seed=7, vectors=20)
    v2 = check_equivalence(a, b, mode="random", seed=7, vectors=20)
    assert v1 == v2
    assert v1.kind == "counterexample"


def test_interface_mismatch_is_hard_error():
    a = compile_source("module m(input a, output y); assign y = a; endmodule")
    b = compile_source("module m(input b, output y); assign y = b; endmodule")
    with pytest.raises(SimulationError):
        check_equivalence(a, b)


def test_self_equivalence_across_corpus():
    for name, design, doc in corpus_documents():
        assert check_equivalence(design, design).is_equivalent, name
        assert check_equivalence(doc, doc).is_equivalent, name


def test_build_simulator_dispatch():
    design, _, doc = lower_top(
        "module m(input a, output y); assign y = a; endmodule")
    assert isinstance(build_simulator(design), HdlSimulator)
    assert isinstance(build_simulator(doc), DocSimulator)
    sim = build_simulator(doc)
    assert build_simulator(sim) is sim
