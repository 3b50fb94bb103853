from ccrs.hdl import ast
from ccrs.hdl.elaborate import elaborate
from ccrs.hdl.lexer import tokenize
from ccrs.hdl.parser import parse

from conftest import CORPUS, compile_source


def run(source: str):
    tokens, diags = tokenize(source)
    assert diags == []
    tree, diags = parse(tokens)
    assert tree is not None, diags
    return elaborate(tree)


def codes(diags):
    return sorted(d.code for d in diags)


def test_width_of_bitwise_and():
    design = compile_source(
        "module m(input a, input b, output y); assign y = a & b; endmodule")
    expr = design.modules["m"].assigns[0].expr
    assert expr.width == 1


def test_width_rules_table():
    design = compile_source("""
module m(input [3:0] a, input [1:0] b, output [7:0] y);
  wire [3:0] w_max;
  wire cmp;
  wire logi;
  wire red;
  wire [5:0] cat;
  wire [3:0] shifted;
  assign w_max = a + b;
  assign cmp = a < b;
  assign logi = a && b;
  assign red = ^a;
  assign cat = {a, b};
  assign shifted = a << 2;
  assign y = {cat, b};
endmodule
""")
    m = design.modules["m"]
    widths = {a.target: a.expr.width for a in m.assigns}
    assert widths == {"w_max": 4, "cmp": 1, "logi": 1, "red": 1, "cat": 6,
                      "shifted": 4, "y": 8}


def test_every_expression_has_positive_width():
    for path in CORPUS:
        design = compile_source(path.read_text())
        for module in design.modules.values():
            for assign in module.assigns:
                for expr in _walk(assign.expr):
                    assert expr.width is not None and expr.width >= 1
            for proc in module.processes:
                for expr, _ in _stmt_exprs(proc.body):
                    for node in _walk(expr):
                        assert node.width is not None and node.width >= 1


def _walk(expr):
    yield expr
    for name in ("operand", "left", "right", "cond", "then_val", "else_val"):
        child = getattr(expr, name, None)
        if child is not None:
            yield from _walk(child)
    for part in getattr(expr, "parts", ()):
        yield from _walk(part)


def _stmt_exprs(stmt):
    if isinstance(stmt, ast.Block):
        for s in stmt.stmts:
            yield from _stmt_exprs(s)
    elif isinstance(stmt, ast.AssignStmt):
        yield stmt.expr, stmt.span
    elif isinstance(stmt, ast.IfStmt):
        yield stmt.cond, stmt.span
        yield from _stmt_exprs(stmt.then_stmt)
        if stmt.else_stmt is not None:
            yield from _stmt_exprs(stmt.else_stmt)
    elif isinstance(stmt, ast.CaseStmt):
        yield stmt.selector, stmt.span
        for item in stmt.items:
            yield from _stmt_exprs(item.body)


def test_multiple_drivers():
    design, diags = run(
        "module m(input a, input b, output y);"
        " assign y = a; assign y = b; endmodule")
    assert design is None
    assert "E-MULTI-DRIVER" in codes(diags)


def test_combinational_cycle():
    # oracle: brute-force cycle search on the 2-node dependency graph
    deps = {"a": {"b"}, "b": {"a"}}
    def reachable(start, goal):
        seen, stack = set(), [start]
        while stack:
            v = stack.pop()
            for w in deps[v]:
                if w == goal:
                    return True
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False
    assert reachable("a", "a") and reachable("b", "b")

    design, diags = run(
        "module m(input x, output y); wire a; wire b;"
        " assign a = b; assign b = a; assign y = a & x; endmodule")
    assert design is None
    cycle = [d for d in diags if d.code == "E-COMB-CYCLE"]
    assert cycle and "a" in cycle[0].message and "b" in cycle[0].message


def test_self_cycle_in_comb_process():
    design, diags = run(
        "module m(input x, output reg y); always @(*) y = y ^ x; endmodule")
    assert design is None
    assert "E-COMB-CYCLE" in codes(diags)


def test_latch_warning_is_not_an_error():
    design, diags = run(
        "module m(input c, input a, output reg y);"
        " always @(*) begin if (c) y = a; end endmodule")
    assert design is not None
    assert codes(diags) == ["W-LATCH"]


def test_no_latch_warning_with_prior_assignment():
    design, diags = run(
        "module m(input c, input a, output reg y);"
        " always @(*) begin y = 1'd0; if (c) y = a; end endmodule")
    assert design is not None and diags == []


def test_full_case_coverage_needs_no_default():
    design, diags = run("""
module m(input [1:0] s, input a, input b, output reg y);
  always @(*) begin
    case (s)
      2'd0: y = a;
      2'd1: y = b;
      2'd2: y = a;
      2'd3: y = b;
    endcase
  end
endmodule
""")
    assert design is not None and diags == []


def test_undeclared_identifier():
    design, diags = run("module m(output y); assign y = ghost; endmodule")
    assert design is None
    assert "E-UNDECLARED" in codes(diags)


def test_undriven_net():
    design, diags = run("module m(output y); wire w; assign y = w; endmodule")
    assert design is None
    assert "E-UNDRIVEN" in codes(diags)


def test_assignment_kind_enforced():
    design, diags = run(
        "module m(input clk, input d, output reg q);"
        " always @(posedge clk) q = d; endmodule")
    assert design is None and "E-ASSIGN-KIND" in codes(diags)
    design, diags = run(
        "module m(input d, output reg q); always @(*) q <= d; endmodule")
    assert design is None and "E-ASSIGN-KIND" in codes(diags)


def test_clock_cannot_be_data():
    design, diags = run(
        "module m(input clk, input a, output y, output reg q);"
        " assign y = clk & a; always @(posedge clk) q <= a; endmodule")
    assert design is None
    assert "E-CLOCK" in codes(diags)


def test_clock_must_be_one_bit_input():
    design, diags = run(
        "module m(input [1:0] clk, input d, output reg q);"
        " always @(posedge clk) q <= d; endmodule")
    assert design is None and "E-CLOCK" in codes(diags)


def test_derived_clock_rejected():
    design, diags = run(
        "module m(input clk, input en, input d, output reg q);"
        " wire g; assign g = clk & en; always @(posedge g) q <= d; endmodule")
    assert design is None and "E-CLOCK" in codes(diags)


def test_parameters_fold_into_literals():
    design = compile_source("""
module m(input [3:0] a, output [3:0] y);
  parameter STEP = 3;
  assign y = a + STEP;
endmodule
""")
    expr = design.modules["m"].assigns[0].expr
    assert isinstance(expr.right, ast.Literal) and expr.right.value == 3


def test_parameter_in_range():
    design = compile_source("""
module m(input [WIDTH-1:0] a, output [WIDTH-1:0] y);
  parameter WIDTH = 4;
  assign y = a;
endmodule
""")
    assert design.modules["m"].signals["a"].width == 4


def test_select_out_of_range():
    design, diags = run(
        "module m(input [3:0] a, output y); assign y = a[4]; endmodule")
    assert design is None and "E-RANGE" in codes(diags)


def test_case_label_too_wide():
    design, diags = run("""
module m(input [1:0] s, input a, output reg y);
  always @(*) begin
    case (s)
      5: y = a;
      default: y = 1'd0;
    endcase
  end
endmodule
""")
    assert design is None and "E-RANGE" in codes(diags)


def test_nonconstant_shift():
    design, diags = run(
        "module m(input [3:0] a, input [1:0] n, output [3:0] y);"
        " assign y = a << n; endmodule")
    assert design is None and "E-NONCONST" in codes(diags)


def test_unknown_module():
    design, diags = run("module m(input a); ghost u0 (.x(a)); endmodule")
    assert design is None and "E-UNKNOWN-MODULE" in codes(diags)


def test_recursive_instantiation():
    design, diags = run("module m(input a); m u0 (.a(a)); endmodule")
    assert design is None and "E-RECURSION" in codes(diags)


def test_instance_binding_width_mismatch():
    design, diags = run("""
module child(input [3:0] x, output [3:0] y);
  assign y = x;
endmodule
module top(input [1:0] a, output [3:0] y);
  child u0 (.x(a), .y(y));
endmodule
""")
    assert design is None and "E-WIDTH" in codes(diags)


def test_unbound_input_rejected():
    design, diags = run("""
module child(input x, output y);
  assign y = x;
endmodule
module top(output y);
  child u0 (.y(y));
endmodule
""")
    assert design is None and "E-PORT-BINDING" in codes(diags)


def test_instance_cycle_detection_through_hierarchy():
    design, diags = run("""
module buffer(input x, output y);
  assign y = x;
endmodule
module top(output o);
  wire a;
  wire b;
  buffer u0 (.x(a), .y(b));
  buffer u1 (.x(b), .y(a));
  assign o = a;
endmodule
""")
    assert design is None and "E-COMB-CYCLE" in codes(diags)


def test_clock_port_classification_propagates():
    design = compile_source("""
module ff(input clk, input d, output reg q);
  always @(posedge clk) q <= d;
endmodule
module top(input clk, input d, output q);
  ff u0 (.clk(clk), .d(d), .q(q));
endmodule
""")
    top = design.modules["top"]
    assert top.clock_nets == {"clk"}
    assert [p.name for p in top.data_inputs] == ["d"]
