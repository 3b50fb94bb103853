import json
import subprocess
import sys
from pathlib import Path

from ccrs.cli import main

from conftest import CORPUS_DIR


def run(*argv) -> int:
    return main([str(a) for a in argv])


def test_convert_happy_path(tmp_path):
    out = tmp_path / "full_adder.ccrs.json"
    assert run("convert", CORPUS_DIR / "full_adder.v", "-o", out) == 0
    doc = json.loads(out.read_text())
    assert doc["version"] == "ccrs-doc/1"
    assert doc["module"] == "full_adder"


def test_convert_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.v"
    bad.write_text("module m(input a output y); endmodule")
    assert run("convert", bad) == 1
    err = capsys.readouterr().err
    assert "E-SYNTAX" in err and str(bad) in err


def test_convert_elaboration_error(tmp_path):
    bad = tmp_path / "bad.v"
    bad.write_text("module m(output y); assign y = ghost; endmodule")
    assert run("convert", bad) == 1


def test_convert_lowering_error_is_exit_2(tmp_path):
    latchy = tmp_path / "latch.v"
    latchy.write_text("module m(input c, input a, output reg y);"
                      " always @(*) begin if (c) y = a; end endmodule")
    assert run("convert", latchy) == 2


def test_convert_unreadable_path(tmp_path):
    assert run("convert", tmp_path / "missing.v") == 10


def test_emit_happy_path_and_self_check(tmp_path):
    doc_path = tmp_path / "fa.ccrs.json"
    assert run("convert", CORPUS_DIR / "full_adder.v", "-o", doc_path) == 0
    out = tmp_path / "fa.v"
    assert run("emit", doc_path, "-o", out, "--self-check") == 0
    assert "module full_adder" in out.read_text()


def test_emit_invalid_document(tmp_path):
    bad = tmp_path / "bad.ccrs.json"
    bad.write_text(json.dumps({"version": "ccrs-doc/1", "module": "m",
                               "ports": [], "stns": [], "lwcs": [
                                   {"id": "w0", "width": 1,
                                    "source": ["ghost", 0], "sinks": []}],
                               "clockDomains": [], "metadata": {}}))
    assert run("emit", bad) == 2


def test_render_happy_and_deterministic(tmp_path):
    doc_path = tmp_path / "fa.ccrs.json"
    run("convert", CORPUS_DIR / "full_adder.v", "-o", doc_path)
    out1 = tmp_path / "a.svg"
    out2 = tmp_path / "b.svg"
    assert run("render", doc_path, "-o", out1, "--clock-regions") == 0
    assert run("render", doc_path, "-o", out2, "--clock-regions") == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_render_scale_zero_is_flag_error(tmp_path):
    doc_path = tmp_path / "fa.ccrs.json"
    run("convert", CORPUS_DIR / "full_adder.v", "-o", doc_path)
    assert run("render", doc_path, "--scale", "0") == 11


def test_check_design_against_its_own_conversion(tmp_path):
    doc_path = tmp_path / "fa.ccrs.json"
    run("convert", CORPUS_DIR / "full_adder.v", "-o", doc_path)
    assert run("check", CORPUS_DIR / "full_adder.v", doc_path) == 0


def test_check_counterexample(tmp_path, capsys):
    a = tmp_path / "a.v"
    b = tmp_path / "b.v"
    a.write_text("module m(input a, input b, output y); assign y = a & b; endmodule")
    b.write_text("module m(input a, input b, output y); assign y = a | b; endmodule")
    assert run("check", a, b) == 3
    out = capsys.readouterr().out
    assert "counterexample" in out and "mismatch" in out


def test_check_budget_exhaustion_is_inconclusive(tmp_path):
    a = CORPUS_DIR / "counter4.v"
    assert run("check", a, a, "--budget", "1", "--vectors", "3",
               "--cycles", "2") == 4


def test_validate_command(tmp_path, capsys):
    doc_path = tmp_path / "fa.ccrs.json"
    run("convert", CORPUS_DIR / "full_adder.v", "-o", doc_path)
    assert run("validate", doc_path) == 0
    obj = json.loads(doc_path.read_text())
    obj["lwcs"][0]["sinks"] = []
    doc_path.write_text(json.dumps(obj))
    assert run("validate", doc_path) == 2
    assert "E-NO-SINK" in capsys.readouterr().err


def test_convert_then_emit_idempotent(tmp_path):
    doc1 = tmp_path / "one.ccrs.json"
    doc2 = tmp_path / "two.ccrs.json"
    run("convert", CORPUS_DIR / "alu_slice.v", "-o", doc1)
    run("convert", CORPUS_DIR / "alu_slice.v", "-o", doc2)
    assert doc1.read_bytes() == doc2.read_bytes()


def test_hierarchical_convert_embeds_children(tmp_path):
    out = tmp_path / "hier.ccrs.json"
    assert run("convert", CORPUS_DIR / "hier_top.v", "-o", out) == 0
    doc = json.loads(out.read_text())
    assert doc["module"] == "hier_top"
    assert "toggle_ff" in doc["metadata"]["modules"]
    hdl = tmp_path / "hier.v"
    assert run("emit", out, "-o", hdl, "--self-check") == 0
    text = hdl.read_text()
    assert text.index("module toggle_ff") < text.index("module hier_top")


def test_ambiguous_top_needs_the_flag(tmp_path, capsys):
    src = tmp_path / "two.v"
    src.write_text("module one(input a, output y); assign y = a; endmodule\n"
                   "module two(input a, output y); assign y = ~a; endmodule\n")
    assert run("convert", src) == 1
    assert "ambiguous" in capsys.readouterr().err
    assert run("convert", src, "--top", "two",
               "-o", tmp_path / "two.ccrs.json") == 0


def test_check_hierarchical_document(tmp_path):
    doc_path = tmp_path / "hier.ccrs.json"
    assert run("convert", CORPUS_DIR / "hier_top.v", "-o", doc_path) == 0
    assert run("check", CORPUS_DIR / "hier_top.v", doc_path) == 0


def test_top_flag_selects_module(tmp_path):
    out = tmp_path / "ff.ccrs.json"
    assert run("convert", CORPUS_DIR / "hier_top.v", "--top", "toggle_ff",
               "-o", out) == 0
    assert json.loads(out.read_text())["module"] == "toggle_ff"


def test_installed_entry_point_smoke():
    proc = subprocess.run(
        [sys.executable, "-m", "ccrs.cli", "convert",
         str(CORPUS_DIR / "mux2.v"), "-o", "/tmp/mux2.ccrs.json"],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert Path("/tmp/mux2.ccrs.json").exists()
