import copy
import json
import random

from ccrs.ir.canonical import canonical_form, canonicalize
from ccrs.ir.model import DATA_OP, Lwc, Stn
from ccrs.ir.serial import deserialize, serialize
from ccrs.ir.validate import validate

from conftest import corpus_documents, lower_top, random_document, tiny_doc


def test_wellformed_gate_validates_clean():
    assert validate(tiny_doc()) == []


def test_lwc_without_sinks():
    doc = tiny_doc()
    doc.lwcs.append(Lwc("w3", 1, ("g", 0), []))
    assert "E-NO-SINK" in {d.code for d in validate(doc)}


def test_combinational_loop_detected():
    # oracle: brute-force cycle enumeration on the 2-node graph
    edges = {("x", "y"), ("y", "x")}
    def cycles():
        found = []
        for a, b in edges:
            if (b, a) in edges and a < b:
                found.append({a, b})
        return found
    assert cycles() == [{"x", "y"}]

    doc = tiny_doc()
    x = Stn("x", DATA_OP, "位非", opcode="bit_not",
            inputs=[("in0", 1)], outputs=[("out", 1)])
    y = Stn("y", DATA_OP, "位非", opcode="bit_not",
            inputs=[("in0", 1)], outputs=[("out", 1)])
    doc.stns.extend([x, y])
    doc.lwcs.append(Lwc("wx", 1, ("x", 0), [("y", 0)]))
    doc.lwcs.append(Lwc("wy", 1, ("y", 0), [("x", 0)]))
    diags = validate(doc)
    cycle = [d for d in diags if d.code == "E-COMB-CYCLE"]
    assert cycle and "x" in cycle[0].message and "y" in cycle[0].message


def test_validate_names_offender():
    doc = tiny_doc()
    doc.lwcs[2].sinks.append(("py", 0))  # double-feeds the output port
    diags = validate(doc)
    assert any(d.code == "E-MULTI-FEED" and "py" in d.message for d in diags)


def test_width_mismatch_flagged():
    doc = tiny_doc()
    doc.lwcs[0].width = 2
    assert "E-WIDTH" in {d.code for d in validate(doc)}


def test_unfed_input_flagged():
    doc = tiny_doc()
    doc.lwcs.pop(1)
    assert "E-UNFED" in {d.code for d in validate(doc)}


def test_branch_row_rules():
    doc = tiny_doc()
    branch = Stn("br", "Branch", "条件",
                 inputs=[("c0", 1), ("v0", 1), ("vd", 1)], outputs=[("out", 1)],
                 attrs={"rows": [{"cond": None, "value": "vd"},
                                 {"cond": "c0", "value": "v0"}]})
    doc.stns.append(branch)
    doc.lwcs.append(Lwc("wb0", 1, ("pa", 0), [("br", 0)]))
    doc.lwcs.append(Lwc("wb1", 1, ("pa", 0), [("br", 1), ("br", 2)]))
    assert "E-BRANCH-ROWS" in {d.code for d in validate(doc)}


def test_case_duplicate_labels_and_coverage():
    doc = tiny_doc()
    case = Stn("cs", "CaseSelect", "选择",
               inputs=[("sel", 1), ("v0", 1), ("v1", 1)], outputs=[("out", 1)],
               attrs={"rows": [{"match": 1, "value": "v0"},
                               {"match": 1, "value": "v1"}]})
    doc.stns.append(case)
    doc.lwcs.append(Lwc("wc0", 1, ("pa", 0), [("cs", 0)]))
    doc.lwcs.append(Lwc("wc1", 1, ("pb", 0), [("cs", 1), ("cs", 2)]))
    diag_codes = {d.code for d in validate(doc)}
    assert "E-DUP-CASE" in diag_codes
    assert "E-CASE-COVER" in diag_codes


def test_serialize_round_trip_and_determinism():
    doc = tiny_doc()
    blob = serialize(doc)
    assert blob == serialize(doc)
    restored, diags = deserialize(blob)
    assert diags == []
    assert serialize(restored) == blob


def test_round_trip_on_corpus():
    for name, _, doc in corpus_documents():
        blob = serialize(doc)
        restored, diags = deserialize(blob)
        assert diags == [], (name, diags)
        assert serialize(restored) == blob, name


def test_deserialize_rejects_unknown_version():
    obj = json.loads(serialize(tiny_doc()))
    obj["version"] = "ccrs-doc/99"
    _, diags = deserialize(json.dumps(obj))
    assert [d.code for d in diags] == ["E-VERSION"]


def test_deserialize_rejects_duplicate_id():
    obj = json.loads(serialize(tiny_doc()))
    obj["stns"].append(obj["stns"][0])
    doc, diags = deserialize(json.dumps(obj))
    assert doc is None
    assert "E-DUP-ID" in {d.code for d in diags}


def test_deserialize_rejects_garbage():
    doc, diags = deserialize(b"not json at all {")
    assert doc is None and diags[0].code == "E-SCHEMA"


def shuffle_and_rename(doc, seed: int):
    clone = copy.deepcopy(doc)
    rng = random.Random(seed)
    mapping = {}
    for stn in clone.all_stns():
        mapping[stn.id] = f"r{rng.randrange(10 ** 9)}"
    for stn in clone.all_stns():
        stn.id = mapping[stn.id]
        for row in stn.attrs.get("rows", []):
            if row.get("child") is not None:
                row["child"] = mapping[row["child"]]
    for lwc in clone.lwcs:
        lwc.id = f"q{rng.randrange(10 ** 9)}"
        lwc.source = (mapping[lwc.source[0]], lwc.source[1])
        lwc.sinks = [(mapping[s], i) for s, i in lwc.sinks]
    rng.shuffle(clone.stns)
    rng.shuffle(clone.lwcs)
    for lwc in clone.lwcs:
        rng.shuffle(lwc.sinks)
    return clone


def test_canonical_form_invariances_on_corpus():
    for name, _, doc in corpus_documents():
        reference = canonical_form(doc)
        for seed in (1, 2, 3):
            assert canonical_form(shuffle_and_rename(doc, seed)) == reference, name


def test_canonical_form_invariances_on_random_docs():
    for seed in range(20):
        doc = random_document(seed, sequential=seed % 3 == 0)
        assert validate(doc) == [], (seed, validate(doc))
        reference = canonical_form(doc)
        assert canonical_form(shuffle_and_rename(doc, seed + 100)) == reference


def test_canonical_form_distinguishes_opcodes():
    and_doc = tiny_doc()
    or_doc = tiny_doc()
    or_doc.stns[3].opcode = "bit_or"
    or_doc.stns[3].label = "位或"
    assert canonical_form(and_doc) != canonical_form(or_doc)


def test_canonical_ignores_geometry_and_metadata():
    doc = tiny_doc()
    reference = canonical_form(doc)
    doc.geometry = {"boxes": {}}
    doc.metadata = {"trace": {"g": [[0, 5]]}}
    assert canonical_form(doc) == reference


def test_canonicalize_is_idempotent():
    for seed in range(5):
        doc = random_document(seed)
        once = canonicalize(doc)
        assert canonical_form(once) == canonical_form(doc)


def test_width_conservation_on_corpus():
    for name, _, doc in corpus_documents():
        by_id = doc.stn_map()
        for lwc in doc.lwcs:
            src = by_id[lwc.source[0]]
            assert src.outputs[lwc.source[1]][1] == lwc.width, name
            for sink_id, idx in lwc.sinks:
                assert by_id[sink_id].inputs[idx][1] == lwc.width, name


def test_lowered_corpus_validates_clean():
    for name, _, doc in corpus_documents():
        assert validate(doc) == [], name
