import random
from pathlib import Path

import pytest

from ccrs.hdl.elaborate import ElaboratedDesign, elaborate
from ccrs.hdl.lexer import tokenize
from ccrs.hdl.parser import parse
from ccrs.ir.model import BRANCH, CONSTANT, DATA_OP, PORT, TIMING, \
    CcrsDocument, DocPort, Lwc, Stn
from ccrs.lower.templater import lower_with_library

CORPUS_DIR = Path(__file__).resolve().parents[1] / "corpus"
CORPUS = sorted(CORPUS_DIR.glob("*.v"))

assert len(CORPUS) >= 10, "corpus must hold at least ten designs"


def compile_source(source: str) -> ElaboratedDesign:
    tokens, diags = tokenize(source)
    assert not diags, diags
    tree, diags = parse(tokens)
    assert tree is not None, diags
    design, diags = elaborate(tree)
    assert design is not None, diags
    return design


def lower_top(source: str, top: str | None = None):
    """-> (design, top name, document)"""
    design = compile_source(source)
    if top is None:
        candidates = design.top_candidates()
        assert len(candidates) == 1, candidates
        top = candidates[0]
    result = lower_with_library(design, top)
    assert result.doc is not None, result.diagnostics
    return design, top, result.doc


def corpus_documents():
    for path in CORPUS:
        design, top, doc = lower_top(path.read_text())
        yield path.name, design, doc


@pytest.fixture(scope="session")
def corpus_docs():
    return list(corpus_documents())


def tiny_doc() -> CcrsDocument:
    """Two input ports -> one AND -> one output port."""
    a = Stn("pa", PORT, "a", outputs=[("a", 1)], attrs={"port": "a"})
    b = Stn("pb", PORT, "b", outputs=[("b", 1)], attrs={"port": "b"})
    y = Stn("py", PORT, "y", inputs=[("y", 1)], attrs={"port": "y"})
    gate = Stn("g", DATA_OP, "位与", opcode="bit_and",
               inputs=[("in0", 1), ("in1", 1)], outputs=[("out", 1)])
    return CcrsDocument(
        module="tiny",
        ports=[DocPort("a", "in", 1), DocPort("b", "in", 1), DocPort("y", "out", 1)],
        stns=[a, b, y, gate],
        lwcs=[
            Lwc("w0", 1, ("pa", 0), [("g", 0)]),
            Lwc("w1", 1, ("pb", 0), [("g", 1)]),
            Lwc("w2", 1, ("g", 0), [("py", 0)]),
        ])


class DocBuilder:
    """Random valid combinational/sequential documents for property tests.

    Every generated node output ends up consumed (no dangling logic), all
    row values of a Branch share the target width, and shift amounts are
    constants, so the documents stay inside the emitter's renderable set.
    """

    _ASSOC = ["bit_and", "bit_or", "bit_xor", "add", "mul"]
    _BINARY = ["sub", "eq", "ne", "lt", "le", "gt", "ge", "log_and", "log_or"]
    _UNARY = ["bit_not", "log_not", "red_and", "red_or", "red_xor"]
    _GLYPHS = {
        "bit_and": "位与", "bit_or": "位或", "bit_xor": "位异或", "bit_not": "位非",
        "log_and": "逻辑与", "log_or": "逻辑或", "log_not": "逻辑非",
        "red_and": "缩与", "red_or": "缩或", "red_xor": "缩异或",
        "add": "加", "sub": "减", "mul": "乘", "shl": "左移", "shr": "右移",
        "eq": "等", "ne": "不等", "lt": "小于", "le": "不大于",
        "gt": "大于", "ge": "不小于", "concat": "拼接", "select": "取位",
    }

    def __init__(self, seed: int, sequential: bool = False):
        self.rng = random.Random(seed)
        self.sequential = sequential
        self.stns: list[Stn] = []
        self.connections: list[tuple[tuple[str, int, int], tuple[str, int]]] = []
        self.pool: list[tuple[str, int, int]] = []  # (stn id, out idx, width)
        self.consumed: set[tuple[str, int]] = set()
        self.ports: list[DocPort] = []
        self.n = 0

    def _sid(self) -> str:
        self.n += 1
        return f"g{self.n}"

    def _stn(self, *args, **kwargs) -> Stn:
        stn = Stn(self._sid(), *args, **kwargs)
        self.stns.append(stn)
        return stn

    def _pick(self, width: int | None = None) -> tuple[str, int, int]:
        options = [e for e in self.pool if width is None or e[2] == width]
        entry = self.rng.choice(options)
        self.consumed.add((entry[0], entry[1]))
        return entry

    def _connect(self, src, stn, idx):
        self.connections.append((src, (stn.id, idx)))

    def build(self) -> CcrsDocument:
        rng = self.rng
        for i in range(rng.randint(2, 4)):
            width = rng.choice([1, 1, 2, 4])
            name = f"i{i}"
            stn = self._stn(PORT, name, outputs=[(name, width)],
                            attrs={"port": name})
            self.ports.append(DocPort(name, "in", width))
            self.pool.append((stn.id, 0, width))
        for _ in range(rng.randint(1, 2)):
            width = rng.choice([1, 2, 3])
            value = rng.getrandbits(width)
            stn = self._stn(CONSTANT, "", outputs=[("out", width)],
                            attrs={"value": value})
            self.pool.append((stn.id, 0, width))

        for _ in range(rng.randint(3, 8)):
            self._grow()
        if self.sequential:
            self._add_register()

        # everything unconsumed becomes an output port
        out_n = 0
        for stn in list(self.stns):
            for idx, (_, width) in enumerate(stn.outputs):
                if (stn.id, idx) in self.consumed or stn.kind == PORT:
                    continue
                name = f"o{out_n}"
                out_n += 1
                port = self._stn(PORT, name, inputs=[(name, width)],
                                 attrs={"port": name})
                self.ports.append(DocPort(name, "out", width))
                self._connect((stn.id, idx, width), port, 0)
        if out_n == 0:
            entry = self._pick()
            port = self._stn(PORT, "o0", inputs=[("o0", entry[2])],
                             attrs={"port": "o0"})
            self.ports.append(DocPort("o0", "out", entry[2]))
            self._connect(entry, port, 0)

        lwcs: list[Lwc] = []
        groups: dict[tuple[str, int], Lwc] = {}
        for (sid, sidx, width), sink in self.connections:
            key = (sid, sidx)
            if key not in groups:
                groups[key] = Lwc(f"w{len(lwcs)}", width, key, [])
                lwcs.append(groups[key])
            groups[key].sinks.append(sink)
        domains = [("clk", "clk")] if self.sequential else []
        return CcrsDocument(module=f"gen{abs(hash(tuple(sorted(self.consumed)))) % 97}",
                            ports=self.ports, stns=self.stns, lwcs=lwcs,
                            clock_domains=domains)

    def _grow(self) -> None:
        rng = self.rng
        kind = rng.choice(["assoc", "assoc", "binary", "unary", "shift",
                           "select", "concat", "branch"])
        if kind == "assoc":
            code = rng.choice(self._ASSOC)
            arity = rng.randint(2, 3)
            operands = [self._pick() for _ in range(arity)]
            width = max(e[2] for e in operands)
            self._data_op(code, operands, width)
        elif kind == "binary":
            code = rng.choice(self._BINARY)
            operands = [self._pick(), self._pick()]
            width = 1 if code not in ("sub",) else max(e[2] for e in operands)
            self._data_op(code, operands, width)
        elif kind == "unary":
            code = rng.choice(self._UNARY)
            operand = self._pick()
            width = operand[2] if code == "bit_not" else 1
            self._data_op(code, [operand], width)
        elif kind == "shift":
            code = rng.choice(["shl", "shr"])
            value = self._pick()
            amount = rng.randint(1, 3)
            const = self._stn(CONSTANT, "", outputs=[("out", max(1, amount.bit_length()))],
                              attrs={"value": amount})
            amt = (const.id, 0, const.outputs[0][1])
            self.consumed.add((const.id, 0))  # amounts must stay literal
            width = max(value[2], amt[2])
            self._data_op(code, [value, amt], width)
        elif kind == "select":
            value = self._pick()
            if value[2] == 1:
                self._data_op("bit_not", [value], 1)
                return
            msb = self.rng.randint(0, value[2] - 1)
            lsb = self.rng.randint(0, msb)
            if msb - lsb + 1 == value[2]:
                lsb = 1  # a full-width select lowers to a plain passthrough
            stn = self._stn(DATA_OP, self._GLYPHS["select"], opcode="select",
                            inputs=[("in0", value[2])],
                            outputs=[("out", msb - lsb + 1)],
                            attrs={"msb": msb, "lsb": lsb})
            self._connect(value, stn, 0)
            self.pool.append((stn.id, 0, msb - lsb + 1))
        elif kind == "concat":
            operands = [self._pick() for _ in range(self.rng.randint(2, 3))]
            width = sum(e[2] for e in operands)
            self._data_op("concat", operands, width)
        else:  # branch: a 2-row conditional whose values share a width
            width = self.rng.choice([1, 2, 4])
            # a single-consumer Branch feeding a row value would re-nest on
            # the way back in, so rows only take non-Branch sources
            branch_ids = {s.id for s in self.stns if s.kind == BRANCH}
            candidates = [e for e in self.pool
                          if e[2] == width and e[0] not in branch_ids]
            if len(candidates) < 2:
                operands = [self._pick(), self._pick()]
                self._data_op("bit_or", operands, max(e[2] for e in operands))
                return
            cond = self._pick()
            then_val = self.rng.choice(candidates)
            else_val = self.rng.choice(candidates)
            self.consumed.add((then_val[0], then_val[1]))
            self.consumed.add((else_val[0], else_val[1]))
            stn = self._stn(BRANCH, "条件",
                            inputs=[("c0", cond[2]), ("v0", width), ("vd", width)],
                            outputs=[("out", width)],
                            attrs={"rows": [{"cond": "c0", "value": "v0"},
                                            {"cond": None, "value": "vd"}]})
            self._connect(cond, stn, 0)
            self._connect(then_val, stn, 1)
            self._connect(else_val, stn, 2)
            self.pool.append((stn.id, 0, width))

    def _data_op(self, code: str, operands, width: int) -> None:
        inputs = [(f"in{i}", e[2]) for i, e in enumerate(operands)]
        stn = self._stn(DATA_OP, self._GLYPHS[code], opcode=code,
                        inputs=inputs, outputs=[("out", width)])
        for i, e in enumerate(operands):
            self._connect(e, stn, i)
        self.pool.append((stn.id, 0, width))

    def _add_register(self) -> None:
        if "clk" not in {p.name for p in self.ports}:
            stn = self._stn(PORT, "clk", outputs=[("clk", 1)], attrs={"port": "clk"})
            self.ports.insert(0, DocPort("clk", "in", 1))
        d = self._pick()
        reg = self._stn(TIMING, "寄存", inputs=[("d", d[2])],
                        outputs=[("q", d[2])], attrs={"clockDomain": "clk"})
        self._connect(d, reg, 0)
        self.pool.append((reg.id, 0, d[2]))


def random_document(seed: int, sequential: bool = False) -> CcrsDocument:
    return DocBuilder(seed, sequential).build()
