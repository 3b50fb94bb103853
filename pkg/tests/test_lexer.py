from ccrs.hdl.lexer import IDENT, KEYWORD, OPERATOR, PUNCT, SIZED, tokenize

from conftest import CORPUS


def kinds_and_texts(tokens):
    return [(t.kind, t.text) for t in tokens]


def test_assignment_tokens():
    tokens, diags = tokenize("assign y = a & b;")
    assert diags == []
    assert kinds_and_texts(tokens) == [
        (KEYWORD, "assign"), (IDENT, "y"), (OPERATOR, "="), (IDENT, "a"),
        (OPERATOR, "&"), (IDENT, "b"), (PUNCT, ";"),
    ]


def test_empty_input():
    tokens, diags = tokenize("")
    assert tokens == [] and diags == []


def test_sized_literal_value():
    # oracle: the base-2 digits decoded independently of the lexer
    assert int("1010", 2) == 10
    tokens, diags = tokenize("4'b1010")
    assert diags == []
    (tok,) = tokens
    assert tok.kind == SIZED and tok.width == 4 and tok.value == 10


def test_sized_literal_bases_and_underscores():
    tokens, _ = tokenize("8'hFF 8'd25_5 6'o77 4'b1_0_1_0")
    assert [t.value for t in tokens] == [255, 255, 63, 10]


def test_malformed_sized_literals():
    for bad in ("2'b111", "0'd1", "4'bxxxx", "4'hZ"):
        tokens, diags = tokenize(bad)
        assert tokens == []
        assert [d.code for d in diags] == ["E-LITERAL"]


def test_unterminated_comment():
    _, diags = tokenize("assign /* no end")
    assert [d.code for d in diags] == ["E-COMMENT"]


def test_illegal_character():
    tokens, diags = tokenize("assign $ y")
    assert [d.code for d in diags] == ["E-CHAR"]
    assert [t.text for t in tokens] == ["assign", "y"]


def test_comments_discarded():
    tokens, diags = tokenize("a // line\n b /* block\n more */ c")
    assert diags == []
    assert [t.text for t in tokens] == ["a", "b", "c"]


def test_two_char_operators_win():
    tokens, _ = tokenize("a <= b << 2 >= c")
    assert [t.text for t in tokens] == ["a", "<=", "b", "<<", "2", ">=", "c"]


def test_spans_reslice_source():
    for path in CORPUS:
        source = path.read_text()
        tokens, diags = tokenize(source)
        assert diags == []
        for tok in tokens:
            assert tok.span.slice(source) == tok.text
            assert 0 <= tok.span.start <= tok.span.end <= len(source)


def test_whitespace_join_is_lexically_equivalent():
    for path in CORPUS:
        tokens, _ = tokenize(path.read_text())
        again, diags = tokenize(" ".join(t.text for t in tokens))
        assert diags == []
        assert kinds_and_texts(again) == kinds_and_texts(tokens)
