import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import JAVA_METHODS
from nmtrepair.lexabs import (
    BASE_IDIOMS,
    AbstractedMethod,
    IdMapping,
    LexError,
    MethodAbstractor,
    Token,
    UnmappableId,
    abstract_method,
    abstract_pair,
    classify_roles,
    concretize,
    concretize_placeholder,
    dump_mapping,
    is_id_token,
    load_mapping,
    mine_idioms,
    read_idioms,
    split_id,
    tokenize,
    write_idioms,
)
from nmtrepair.lexabs.roles import ID_CATEGORIES
from nmtrepair.treediff import is_valid_method


def lexemes(tokens):
    return [t.lexeme for t in tokens]


# -- tokenize ------------------------------------------------------------------

def test_tokenize_declaration():
    toks = tokenize("int x = 0 ;")
    assert toks == [Token("int", "keyword"), Token("x", "identifier"), Token("=", "operator"),
                    Token("0", "int_literal"), Token(";", "separator")]


def test_line_comment_is_dropped():
    assert tokenize("// note\nreturn a;") == [
        Token("return", "keyword"), Token("a", "identifier"), Token(";", "separator")]


def test_escaped_quote_stays_in_one_string_token():
    toks = tokenize(r'"a\"b"')
    assert toks == [Token(r'"a\"b"', "string_literal")]


def test_annotations_and_block_comments_removed():
    toks = tokenize("@Override @SuppressWarnings(\"x\") /* doc */ void f() { }")
    assert lexemes(toks) == ["void", "f", "(", ")", "{", "}"]


@pytest.mark.parametrize("source, offset", [
    ('x = "abc', 4),
    ("a /* open", 2),
    ("a # b", 2),
    ("'a", 0),
])
def test_lex_errors_carry_offset(source, offset):
    with pytest.raises(LexError) as info:
        tokenize(source)
    assert info.value.offset == offset


@pytest.mark.parametrize("source, category", [
    ("0x1F", "int_literal"), ("0b101", "int_literal"), ("10L", "int_literal"),
    ("1.5e-3f", "float_literal"), ("2.0", "float_literal"), (".5", "float_literal"),
    ("'\\n'", "char_literal"), ("true", "bool_literal"), ("false", "bool_literal"),
    (">>>=", "operator"), ("::", "separator"), ("...", "separator"),
])
def test_literal_and_operator_forms(source, category):
    (tok,) = tokenize(source)
    assert tok == Token(source, category)


def test_whitespace_is_not_a_token():
    assert tokenize("  \n\t ") == []


# -- roles ----------------------------------------------------------------------

def roles_of(source):
    return {t.lexeme: r for t, r in classify_roles(tokenize(source)) if r is not None}


def test_call_is_method():
    assert roles_of("go(x);")["go"] == "METHOD"


def test_declaration_type_then_var():
    roles = roles_of("Foo x;")
    assert roles == {"Foo": "TYPE", "x": "VAR"}


def test_after_new_is_type():
    assert roles_of("x = new bar();")["bar"] == "TYPE"


def test_bool_literal_gets_no_role():
    assert [r for _, r in classify_roles(tokenize("true"))] == [None]


def test_literal_roles():
    roles = roles_of('s = "a"; c = \'b\'; n = 7; d = 2.5;')
    assert roles['"a"'] == "STRING"
    assert roles["'b'"] == "CHAR"
    assert roles["7"] == "INT"
    assert roles["2.5"] == "FLOAT"


@pytest.mark.parametrize("source", JAVA_METHODS)
def test_classify_roles_total_and_deterministic(source):
    toks = tokenize(source)
    first = classify_roles(toks)
    assert first == classify_roles(toks)
    for tok, role in first:
        if tok.category == "identifier":
            assert role in ("METHOD", "VAR", "TYPE")


# -- abstraction ----------------------------------------------------------------

def test_abstract_pair_reference_example():
    src = tokenize("public int getValue ( ) { return count ; }")
    abs_b, abs_f, mapping = abstract_pair(src, src, frozenset())
    assert str(abs_b) == "public int METHOD_1 ( ) { return VAR_1 ; }"
    assert abs_f == abs_b
    assert mapping.entries == {"METHOD_1": "getValue", "VAR_1": "count"}


def test_idiom_literal_kept_and_no_id_allocated():
    buggy = tokenize("int f() { return 1; }")
    fixed = tokenize("int f() { return 0; }")
    abs_b, abs_f, mapping = abstract_pair(buggy, fixed, frozenset({"0"}))
    assert "0" in abs_f.tokens
    assert "INT_2" not in abs_f.tokens
    assert mapping.entries == {"METHOD_1": "f", "INT_1": "1"}


def test_fixed_reuses_ids_and_extends_mapping():
    buggy = tokenize("void a() { x = y; }")
    fixed = tokenize("void a() { x = z + y; }")
    abs_b, abs_f, mapping = abstract_pair(buggy, fixed)
    assert str(abs_b) == "void METHOD_1 ( ) { VAR_1 = VAR_2 ; }"
    assert str(abs_f) == "void METHOD_1 ( ) { VAR_1 = VAR_3 + VAR_2 ; }"
    assert mapping["VAR_3"] == "z"


def test_same_lexeme_in_two_categories():
    abs_m, mapping = abstract_method(tokenize("void foo() { foo(foo); }"))
    assert str(abs_m) == "void METHOD_1 ( ) { METHOD_1 ( VAR_1 ) ; }"
    assert mapping.entries == {"METHOD_1": "foo", "VAR_1": "foo"}


def _first_use_ok(abstracted):
    seen = {c: 0 for c in ID_CATEGORIES}
    for tok in abstracted:
        if is_id_token(tok):
            cat, idx = split_id(tok)
            if idx > seen[cat] + 1:
                return False
            seen[cat] = max(seen[cat], idx)
    return True


@pytest.mark.parametrize("source", JAVA_METHODS)
def test_id_freshness_first_use_order(source):
    abs_m, mapping = abstract_method(tokenize(source), BASE_IDIOMS)
    assert _first_use_ok(abs_m.tokens)
    assert set(abs_m.ids()) <= set(mapping.entries)


def test_id_freshness_joint_over_pair():
    buggy, fixed = tokenize(JAVA_METHODS[2]), tokenize(JAVA_METHODS[3])
    abs_b, abs_f, _ = abstract_pair(buggy, fixed)
    assert _first_use_ok(abs_b.tokens + abs_f.tokens)


@pytest.mark.parametrize("source", JAVA_METHODS)
def test_idiom_stability(source):
    toks = tokenize(source)
    small, _ = abstract_method(toks, frozenset({"i"}))
    large, _ = abstract_method(toks, BASE_IDIOMS | {"i"})
    cats_small = {split_id(t)[0] for t in small.ids()}
    cats_large = {split_id(t)[0] for t in large.ids()}
    assert cats_large <= cats_small
    assert len(set(large.ids())) <= len(set(small.ids()))


def test_mapping_is_bijective():
    with pytest.raises(ValueError):
        IdMapping({"VAR_1": "x", "VAR_2": "x"})


def test_mapping_serialization_round_trip():
    mapping = IdMapping({"STRING_1": '"a\tb\\n"', "VAR_1": "x"})
    text = dump_mapping(mapping)
    assert text.count("\n") == 2
    assert load_mapping(text) == mapping


# -- concretize -------------------------------------------------------------------

def test_concretize_inverse_example():
    assert concretize(AbstractedMethod(("return", "VAR_1", ";")), IdMapping({"VAR_1": "count"})) \
        == "return count;"


def test_concretize_idiom_passthrough():
    assert concretize(AbstractedMethod(("return", "0", ";")), IdMapping()) == "return 0;"


def test_unmappable_id_carries_the_id():
    with pytest.raises(UnmappableId) as info:
        concretize(AbstractedMethod(("METHOD_6", "(", ")")), IdMapping({"METHOD_1": "f"}))
    assert info.value.ident == "METHOD_6"


@pytest.mark.parametrize("source", JAVA_METHODS)
def test_round_trip_relexes_identically(source):
    toks = tokenize(source)
    abs_m, mapping = abstract_method(toks, BASE_IDIOMS)
    assert lexemes(tokenize(concretize(abs_m, mapping))) == lexemes(toks)


def test_placeholder_concretization_parses():
    abs_m, _ = abstract_method(tokenize(JAVA_METHODS[4]))
    assert is_valid_method(concretize_placeholder(abs_m))


_IDENT = st.sampled_from(["a", "b", "foo", "Bar", "get", "i", "size", "x1", "_t"])
_ATOM = st.one_of(_IDENT, st.sampled_from(["0", "1", "42", "0x1F", "3.5", "1e3", "2f", "7L",
                                           '"s"', '"a b"', "'c'", "'\\''", "true", "null"]))
_OP = st.sampled_from(["+", "-", "*", "/", "%", "<", "<=", ">>", ">>>", "==", "!=", "&&", "||",
                       "&", "|", "^", "<<", ">", ">="])


@st.composite
def _expression(draw):
    parts = [draw(_ATOM)]
    for _ in range(draw(st.integers(0, 4))):
        parts += [draw(_OP), draw(_ATOM)]
    return " ".join(parts)


@st.composite
def _method_source(draw):
    stmts = []
    for _ in range(draw(st.integers(1, 5))):
        kind = draw(st.integers(0, 4))
        e = draw(_expression())
        if kind == 0:
            stmts.append(f"int {draw(_IDENT)} = {e};")
        elif kind == 1:
            stmts.append(f"{draw(_IDENT)}.{draw(_IDENT)}({e});")
        elif kind == 2:
            stmts.append(f"if ({e}) {{ return {draw(_ATOM)}; }}")
        elif kind == 3:
            stmts.append(f"{draw(_IDENT)}[{draw(_ATOM)}] = -{draw(_ATOM)};")
        else:
            stmts.append(f"for (int i = 0; i < {e}; i++) {{ {draw(_IDENT)}++; }}")
    return "void m(int a) { " + " ".join(stmts) + " }"


@settings(max_examples=200, deadline=None)
@given(_method_source())
def test_round_trip_property(source):
    toks = tokenize(source)
    abs_m, mapping = abstract_method(toks, BASE_IDIOMS)
    assert lexemes(tokenize(concretize(abs_m, mapping))) == lexemes(toks)
    assert _first_use_ok(abs_m.tokens)


# -- idioms -----------------------------------------------------------------------

def test_mine_idioms_rank_one():
    corpus = [tokenize("i = i + i + j ; k = j ;")] * 3
    # 3 distinct lexemes; a fraction of 0.34 admits exactly one
    assert mine_idioms(corpus, 0.34, frozenset({"size"})) == ["i", "size"]


def test_mine_idioms_floor_to_zero_keeps_base():
    corpus = [tokenize("a = b ;")]
    assert mine_idioms(corpus, 0.00005, frozenset({"x"})) == ["x"]


def test_mine_idioms_ignores_keywords_and_separators():
    corpus = [tokenize("return return return a ;")]
    assert mine_idioms(corpus, 0.99, frozenset()) == []


@pytest.mark.parametrize("fraction", [0, 1, -0.1, 1.5])
def test_mine_idioms_rejects_bad_fraction(fraction):
    with pytest.raises(ValueError):
        mine_idioms([tokenize("a")], fraction)


def test_mine_idioms_rejects_empty_corpus():
    with pytest.raises(ValueError):
        mine_idioms([], 0.1)


def test_idiom_file_sorted_round_trip(tmp_path):
    path = tmp_path / "idioms.txt"
    write_idioms({"size", "0", "i"}, path)
    assert path.read_text().splitlines() == ["0", "i", "size"]
    assert read_idioms(path) == frozenset({"0", "i", "size"})


def test_idioms_must_not_look_like_ids(tmp_path):
    path = tmp_path / "idioms.txt"
    path.write_text("VAR_1\n")
    with pytest.raises(ValueError):
        read_idioms(path)


# -- estimator --------------------------------------------------------------------

def test_method_abstractor_estimator_api():
    from sklearn.base import clone
    from sklearn.exceptions import NotFittedError

    est = MethodAbstractor(top_fraction=0.05)
    assert clone(est).get_params() == {"idioms": None, "top_fraction": 0.05}
    with pytest.raises(NotFittedError):
        est.transform(["int f() { return 0; }"])
    est.fit(JAVA_METHODS)
    out = est.transform(JAVA_METHODS[:2])
    # getValue is a shipped idiom, count is not
    assert "getValue" in est.idioms_
    assert str(out[0][0]) == "public int getValue ( ) { return VAR_1 ; }"
    back = est.inverse_transform([a for a, _ in out], [m for _, m in out])
    assert lexemes(tokenize(back[1])) == lexemes(tokenize(JAVA_METHODS[1]))
