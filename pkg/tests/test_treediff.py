import itertools

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import JAVA_METHODS
from nmtrepair.treediff import (
    NODE_TYPES,
    ApplyError,
    AstNode,
    EditAction,
    ParseError,
    apply,
    bigram_similarity,
    diff,
    dump_actions,
    is_valid_method,
    isomorphic,
    load_actions,
    map_method_pairs,
    match,
    parse_method,
    parse_methods,
)


# -- parsing --------------------------------------------------------------------

@pytest.mark.parametrize("source, sexpr", [
    ("int f(){return 0;}", "Method(f)[Block[Return[Literal(0)]]]"),
    ("void g(int a, String b){ foo(a); }",
     "Method(g)[Parameter(a)[TypeAccess(int)], Parameter(b)[TypeAccess(String)], "
     "Block[Invocation(foo)[VariableRead(a)]]]"),
    ("int f(){return -1;}", "Method(f)[Block[Return[UnaryOperator(-)[Literal(1)]]]]"),
])
def test_parse_known_shapes(source, sexpr):
    assert parse_method(source).to_sexpr() == sexpr


@pytest.mark.parametrize("source", JAVA_METHODS)
def test_corpus_methods_parse_into_taxonomy(source):
    tree = parse_method(source)
    assert tree.node_type == "Method"
    assert all(n.node_type in NODE_TYPES for n in tree.preorder())
    assert tree.tokens


@pytest.mark.parametrize("source", [
    "int f() { return 0; ",
    "int f() { return 0 }",
    "int f() { return 0; } }",
    "x = 1;",
])
def test_invalid_methods_rejected(source):
    assert not is_valid_method(source)
    with pytest.raises(ParseError):
        parse_method(source)


def test_parse_methods_flattens_file():
    src = """
    class A {
        int x = 3;
        A(int x) { this.x = x; }
        int get() { return x; }
        static class B { void h() { } }
    }
    """
    names = [m.label for m in parse_methods(src)]
    assert names == ["A", "get", "h"]


def test_ast_node_rejects_unknown_type():
    with pytest.raises(ValueError):
        AstNode("Lambda")


# -- method pairing ---------------------------------------------------------------

FILE = """
class C {
    int a() { return 1; }
    int b(int x) { return x + 1; }
}
"""


def test_identical_files_pair_every_method():
    pairs = map_method_pairs(FILE, FILE)
    assert [(p.label, q.label) for p, q in pairs] == [("a", "a"), ("b", "b")]


def test_deleted_and_created_methods_are_dropped():
    fixed = """
    class C {
        int b(int x) { return x + 2; }
        void fresh() { go(); }
    }
    """
    pairs = map_method_pairs(FILE, fixed)
    assert [(p.label, q.label) for p, q in pairs] == [("b", "b")]


def test_overload_is_paired_by_parameter_count():
    buggy = "class C { int f(int a) { return a; } int f() { return 0; } }"
    fixed = "class C { int f() { return 1; } int f(int a) { return a; } }"
    pairs = map_method_pairs(buggy, fixed)
    assert [(p.param_count(), q.param_count()) for p, q in pairs] == [(1, 1), (0, 0)]


def test_renamed_method_pairs_by_body_similarity():
    body = "{ int t = x * 2; if (t > 10) { t = 10; } log(t); return t + offset; }"
    buggy = f"class C {{ int scale(int x) {body} }}"
    fixed = f"class C {{ int scaled(int x) {body} }}"
    pairs = map_method_pairs(buggy, fixed)
    assert [(p.label, q.label) for p, q in pairs] == [("scale", "scaled")]
    unrelated = "class C { void other() { a.b(); } }"
    assert len(map_method_pairs(buggy, unrelated)) == 0


def test_bigram_similarity_bounds():
    assert bigram_similarity(list("abc"), list("abc")) == 1.0
    assert bigram_similarity(list("abc"), list("xyz")) == 0.0
    # {ab, bc} vs {ab, bd}: 2 * 1 / 4
    assert bigram_similarity(list("abc"), list("abd")) == pytest.approx(0.5)


# -- edit scripts ------------------------------------------------------------------

def test_literal_update_example():
    actions = diff(parse_method("int f(){return 0;}"), parse_method("int f(){return 1;}"))
    assert [a.describe() for a in actions] == ["Update Literal at Return"]
    assert actions[0].new_label == "1"


def test_statement_deletion_example():
    actions = diff(parse_method("void f(){ foo(); bar(); }"), parse_method("void f(){ bar(); }"))
    assert [a.describe() for a in actions] == ["Delete Invocation at Block"]


def test_insertion_records_parent_and_label():
    actions = diff(parse_method("void f(){ bar(); }"), parse_method("void f(){ foo(); bar(); }"))
    assert [a.operation for a in actions] == [("Insert", "Invocation", "Block")]
    assert actions[0].label == "foo"


def test_move_context_is_source_parent():
    buggy = parse_method("void f(){ if (x) { y = 1; } }")
    fixed = parse_method("void f(){ y = 1; }")
    actions = diff(buggy, fixed)
    moves = [a for a in actions if a.kind == "Move"]
    assert moves and all(a.context_type == a.source_type for a in moves)
    assert isomorphic(apply(buggy, actions), fixed)


@pytest.mark.parametrize("source", JAVA_METHODS)
def test_diff_of_identical_trees_is_empty(source):
    tree = parse_method(source)
    assert diff(tree, parse_method(source)) == []


@pytest.mark.parametrize("i, j", list(itertools.product(range(len(JAVA_METHODS)), repeat=2)))
def test_apply_soundness_over_cross_pairs(i, j):
    a, b = parse_method(JAVA_METHODS[i]), parse_method(JAVA_METHODS[j])
    before = a.to_sexpr()
    actions = diff(a, b)
    assert isomorphic(apply(a, actions), b)
    assert a.to_sexpr() == before  # diff and apply work on copies
    assert (actions == []) == isomorphic(a, b)


@st.composite
def small_methods(draw):
    """Random method bodies built from a small statement grammar."""
    names = st.sampled_from(["a", "b", "c", "d"])
    lits = st.sampled_from(["0", "1", "2", '"s"', "null", "true"])
    ops = st.sampled_from(["+", "-", "==", "<", "&&"])

    def expr():
        return st.one_of(
            names, lits,
            st.builds(lambda x, o, y: f"{x} {o} {y}", names, ops, st.one_of(names, lits)),
            st.builds(lambda f, x: f"{f}({x})", st.sampled_from(["go", "put"]), names),
        )

    stmt = st.one_of(
        st.builds(lambda n, e: f"{n} = {e};", names, expr()),
        st.builds(lambda e: f"go({e});", expr()),
        st.builds(lambda e: f"return {e};", expr()),
        st.builds(lambda c, n, e: f"if ({c}) {{ {n} = {e}; }}", expr(), names, expr()),
        st.builds(lambda c, n: f"while ({c}) {{ {n}++; }}", expr(), names),
    )
    body = draw(st.lists(stmt, max_size=5))
    return "void m(int a) { " + " ".join(body) + " }"


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(small_methods(), small_methods())
def test_apply_soundness_property(src_a, src_b):
    a, b = parse_method(src_a), parse_method(src_b)
    actions = diff(a, b)
    assert isomorphic(apply(a, actions), b)
    assert all(x.node_type in NODE_TYPES and x.context_type in NODE_TYPES for x in actions)


def test_match_is_one_to_one_and_type_preserving():
    a, b = parse_method(JAVA_METHODS[2]), parse_method(JAVA_METHODS[3])
    mapping = match(a, b)
    pairs = [(s, mapping.dst(s)) for s in a.preorder() if mapping.has_src(s)]
    assert len({id(d) for _, d in pairs}) == len(pairs)
    assert all(s.node_type == d.node_type for s, d in pairs)


def test_apply_missing_node_raises():
    tree = parse_method("int f(){return 0;}")
    with pytest.raises(ApplyError):
        apply(tree, [EditAction("Delete", "Literal", "Return", 99)])


def test_apply_rejects_cycle():
    tree = parse_method("void f(){ if (x) { y = 1; } }")
    # node 1 is the body Block; move it below its own descendant
    with pytest.raises(ApplyError):
        apply(tree, [EditAction("Move", "Block", "Method", 1, parent_id=2, position=0,
                                source_type="Method", target_type="If")])


def test_action_validation():
    with pytest.raises(ValueError):
        EditAction("Rename", "Literal", "Return", 1)
    with pytest.raises(ValueError):
        EditAction("Update", "Literal", "Return", 1)
    with pytest.raises(ValueError):
        EditAction("Delete", "Literal", "Return", 1, label="x")
    with pytest.raises(ValueError):
        EditAction("Delete", "Lambda", "Return", 1)


def test_action_lines_round_trip():
    a, b = parse_method(JAVA_METHODS[7]), parse_method(JAVA_METHODS[8])
    actions = diff(a, b)
    actions.append(EditAction("Update", "Literal", "Return", 3, new_label='"a\tb\\n"'))
    assert load_actions(dump_actions(actions)) == actions
