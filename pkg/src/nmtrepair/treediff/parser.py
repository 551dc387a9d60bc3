"""Recursive-descent parser for Java methods into :class:`AstNode` trees.

It covers the statement and expression grammar found in ordinary method
bodies.  Lambdas, anonymous class bodies, method references and local class
declarations become opaque ``Block`` nodes whose label is their source text.
"""
from __future__ import annotations

from ..lexabs.lexer import LexError, tokenize
from .ast import AstNode


class ParseError(ValueError):
    def __init__(self, message, index=None):
        where = "" if index is None else f" at token {index}"
        super().__init__(f"{message}{where}")
        self.index = index


PRIMITIVES = frozenset({"int", "long", "short", "byte", "char", "boolean", "float", "double", "void", "var"})
MODIFIERS = frozenset({
    "public", "protected", "private", "static", "abstract", "final", "native",
    "synchronized", "transient", "volatile", "strictfp", "default",
})
ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "&=", "|=", "^=", "%=", "<<=", ">>=", ">>>="})
BINARY_LEVELS = (
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", ">", "<=", ">=", "instanceof"),
    ("<<", ">>", ">>>"),
    ("+", "-"),
    ("*", "/", "%"),
)
_LITERAL_CATS = frozenset({"string_literal", "char_literal", "int_literal", "float_literal", "bool_literal"})
_CLOSERS = {">": 0, ">>": 1, ">>>": 2}


def check_balanced(tokens):
    pairs = {")": "(", "]": "[", "}": "{"}
    stack = []
    for i, t in enumerate(tokens):
        lex = t.lexeme
        if lex in "([{" and t.category == "separator":
            stack.append((lex, i))
        elif lex in pairs and t.category == "separator":
            if not stack or stack[-1][0] != pairs[lex]:
                raise ParseError(f"unbalanced {lex!r}", i)
            stack.pop()
    if stack:
        raise ParseError(f"unclosed {stack[-1][0]!r}", stack[-1][1])


class _Parser:
    def __init__(self, tokens):
        self.toks = tokens
        self.lex = [t.lexeme for t in tokens]
        self.cat = [t.category for t in tokens]
        self.n = len(tokens)

    # -- helpers -----------------------------------------------------------
    def at(self, j):
        return self.lex[j] if j < self.n else ""

    def is_ident(self, j):
        return j < self.n and self.cat[j] == "identifier"

    def expect(self, j, lex):
        if self.at(j) != lex:
            raise ParseError(f"expected {lex!r}, found {self.at(j)!r}", j)
        return j + 1

    def ident(self, j):
        if not self.is_ident(j):
            raise ParseError(f"expected identifier, found {self.at(j)!r}", j)
        return self.lex[j], j + 1

    def text(self, a, b):
        return " ".join(self.lex[a:b])

    def match_close(self, j):
        """Index of the bracket closing the one at ``j``."""
        open_ = self.lex[j]
        close = {"(": ")", "[": "]", "{": "}"}[open_]
        depth = 0
        for k in range(j, self.n):
            if self.lex[k] == open_ and self.cat[k] == "separator":
                depth += 1
            elif self.lex[k] == close and self.cat[k] == "separator":
                depth -= 1
                if depth == 0:
                    return k
        raise ParseError(f"unclosed {open_!r}", j)

    # -- types ---------------------------------------------------------------
    def parse_type(self, j):
        """Returns (end, leftover) where ``leftover`` counts '>' still owed."""
        if self.at(j) in PRIMITIVES and self.cat[j] == "keyword":
            j += 1
        elif self.is_ident(j):
            j += 1
            while True:
                if self.at(j) == "<":
                    j, left = self.parse_type_args(j)
                    if left:
                        return j, left
                if self.at(j) == "." and self.is_ident(j + 1):
                    j += 2
                    continue
                break
        else:
            raise ParseError(f"expected type, found {self.at(j)!r}", j)
        while self.at(j) == "[" and self.at(j + 1) == "]":
            j += 2
        return j, 0

    def parse_type_args(self, j):
        j = self.expect(j, "<")
        if self.at(j) in _CLOSERS:
            return j + 1, _CLOSERS[self.at(j)]
        while True:
            if self.at(j) == "?":
                j += 1
                left = 0
                if self.at(j) in ("extends", "super"):
                    j, left = self.parse_type(j + 1)
            else:
                j, left = self.parse_type(j)
            while not left and self.at(j) == "&":
                j, left = self.parse_type(j + 1)
            if left:
                return j, left - 1
            if self.at(j) == ",":
                j += 1
                continue
            if self.at(j) in _CLOSERS:
                return j + 1, _CLOSERS[self.at(j)]
            raise ParseError(f"malformed type arguments near {self.at(j)!r}", j)

    def try_type(self, j):
        try:
            end, left = self.parse_type(j)
        except ParseError:
            return None
        return None if left else end

    def type_node(self, a, b):
        return AstNode("TypeAccess", "".join(self.lex[a:b]))

    # -- members -------------------------------------------------------------
    def skip_modifiers(self, j):
        while self.at(j) in MODIFIERS and self.cat[j] == "keyword":
            j += 1
        return j

    def method_header(self, i):
        """Parse a method/constructor header at ``i``.

        Returns (name, params, index_of_body_or_semicolon) or None when the
        tokens at ``i`` are not a method declaration.
        """
        j = self.skip_modifiers(i)
        if self.at(j) == "<":
            try:
                j, left = self.parse_type_args(j)
            except ParseError:
                return None
            if left:
                return None
        if self.is_ident(j) and self.at(j + 1) == "(":
            name_at = j
        else:
            end = self.try_type(j)
            if end is None or not (self.is_ident(end) and self.at(end + 1) == "("):
                return None
            name_at = end
        close = self.match_close(name_at + 1)
        params = self.parameters(name_at + 2, close)
        j = close + 1
        while self.at(j) == "[" and self.at(j + 1) == "]":
            j += 2
        if self.at(j) == "throws":
            j += 1
            while True:
                end = self.try_type(j)
                if end is None:
                    raise ParseError("malformed throws clause", j)
                j = end
                if self.at(j) != ",":
                    break
                j += 1
        if self.at(j) not in ("{", ";"):
            return None
        return self.lex[name_at], params, j

    def parameters(self, a, b):
        params = []
        j = a
        while j < b:
            while self.at(j) == "final":
                j += 1
            start = j
            end, left = self.parse_type(j)
            if left:
                raise ParseError("malformed parameter type", j)
            if self.at(end) == "...":
                end += 1
            type_end = end
            name, j = self.ident(end)
            while self.at(j) == "[" and self.at(j + 1) == "]":
                j += 2
            params.append(AstNode("Parameter", name, [self.type_node(start, type_end)]))
            if j < b:
                j = self.expect(j, ",")
                if j >= b:
                    raise ParseError("dangling ',' in parameter list", j)
        if j != b:
            raise ParseError("malformed parameter list", j)
        return params

    def method(self, i):
        """Parse a full method at ``i``; returns (AstNode or None, end)."""
        header = self.method_header(i)
        if header is None:
            return None, i
        name, params, j = header
        if self.at(j) == ";":
            return None, j + 1  # abstract or interface method
        body, end = self.block(j)
        node = AstNode("Method", name, params + [body])
        node.tokens = self.toks[i:end]
        return node, end

    def skip_member(self, j, end):
        """Skip a non-method member (field, initializer, enum constants)."""
        while j < end:
            lex = self.lex[j]
            if lex == ";":
                return j + 1
            if lex in ("{", "(", "[") and self.cat[j] == "separator":
                close = self.match_close(j)
                if lex == "{" and self.at(close + 1) != ";" and self.at(close + 1) != ",":
                    return close + 1
                j = close + 1
                continue
            j += 1
        return end

    def members(self, j, end, out, enum_body=False):
        if enum_body:
            # enum constants run up to the first top-level ';'
            while j < end and self.lex[j] != ";":
                if self.lex[j] in ("{", "(") and self.cat[j] == "separator":
                    j = self.match_close(j) + 1
                else:
                    j += 1
            j += 1
        while j < end:
            lex = self.lex[j]
            k = self.skip_modifiers(j)
            if self.at(k) in ("class", "interface", "enum") and self.cat[k] == "keyword":
                kind = self.at(k)
                k += 1
                while k < end and self.lex[k] != "{":
                    k += 1
                if k >= end:
                    raise ParseError(f"{kind} without body", j)
                close = self.match_close(k)
                self.members(k + 1, close, out, enum_body=(kind == "enum"))
                j = close + 1
                continue
            if lex in ("package", "import"):
                while j < end and self.lex[j] != ";":
                    j += 1
                j += 1
                continue
            if lex == ";":
                j += 1
                continue
            if self.at(k) == "{":
                j = self.match_close(k) + 1
                continue
            node, nxt = self.method(j)
            if nxt > j:
                if node is not None:
                    out.append(node)
                j = nxt
            else:
                j = self.skip_member(j, end)
        return out

    # -- statements ----------------------------------------------------------
    def block(self, j, label=""):
        j = self.expect(j, "{")
        node = AstNode("Block", label)
        while self.at(j) != "}":
            if j >= self.n:
                raise ParseError("unterminated block", j)
            stmts, j = self.statement(j)
            for s in stmts:
                node.add(s)
        return node, j + 1

    def as_block(self, j):
        """Parse a statement and wrap it in a Block unless it already is one."""
        if self.at(j) == "{":
            return self.block(j)
        stmts, j = self.statement(j)
        return AstNode("Block", "", stmts), j

    def paren_expr(self, j):
        j = self.expect(j, "(")
        expr, j = self.expression(j)
        return expr, self.expect(j, ")")

    def local_decl_at(self, j):
        """End of the type if a local variable declaration starts at ``j``."""
        k = j
        while self.at(k) == "final":
            k += 1
        end = self.try_type(k)
        if end is None or not self.is_ident(end):
            return None
        if self.at(end + 1) in ("=", ";", ",", "[", ":"):
            return k, end
        return None

    def declarators(self, type_start, type_end, j):
        nodes = []
        while True:
            name, j = self.ident(j)
            dims = ""
            while self.at(j) == "[" and self.at(j + 1) == "]":
                j += 2
                dims += "[]"
            tnode = self.type_node(type_start, type_end)
            tnode.label += dims
            var = AstNode("LocalVariable", name, [tnode])
            if self.at(j) == "=":
                init, j = self.var_init(j + 1)
                var.add(init)
            nodes.append(var)
            if self.at(j) != ",":
                return nodes, j
            j += 1

    def var_init(self, j):
        if self.at(j) == "{":
            return self.array_init(j)
        return self.expression(j)

    def array_init(self, j):
        j = self.expect(j, "{")
        node = AstNode("Block", "{}")
        while self.at(j) != "}":
            item, j = self.var_init(j)
            node.add(item)
            if self.at(j) == ",":
                j += 1
            elif self.at(j) != "}":
                raise ParseError("malformed array initializer", j)
        return node, j + 1

    def statement(self, j):
        """Parse one statement; returns (list of nodes, end)."""
        lex = self.at(j)
        if j >= self.n:
            raise ParseError("unexpected end of input", j)
        if lex == "{":
            node, j = self.block(j)
            return [node], j
        if lex == ";":
            return [], j + 1
        if lex == "if":
            cond, j = self.paren_expr(j + 1)
            then, j = self.as_block(j)
            node = AstNode("If", "", [cond, then])
            if self.at(j) == "else":
                other, j = self.as_block(j + 1)
                node.add(other)
            return [node], j
        if lex == "while":
            cond, j = self.paren_expr(j + 1)
            body, j = self.as_block(j)
            return [AstNode("While", "", [cond, body])], j
        if lex == "do":
            body, j = self.as_block(j + 1)
            j = self.expect(j, "while")
            cond, j = self.paren_expr(j)
            j = self.expect(j, ";")
            return [AstNode("While", "do", [cond, body])], j
        if lex == "for":
            return self.for_statement(j)
        if lex == "switch":
            return self.switch_statement(j)
        if lex == "try":
            return self.try_statement(j)
        if lex == "return":
            node = AstNode("Return")
            j += 1
            if self.at(j) != ";":
                expr, j = self.expression(j)
                node.add(expr)
            return [node], self.expect(j, ";")
        if lex == "throw":
            expr, j = self.expression(j + 1)
            return [AstNode("Block", "throw", [expr])], self.expect(j, ";")
        if lex in ("break", "continue"):
            label = lex
            j += 1
            if self.is_ident(j):
                label += " " + self.lex[j]
                j += 1
            return [AstNode("Block", label)], self.expect(j, ";")
        if lex == "synchronized":
            lock, j = self.paren_expr(j + 1)
            body, j = self.block(j)
            return [AstNode("Block", "synchronized", [lock, body])], j
        if lex == "assert":
            cond, j = self.expression(j + 1)
            node = AstNode("Block", "assert", [cond])
            if self.at(j) == ":":
                msg, j = self.expression(j + 1)
                node.add(msg)
            return [node], self.expect(j, ";")
        k = self.skip_modifiers(j)
        if self.at(k) in ("class", "interface", "enum"):
            while self.at(k) != "{":
                if k >= self.n:
                    raise ParseError("local class without body", j)
                k += 1
            close = self.match_close(k)
            return [AstNode("Block", self.text(j, close + 1))], close + 1
        if self.is_ident(j) and self.at(j + 1) == ":":
            stmts, end = self.statement(j + 2)
            return [AstNode("Block", self.lex[j] + ":", stmts)], end
        decl = self.local_decl_at(j)
        if decl is not None:
            nodes, end = self.declarators(decl[0], decl[1], decl[1])
            return nodes, self.expect(end, ";")
        expr, j = self.expression(j)
        return [expr], self.expect(j, ";")

    def for_statement(self, j):
        j = self.expect(j + 1, "(")
        decl = self.local_decl_at(j)
        if decl is not None and self.at(decl[1] + 1) == ":":
            var = AstNode("LocalVariable", self.lex[decl[1]], [self.type_node(*decl)])
            it, k = self.expression(decl[1] + 2)
            k = self.expect(k, ")")
            body, k = self.as_block(k)
            return [AstNode("For", ":", [var, it, body])], k
        node = AstNode("For")
        if decl is not None:
            inits, j = self.declarators(decl[0], decl[1], decl[1])
            for n in inits:
                node.add(n)
        else:
            while self.at(j) != ";":
                e, j = self.expression(j)
                node.add(e)
                if self.at(j) == ",":
                    j += 1
        j = self.expect(j, ";")
        if self.at(j) != ";":
            cond, j = self.expression(j)
            node.add(cond)
        j = self.expect(j, ";")
        while self.at(j) != ")":
            e, j = self.expression(j)
            node.add(e)
            if self.at(j) == ",":
                j += 1
            elif self.at(j) != ")":
                raise ParseError("malformed for update", j)
        body, j = self.as_block(j + 1)
        node.add(body)
        return [node], j

    def switch_statement(self, j):
        subject, j = self.paren_expr(j + 1)
        j = self.expect(j, "{")
        node = AstNode("Switch", "", [subject])
        case = None
        while self.at(j) != "}":
            if j >= self.n:
                raise ParseError("unterminated switch", j)
            if self.at(j) in ("case", "default"):
                case = AstNode("Case", self.at(j))
                node.add(case)
                j += 1
                if case.label == "case":
                    while True:
                        e, j = self.ternary(j)
                        case.add(e)
                        if self.at(j) != ",":
                            break
                        j += 1
                if self.at(j) == "->":
                    case.label += "->"
                    if self.at(j + 1) == "{":
                        body, j = self.block(j + 1)
                        case.add(body)
                    elif self.at(j + 1) == "throw":
                        stmts, j = self.statement(j + 1)
                        for s in stmts:
                            case.add(s)
                    else:
                        e, j = self.expression(j + 1)
                        case.add(e)
                        j = self.expect(j, ";")
                    continue
                j = self.expect(j, ":")
                continue
            if case is None:
                raise ParseError("statement before first case label", j)
            stmts, j = self.statement(j)
            for s in stmts:
                case.add(s)
        return [node], j + 1

    def try_statement(self, j):
        j += 1
        node = AstNode("Try")
        if self.at(j) == "(":
            close = self.match_close(j)
            k = j + 1
            while k < close:
                decl = self.local_decl_at(k)
                if decl is None:
                    e, k = self.expression(k)
                    node.add(e)
                else:
                    vars_, k = self.declarators(decl[0], decl[1], decl[1])
                    for v in vars_:
                        node.add(v)
                if self.at(k) == ";":
                    k += 1
            if k != close:
                raise ParseError("malformed try resources", k)
            j = close + 1
        body, j = self.block(j)
        node.add(body)
        handlers = 0
        while self.at(j) == "catch":
            j = self.expect(j + 1, "(")
            while self.at(j) == "final":
                j += 1
            start = j
            j, left = self.parse_type(j)
            while self.at(j) == "|":
                j, left = self.parse_type(j + 1)
            name, j = self.ident(j)
            j = self.expect(j, ")")
            param = AstNode("Parameter", name, [self.type_node(start, j - 2)])
            cbody, j = self.block(j)
            node.add(AstNode("Catch", "", [param, cbody]))
            handlers += 1
        if self.at(j) == "finally":
            fin, j = self.block(j + 1, label="finally")
            node.add(fin)
            handlers += 1
        if not handlers and len(node.children) == 1:
            raise ParseError("try without catch or finally", j)
        return [node], j

    # -- expressions ---------------------------------------------------------
    def expression(self, j):
        lam = self.lambda_at(j)
        if lam is not None:
            return lam
        lhs, k = self.ternary(j)
        if self.at(k) in ASSIGN_OPS and self.cat[k] == "operator":
            rhs, k2 = self.expression(k + 1)
            return AstNode("Assignment", self.lex[k], [lhs, rhs]), k2
        return lhs, k

    def lambda_at(self, j):
        if self.is_ident(j) and self.at(j + 1) == "->":
            body_at = j + 2
        elif self.at(j) == "(":
            close = self.match_close(j)
            if self.at(close + 1) != "->":
                return None
            body_at = close + 2
        else:
            return None
        if self.at(body_at) == "{":
            _, end = self.block(body_at)
        else:
            _, end = self.expression(body_at)
        return AstNode("Block", self.text(j, end)), end

    def ternary(self, j):
        cond, j = self.binary(j, 0)
        if self.at(j) == "?":
            a, j = self.ternary_branch(j + 1)
            j = self.expect(j, ":")
            b, j = self.ternary_branch(j)
            return AstNode("Conditional", "", [cond, a, b]), j
        return cond, j

    def ternary_branch(self, j):
        lam = self.lambda_at(j)
        return lam if lam is not None else self.ternary(j)

    def binary(self, j, level):
        if level == len(BINARY_LEVELS):
            return self.unary(j)
        ops = BINARY_LEVELS[level]
        left, j = self.binary(j, level + 1)
        while self.at(j) in ops and self.cat[j] in ("operator", "keyword"):
            op = self.lex[j]
            if op == "instanceof":
                k = j + 1
                if self.at(k) == "final":
                    k += 1
                end, left_over = self.parse_type(k)
                if left_over:
                    raise ParseError("malformed instanceof type", k)
                right = self.type_node(k, end)
                j = end
                if self.is_ident(j):  # pattern binding
                    right.add(AstNode("LocalVariable", self.lex[j]))
                    j += 1
            else:
                right, j = self.binary(j + 1, level + 1)
            left = AstNode("BinaryOperator", op, [left, right])
        return left, j

    def cast_at(self, j):
        if self.at(j) != "(":
            return None
        end = self.try_type(j + 1)
        if end is None or self.at(end) != ")":
            return None
        nxt = end + 1
        primitive = end == j + 2 and self.at(j + 1) in PRIMITIVES
        if primitive:
            return end
        if nxt >= self.n:
            return None
        if self.cat[nxt] in ("identifier",) or self.cat[nxt] in _LITERAL_CATS:
            return end
        if self.at(nxt) in ("(", "!", "~", "this", "new", "super", "null"):
            return end
        return None

    def unary(self, j):
        lex = self.at(j)
        if lex in ("!", "~", "+", "-", "++", "--") and self.cat[j] == "operator":
            operand, k = self.unary(j + 1)
            return AstNode("UnaryOperator", lex, [operand]), k
        end = self.cast_at(j)
        if end is not None:
            operand, k = self.unary(end + 1)
            return AstNode("UnaryOperator", "cast", [self.type_node(j + 1, end), operand]), k
        return self.postfix(j)

    def arguments(self, j):
        j = self.expect(j, "(")
        args = []
        while self.at(j) != ")":
            e, j = self.expression(j)
            args.append(e)
            if self.at(j) == ",":
                j += 1
                if self.at(j) == ")":
                    raise ParseError("dangling ',' in arguments", j)
            elif self.at(j) != ")":
                raise ParseError(f"expected ',' or ')', found {self.at(j)!r}", j)
        return args, j + 1

    def postfix(self, j):
        node, j = self.primary(j)
        while True:
            lex = self.at(j)
            if lex == "." and j + 1 < self.n:
                k = j + 1
                if self.at(k) == "<":
                    k, left = self.parse_type_args(k)
                    if left:
                        raise ParseError("malformed explicit type arguments", k)
                if self.is_ident(k):
                    name = self.lex[k]
                    if self.at(k + 1) == "(":
                        args, j = self.arguments(k + 1)
                        node = AstNode("Invocation", name, [node] + args)
                    else:
                        node = AstNode("FieldRead", name, [node])
                        j = k + 1
                elif self.at(k) == "class":
                    node = AstNode("FieldRead", "class", [node])
                    j = k + 1
                elif self.at(k) in ("this", "super"):
                    node = AstNode("ThisAccess", self.at(k), [node])
                    j = k + 1
                else:
                    raise ParseError(f"unexpected {self.at(k)!r} after '.'", k)
            elif lex == "[":
                idx, k = self.expression(j + 1)
                j = self.expect(k, "]")
                node = AstNode("FieldRead", "[]", [node, idx])
            elif lex in ("++", "--"):
                node = AstNode("UnaryOperator", "post" + lex, [node])
                j += 1
            elif lex == "::":
                k = j + 1
                if not (self.is_ident(k) or self.at(k) == "new"):
                    raise ParseError("malformed method reference", k)
                node = AstNode("Block", "::" + self.lex[k], [node])
                j = k + 1
            else:
                return node, j

    def primary(self, j):
        if j >= self.n:
            raise ParseError("unexpected end of expression", j)
        lex, cat = self.lex[j], self.cat[j]
        if cat in _LITERAL_CATS or lex == "null":
            return AstNode("Literal", lex), j + 1
        if lex == "(":
            expr, k = self.expression(j + 1)
            return expr, self.expect(k, ")")
        if lex in ("this", "super"):
            if self.at(j + 1) == "(":
                args, k = self.arguments(j + 1)
                return AstNode("Invocation", lex, args), k
            return AstNode("ThisAccess", lex), j + 1
        if lex == "new":
            return self.creation(j + 1)
        if lex in PRIMITIVES and cat == "keyword":
            end, _ = self.parse_type(j)
            if self.at(end) == "." and self.at(end + 1) == "class":
                return AstNode("FieldRead", "class", [self.type_node(j, end)]), end + 2
            if self.at(end) == "::":
                return self.type_node(j, end), end
            raise ParseError(f"unexpected type {lex!r} in expression", j)
        if cat == "identifier":
            if self.at(j + 1) == "(":
                args, k = self.arguments(j + 1)
                return AstNode("Invocation", lex, args), k
            if lex[0].isupper() and self.at(j + 1) in (".", "::"):
                return AstNode("TypeAccess", lex), j + 1
            if self.at(j + 1) == "[" and self.at(j + 2) == "]":
                end, _ = self.parse_type(j)
                if self.at(end) == "." and self.at(end + 1) == "class":
                    return AstNode("FieldRead", "class", [self.type_node(j, end)]), end + 2
                raise ParseError("array type in expression", j)
            return AstNode("VariableRead", lex), j + 1
        if lex == "switch":
            raise ParseError("switch expressions are not supported", j)
        raise ParseError(f"unexpected token {lex!r}", j)

    def creation(self, j):
        start = j
        if self.at(j) in PRIMITIVES:
            j += 1
        else:
            if not self.is_ident(j):
                raise ParseError("expected type after 'new'", j)
            j += 1
            while True:
                if self.at(j) == "<":
                    j, left = self.parse_type_args(j)
                    if left:
                        raise ParseError("malformed type arguments", j)
                if self.at(j) == "." and self.is_ident(j + 1):
                    j += 2
                    continue
                break
        tnode = self.type_node(start, j)
        if self.at(j) == "[":
            node = AstNode("Invocation", "new[]", [tnode])
            while self.at(j) == "[":
                if self.at(j + 1) == "]":
                    j += 2
                    tnode.label += "[]"
                    continue
                dim, k = self.expression(j + 1)
                j = self.expect(k, "]")
                node.add(dim)
            if self.at(j) == "{":
                init, j = self.array_init(j)
                node.add(init)
            return node, j
        args, j = self.arguments(j)
        node = AstNode("Invocation", "new", [tnode] + args)
        if self.at(j) == "{":
            close = self.match_close(j)
            body = []
            self.members(j + 1, close, body)
            node.add(AstNode("Block", self.text(j, close + 1)))
            j = close + 1
        return node, j


def _tokens(source):
    if isinstance(source, str):
        try:
            return tokenize(source)
        except LexError as exc:
            raise ParseError(f"lexical error: {exc}") from exc
    return list(source)


def parse_methods(file_source):
    """Return one Method-rooted AST per method declaration in the file.

    Constructors are included and methods of nested classes are flattened
    into the result.  Raises :class:`ParseError` on unbalanced brackets or
    any statement the grammar does not cover.
    """
    tokens = _tokens(file_source)
    check_balanced(tokens)
    parser = _Parser(tokens)
    return parser.members(0, parser.n, [])


def parse_method(source):
    """Parse text that must consist of exactly one method declaration."""
    tokens = _tokens(source)
    check_balanced(tokens)
    parser = _Parser(tokens)
    node, end = parser.method(0)
    if node is None:
        raise ParseError("not a method declaration", 0)
    if end != parser.n:
        raise ParseError("trailing tokens after method", end)
    return node


def is_valid_method(source):
    try:
        parse_method(source)
    except (ParseError, RecursionError):
        return False
    return True
