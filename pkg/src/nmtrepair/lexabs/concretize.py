from __future__ import annotations

from .abstraction import ID_PATTERN, split_id


class UnmappableId(KeyError):
    """An ID in model output that the pair's mapping cannot resolve."""

    def __init__(self, ident):
        super().__init__(ident)
        self.ident = ident

    def __str__(self):
        return f"cannot map {self.ident} back to source: absent from the mapping"


_NO_SPACE_BEFORE = frozenset({";", ",", ")", "]", "."})
_NO_SPACE_AFTER = frozenset({"(", "[", "."})
_SPACED_KEYWORDS = frozenset({"if", "for", "while", "switch", "catch", "synchronized", "return", "try"})


def _wordlike(lex):
    return lex[0].isalnum() or lex[0] in "_$\"'"


def _starts_numeric(lex):
    return lex[0].isdigit() or (lex[0] == "." and len(lex) > 1)


def _needs_space(prev, cur):
    if prev == "." or cur == ".":
        # "1 ." would lex as a float, ". ." could fuse into "..."
        if prev == "." and (cur == "." or _starts_numeric(cur)):
            return True
        if cur == "." and (prev == "." or prev[0].isdigit()):
            return True
        return False
    if cur in _NO_SPACE_BEFORE or prev in _NO_SPACE_AFTER:
        return False
    if cur in ("(", "[") and _wordlike(prev) and prev not in _SPACED_KEYWORDS:
        return False
    return True


def format_tokens(lexemes, indent="    "):
    """Deterministic pretty-printer: one statement per line, braces indent.

    Spacing only omits a blank between tokens where the lexer cannot fuse
    them, so the output always re-lexes to the same token stream.
    """
    lines = []
    cur = []
    depth = 0
    parens = 0

    def flush():
        if cur:
            lines.append(indent * depth + " ".join(cur))
            cur.clear()

    prev = None
    for lex in lexemes:
        if lex == "}" and parens == 0:
            flush()
            depth = max(depth - 1, 0)
            lines.append(indent * depth + "}")
            prev = lex
            continue
        if cur and prev is not None and not _needs_space(prev, lex):
            cur[-1] = cur[-1] + lex
        else:
            cur.append(lex)
        if lex in ("(", "["):
            parens += 1
        elif lex in (")", "]"):
            parens = max(parens - 1, 0)
        if parens == 0:
            if lex == "{":
                flush()
                depth += 1
            elif lex == ";":
                flush()
        prev = lex
    flush()
    return "\n".join(lines)


def concretize_tokens(tokens, mapping):
    """Replace every ID in ``tokens`` by its lexeme; raise UnmappableId."""
    out = []
    for tok in tokens:
        if ID_PATTERN.match(tok):
            if tok not in mapping:
                raise UnmappableId(tok)
            out.append(mapping[tok])
        else:
            out.append(tok)
    return out


def concretize(predicted, mapping):
    """Map an abstracted method back to source text using ``mapping``."""
    return format_tokens(concretize_tokens(predicted, mapping))


def placeholder_lexeme(ident):
    """A syntactically valid stand-in for an ID (identity-style mapping)."""
    cat, idx = split_id(ident)
    if cat == "STRING":
        return f'"{ident}"'
    if cat == "CHAR":
        return "'c'"
    if cat == "INT":
        return str(idx)
    if cat == "FLOAT":
        return f"{idx}.0"
    return ident


def concretize_placeholder(predicted):
    """Concretize with a synthetic mapping so any ID becomes valid source."""
    return format_tokens(placeholder_lexeme(t) if ID_PATTERN.match(t) else t for t in predicted)
