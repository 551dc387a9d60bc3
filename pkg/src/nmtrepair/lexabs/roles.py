"""Identifier role heuristics (METHOD / VAR / TYPE) over a token stream."""
from __future__ import annotations

METHOD = "METHOD"
VAR = "VAR"
TYPE = "TYPE"

LITERAL_ROLES = {
    "string_literal": "STRING",
    "char_literal": "CHAR",
    "int_literal": "INT",
    "float_literal": "FLOAT",
}
ID_CATEGORIES = ("METHOD", "VAR", "TYPE", "STRING", "CHAR", "INT", "FLOAT")


def _skip_type_suffix(tokens, j):
    """Skip a generic argument list and array brackets starting at ``j``.

    Returns the index after the suffix, or ``None`` when the angle brackets
    do not close like a type argument list.
    """
    n = len(tokens)
    if j < n and tokens[j].lexeme == "<":
        depth = 0
        while j < n:
            lex = tokens[j].lexeme
            if lex == "<":
                depth += 1
            elif lex in (">", ">>", ">>>"):
                depth -= len(lex)
                if depth <= 0:
                    j += 1
                    break
            elif not (tokens[j].category in ("identifier", "keyword") or lex in (",", ".", "?", "[", "]", "&")):
                return None
            j += 1
        else:
            return None
        if depth < 0:
            return None
    while j + 1 < n and tokens[j].lexeme == "[" and tokens[j + 1].lexeme == "]":
        j += 2
    return j


def classify_roles(tokens):
    """Label every token with its abstraction role.

    Identifiers get METHOD, VAR or TYPE; literals get their literal category
    (STRING, CHAR, INT, FLOAT, or ``None`` for booleans); every other token
    gets ``None``.  The rules, in priority order:

    * after ``new`` -> TYPE
    * followed by ``(`` -> METHOD
    * followed (possibly through ``<...>`` / ``[]``) by another identifier,
      i.e. a declaration position -> TYPE
    * starts with an uppercase letter -> TYPE
    * otherwise VAR
    """
    roles = []
    n = len(tokens)
    for i, tok in enumerate(tokens):
        cat = tok.category
        if cat != "identifier":
            roles.append(LITERAL_ROLES.get(cat))
            continue
        prev = tokens[i - 1].lexeme if i > 0 else None
        nxt = tokens[i + 1].lexeme if i + 1 < n else None
        if prev == "new":
            role = TYPE
        elif nxt == "(":
            role = METHOD
        else:
            role = None
            j = _skip_type_suffix(tokens, i + 1)
            if j is not None and j < n and tokens[j].category == "identifier":
                role = TYPE
            if role is None:
                role = TYPE if tok.lexeme[0].isupper() else VAR
        roles.append(role)
    return list(zip(tokens, roles))
