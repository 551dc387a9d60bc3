"""Hand-written lexer for the Java subset used by the pipeline.

Comments and annotations are dropped; whitespace never becomes a token.
"""
from __future__ import annotations

from dataclasses import dataclass

KEYWORDS = frozenset("""
abstract assert boolean break byte case catch char class const continue default
do double else enum extends final finally float for goto if implements import
instanceof int interface long native new package private protected public return
short static strictfp super switch synchronized this throw throws transient try
void volatile while null var
""".split())

BOOL_LITERALS = frozenset({"true", "false"})

SEPARATORS = frozenset({"(", ")", "{", "}", "[", "]", ";", ",", ".", "...", "@", "::"})

# longest first so that the scanner can take the first hit
OPERATORS = sorted("""
>>>= <<= >>= >>> ... -> :: ++ -- && || == != <= >= += -= *= /= &= |= ^= %= << >>
= > < ! ~ ? : + - * / & | ^ %
""".split(), key=len, reverse=True)

CATEGORIES = (
    "keyword", "separator", "operator", "identifier", "string_literal",
    "char_literal", "int_literal", "float_literal", "bool_literal",
)
LITERAL_CATEGORIES = frozenset({"string_literal", "char_literal", "int_literal", "float_literal", "bool_literal"})


class LexError(ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


@dataclass(frozen=True)
class Token:
    lexeme: str
    category: str

    def __post_init__(self):
        if not self.lexeme:
            raise ValueError("empty lexeme")
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown token category {self.category!r}")

    def __str__(self):
        return self.lexeme


def _is_ident_start(ch):
    return ch.isalpha() or ch in "_$"


def _is_ident_part(ch):
    return ch.isalnum() or ch in "_$"


class _Scanner:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.n = len(text)

    def peek(self, k=0):
        i = self.pos + k
        return self.text[i] if i < self.n else ""

    def skip_space_and_comments(self):
        text, n = self.text, self.n
        while self.pos < n:
            ch = text[self.pos]
            if ch.isspace():
                self.pos += 1
            elif text.startswith("//", self.pos):
                end = text.find("\n", self.pos)
                self.pos = n if end < 0 else end + 1
            elif text.startswith("/*", self.pos):
                end = text.find("*/", self.pos + 2)
                if end < 0:
                    raise LexError("unterminated comment", self.pos)
                self.pos = end + 2
            else:
                return

    def quoted(self, quote):
        start = self.pos
        i = self.pos + 1
        text = self.text
        while i < self.n:
            ch = text[i]
            if ch == "\\":
                i += 2
                continue
            if ch == "\n":
                break
            if ch == quote:
                self.pos = i + 1
                return text[start:self.pos]
            i += 1
        kind = "string" if quote == '"' else "char"
        raise LexError(f"unterminated {kind} literal", start)

    def number(self):
        text, start = self.text, self.pos
        i = start
        is_float = False
        if text.startswith(("0x", "0X"), i):
            i += 2
            while i < self.n and (text[i] in "0123456789abcdefABCDEF_"):
                i += 1
        elif text.startswith(("0b", "0B"), i):
            i += 2
            while i < self.n and text[i] in "01_":
                i += 1
        else:
            while i < self.n and (text[i].isdigit() or text[i] == "_"):
                i += 1
            if i < self.n and text[i] == "." and (i + 1 >= self.n or not _is_ident_start(text[i + 1])):
                is_float = True
                i += 1
                while i < self.n and (text[i].isdigit() or text[i] == "_"):
                    i += 1
            if i < self.n and text[i] in "eE":
                j = i + 1
                if j < self.n and text[j] in "+-":
                    j += 1
                if j < self.n and text[j].isdigit():
                    is_float = True
                    i = j
                    while i < self.n and text[i].isdigit():
                        i += 1
            if i < self.n and text[i] in "fFdD":
                is_float = True
                i += 1
                self.pos = i
                return Token(text[start:i], "float_literal")
        if i < self.n and text[i] in "lL" and not is_float:
            i += 1
        if i < self.n and _is_ident_part(text[i]):
            raise LexError("malformed number", start)
        self.pos = i
        return Token(text[start:i], "float_literal" if is_float else "int_literal")

    def annotation(self):
        # '@' Name ('.' Name)* [ '(' balanced ')' ]
        start = self.pos
        self.pos += 1
        self.skip_space_and_comments()
        if not _is_ident_start(self.peek()):
            raise LexError("illegal character '@'", start)
        while True:
            while self.pos < self.n and _is_ident_part(self.text[self.pos]):
                self.pos += 1
            save = self.pos
            self.skip_space_and_comments()
            if self.peek() == "." and _is_ident_start(self.peek(1)):
                self.pos += 1
                continue
            self.pos = save
            break
        save = self.pos
        self.skip_space_and_comments()
        if self.peek() != "(":
            self.pos = save
            return
        depth = 0
        while self.pos < self.n:
            self.skip_space_and_comments()
            ch = self.peek()
            if ch in "\"'":
                self.quoted(ch)
                continue
            self.pos += 1
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    return
        raise LexError("unterminated annotation arguments", start)


def tokenize(source):
    """Split ``source`` into a list of :class:`Token`.

    Raises :class:`LexError` on an unterminated string, char or comment and
    on characters outside the lexical grammar.
    """
    sc = _Scanner(source)
    out = []
    text = source
    while True:
        sc.skip_space_and_comments()
        if sc.pos >= sc.n:
            return out
        ch = text[sc.pos]
        if _is_ident_start(ch):
            start = sc.pos
            while sc.pos < sc.n and _is_ident_part(text[sc.pos]):
                sc.pos += 1
            word = text[start:sc.pos]
            if word in BOOL_LITERALS:
                out.append(Token(word, "bool_literal"))
            elif word in KEYWORDS:
                out.append(Token(word, "keyword"))
            else:
                out.append(Token(word, "identifier"))
        elif ch.isdigit() or (ch == "." and sc.peek(1).isdigit()):
            out.append(sc.number())
        elif ch == '"':
            out.append(Token(sc.quoted('"'), "string_literal"))
        elif ch == "'":
            lit = sc.quoted("'")
            if len(lit) < 3:
                raise LexError("empty char literal", sc.pos - len(lit))
            out.append(Token(lit, "char_literal"))
        elif ch == "@":
            if text.startswith("@interface", sc.pos):
                raise LexError("annotation type declarations are not supported", sc.pos)
            sc.annotation()
        else:
            for op in OPERATORS:
                if text.startswith(op, sc.pos):
                    break
            else:
                op = ch if ch in SEPARATORS else None
            if op is None:
                raise LexError(f"illegal character {ch!r}", sc.pos)
            sc.pos += len(op)
            out.append(Token(op, "separator" if op in SEPARATORS else "operator"))
