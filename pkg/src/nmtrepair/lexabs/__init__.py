"""Tokenize, abstract and concretize Java methods."""
from .abstraction import (
    ID_PATTERN,
    AbstractedMethod,
    IdMapping,
    abstract_method,
    abstract_pair,
    dump_mapping,
    load_mapping,
    is_id_token,
    split_id,
)
from .concretize import (
    UnmappableId,
    concretize,
    concretize_placeholder,
    concretize_tokens,
    format_tokens,
)
from .idioms import BASE_IDIOMS, mine_idioms, read_idioms, write_idioms
from .lexer import LexError, Token, tokenize
from .roles import ID_CATEGORIES, classify_roles
from .transformer import MethodAbstractor

__all__ = [
    "ID_PATTERN", "AbstractedMethod", "IdMapping", "abstract_method", "abstract_pair", "dump_mapping", "load_mapping",
    "is_id_token", "split_id", "UnmappableId", "concretize", "concretize_placeholder",
    "concretize_tokens", "format_tokens", "BASE_IDIOMS", "mine_idioms", "read_idioms",
    "write_idioms", "LexError", "Token", "tokenize", "ID_CATEGORIES", "classify_roles",
    "MethodAbstractor",
]
