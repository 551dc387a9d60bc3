"""Method-level ASTs, method pairing and edit scripts."""
from .actions import KINDS, ApplyError, EditAction, apply, diff, dump_actions, load_actions
from .ast import NODE_TYPES, AstNode, isomorphic
from .matcher import match
from .methods import MethodPairList, bigram_similarity, map_method_pairs
from .parser import ParseError, is_valid_method, parse_method, parse_methods

__all__ = [
    "KINDS", "ApplyError", "EditAction", "apply", "diff", "dump_actions", "load_actions",
    "NODE_TYPES", "AstNode", "isomorphic", "match", "MethodPairList", "bigram_similarity",
    "map_method_pairs", "ParseError", "is_valid_method", "parse_method", "parse_methods",
]
