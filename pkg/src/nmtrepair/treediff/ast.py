from __future__ import annotations

NODE_TYPES = frozenset({
    "Method", "Parameter", "Block", "If", "While", "For", "Switch", "Case", "Try",
    "Catch", "Return", "LocalVariable", "Invocation", "FieldRead", "VariableRead",
    "TypeAccess", "ThisAccess", "BinaryOperator", "UnaryOperator", "Assignment",
    "Literal", "Conditional", "Class",
})


class AstNode:
    """Typed tree node: ``node_type``, ``label`` and ordered ``children``.

    ``tokens`` (Method roots only) holds the method's source tokens and is
    not part of the tree's identity.
    """

    __slots__ = ("node_type", "label", "children", "parent", "tokens")

    def __init__(self, node_type, label="", children=None):
        if node_type not in NODE_TYPES:
            raise ValueError(f"unknown node type {node_type!r}")
        self.node_type = node_type
        self.label = label
        self.children = []
        self.parent = None
        self.tokens = None
        for c in children or ():
            self.add(c)

    def add(self, child, index=None):
        child.parent = self
        if index is None:
            self.children.append(child)
        else:
            self.children.insert(index, child)
        return child

    def detach(self):
        if self.parent is not None:
            self.parent.children.remove(self)
            self.parent = None
        return self

    def position(self):
        return 0 if self.parent is None else next(
            i for i, c in enumerate(self.parent.children) if c is self)

    def preorder(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def postorder(self):
        for c in self.children:
            yield from c.postorder()
        yield self

    def bfs(self):
        queue = [self]
        i = 0
        while i < len(queue):
            node = queue[i]
            i += 1
            yield node
            queue.extend(node.children)

    def size(self):
        return sum(1 for _ in self.preorder())

    def height(self):
        return 1 + max((c.height() for c in self.children), default=0)

    def copy(self):
        node = AstNode(self.node_type, self.label, [c.copy() for c in self.children])
        node.tokens = self.tokens
        return node

    def signature(self):
        return (self.node_type, self.label, tuple(c.signature() for c in self.children))

    @property
    def name(self):
        return self.label

    def param_count(self):
        return sum(1 for c in self.children if c.node_type == "Parameter")

    def to_sexpr(self):
        head = f"{self.node_type}" + (f"({self.label})" if self.label else "")
        if not self.children:
            return head
        return head + "[" + ", ".join(c.to_sexpr() for c in self.children) + "]"

    def __repr__(self):
        return f"AstNode({self.to_sexpr()})"


def isomorphic(a, b):
    """Type + label + child order equality."""
    if a.node_type != b.node_type or a.label != b.label or len(a.children) != len(b.children):
        return False
    return all(isomorphic(x, y) for x, y in zip(a.children, b.children))
