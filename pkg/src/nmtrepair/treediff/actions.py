from __future__ import annotations

from dataclasses import dataclass

from .ast import NODE_TYPES, AstNode
from .matcher import _lcs, match

KINDS = ("Update", "Insert", "Delete", "Move")
ROOT_CONTEXT = "Class"


class ApplyError(ValueError):
    pass


@dataclass(frozen=True)
class EditAction:
    """One atomic tree edit.

    ``node_id`` addresses a node by its preorder index in the buggy tree, or
    by the fresh index assigned when it was inserted.  ``context_type`` is
    the parent type (the source parent for moves).
    """

    kind: str
    node_type: str
    context_type: str
    node_id: int
    parent_id: int | None = None
    position: int | None = None
    label: str | None = None
    new_label: str | None = None
    source_type: str | None = None
    target_type: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown action kind {self.kind!r}")
        for t in (self.node_type, self.context_type):
            if t not in NODE_TYPES:
                raise ValueError(f"node type {t!r} outside the taxonomy")
        need = {
            "Update": ("new_label",),
            "Insert": ("parent_id", "position", "label"),
            "Delete": (),
            "Move": ("parent_id", "position", "source_type", "target_type"),
        }[self.kind]
        extra = {"new_label", "parent_id", "position", "label", "source_type", "target_type"} - set(need)
        for f in need:
            if getattr(self, f) is None:
                raise ValueError(f"{self.kind} action requires {f}")
        for f in extra:
            if getattr(self, f) is not None:
                raise ValueError(f"{self.kind} action must not carry {f}")

    @property
    def operation(self):
        """Identity used by the coverage metrics: (kind, node_type, context_type)."""
        return (self.kind, self.node_type, self.context_type)

    def describe(self):
        if self.kind == "Move":
            return f"Move {self.node_type} from {self.source_type} to {self.target_type}"
        return f"{self.kind} {self.node_type} at {self.context_type}"

    def to_line(self):
        fields = [self.kind, self.node_type, self.context_type, f"id={self.node_id}"]
        for name in ("parent_id", "position", "label", "new_label", "source_type", "target_type"):
            value = getattr(self, name)
            if value is not None:
                fields.append(f"{name}={_escape(str(value))}")
        return "\t".join(fields)

    @classmethod
    def from_line(cls, line):
        parts = line.rstrip("\n").split("\t")
        if len(parts) < 4:
            raise ValueError(f"malformed action line: {line!r}")
        kw = {}
        for part in parts[3:]:
            key, _, value = part.partition("=")
            key = "node_id" if key == "id" else key
            value = _unescape(value)
            kw[key] = int(value) if key in ("node_id", "parent_id", "position") else value
        return cls(parts[0], parts[1], parts[2], **kw)


def _escape(s):
    return s.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def _unescape(s):
    out = []
    it = iter(s)
    for ch in it:
        if ch == "\\":
            nxt = next(it, "")
            out.append({"t": "\t", "n": "\n", "\\": "\\"}.get(nxt, nxt))
        else:
            out.append(ch)
    return "".join(out)


def dump_actions(actions):
    return "".join(a.to_line() + "\n" for a in actions)


def load_actions(text):
    return [EditAction.from_line(line) for line in text.splitlines() if line.strip()]


def diff(buggy, fixed):
    """Edit script turning ``buggy`` into ``fixed``.

    Applying the result to ``buggy`` with :func:`apply` yields a tree
    isomorphic to ``fixed``; the script is empty iff they already are.
    """
    work = buggy.copy()
    ids = {id(n): k for k, n in enumerate(work.preorder())}
    next_id = len(ids)
    mapping = match(work, fixed)
    actions = []

    if work.label != fixed.label:
        actions.append(EditAction("Update", work.node_type, ROOT_CONTEXT, 0, new_label=fixed.label))
        work.label = fixed.label

    for y in fixed.bfs():
        z = mapping.dst_to_src[id(y)]
        xs = y.children
        placed = [x for x in xs if mapping.has_dst(x) and mapping.src(x).parent is z]
        by_pos = sorted(placed, key=lambda x: mapping.src(x).position())
        keep = {id(x) for x, _ in _lcs(placed, by_pos, lambda a, b: a is b)}
        prev = None
        for x in xs:
            pos = 0 if prev is None else prev.position() + 1
            w = mapping.src(x)
            if w is None:
                w = AstNode(x.node_type, x.label)
                ids[id(w)] = next_id
                next_id += 1
                z.add(w, pos)
                mapping.add(w, x)
                actions.append(EditAction(
                    "Insert", x.node_type, z.node_type, ids[id(w)],
                    parent_id=ids[id(z)], position=pos, label=x.label))
            else:
                if w.label != x.label:
                    actions.append(EditAction(
                        "Update", w.node_type, w.parent.node_type, ids[id(w)], new_label=x.label))
                    w.label = x.label
                if id(x) not in keep:
                    source = w.parent.node_type
                    w.detach()
                    pos = 0 if prev is None else prev.position() + 1
                    z.add(w, pos)
                    actions.append(EditAction(
                        "Move", w.node_type, source, ids[id(w)], parent_id=ids[id(z)],
                        position=pos, source_type=source, target_type=z.node_type))
            prev = w

    for w in list(work.postorder()):
        if not mapping.has_src(w):
            actions.append(EditAction("Delete", w.node_type, w.parent.node_type, ids[id(w)]))
            w.detach()
    return actions


def apply(tree, actions):
    """Replay ``actions`` on a copy of ``tree`` and return the edited copy."""
    work = tree.copy()
    nodes = dict(enumerate(work.preorder()))

    def get(node_id):
        try:
            return nodes[node_id]
        except KeyError:
            raise ApplyError(f"action references missing node {node_id}") from None

    def place(node, parent_id, position):
        parent = get(parent_id)
        if not 0 <= position <= len(parent.children):
            raise ApplyError(f"position {position} out of range for node {parent_id}")
        anc = parent
        while anc is not None:
            if anc is node:
                raise ApplyError(f"cannot move node {parent_id} under itself")
            anc = anc.parent
        parent.add(node, position)

    for a in actions:
        if a.kind == "Insert":
            if a.node_id in nodes:
                raise ApplyError(f"node id {a.node_id} already exists")
            node = AstNode(a.node_type, a.label)
            place(node, a.parent_id, a.position)
            nodes[a.node_id] = node
        elif a.kind == "Update":
            get(a.node_id).label = a.new_label
        elif a.kind == "Move":
            node = get(a.node_id)
            if node.parent is None:
                raise ApplyError("cannot move the root")
            old_parent, old_pos = node.parent, node.position()
            node.detach()
            try:
                place(node, a.parent_id, a.position)
            except ApplyError:
                old_parent.add(node, old_pos)
                raise
        else:
            node = get(a.node_id)
            if node.children:
                raise ApplyError(f"cannot delete node {a.node_id}: it still has children")
            if node.parent is None:
                raise ApplyError("cannot delete the root")
            node.detach()
            del nodes[a.node_id]
    return work
