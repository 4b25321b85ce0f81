"""Layered skyline-candidate synopsis.

A parent dominates each child with probability >= 1-alpha and expires first;
siblings on a layer mutually dominate with probability < 1-alpha; no node may
dominate (>= 1-alpha) any node on its own layer or a shallower one. Layer 1
is always a superset of the current answer set.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .model import ProbabilisticObject, dominance_probability

_TOL = 1e-9


class InsertOutcome(Enum):
    INSERTED = "inserted"
    PRUNED = "pruned"


@dataclass(eq=False)
class STNode:
    obj: ProbabilisticObject
    layer: int
    parent: "STNode | None" = None  # None means the virtual root
    children: list["STNode"] = field(default_factory=list)

    @property
    def exp(self) -> int:
        return self.obj.exp


class SkylineTree:
    def __init__(self, alpha: float):
        self.alpha = alpha
        self.layers: list[list[STNode]] = []  # layers[0] is layer 1
        self.nodes: dict[str, STNode] = {}

    # -- bookkeeping ---------------------------------------------------------

    def _threshold(self) -> float:
        return 1.0 - self.alpha - _TOL

    def _dom(self, a: STNode, b: STNode) -> float:
        return dominance_probability(a.obj, b.obj)

    def layer(self, i: int) -> list[STNode]:
        return self.layers[i - 1] if 1 <= i <= len(self.layers) else []

    def _place(self, node: STNode, layer: int) -> None:
        while len(self.layers) < layer:
            self.layers.append([])
        node.layer = layer
        row = self.layers[layer - 1]
        row.append(node)
        row.sort(key=lambda n: (n.exp, n.obj.id))

    def _trim(self) -> None:
        while self.layers and not self.layers[-1]:
            self.layers.pop()

    def _subtree(self, node: STNode):
        yield node
        for child in node.children:
            yield from self._subtree(child)

    def _shift_subtree(self, node: STNode, delta: int) -> None:
        """Move node and every descendant by delta layers (negative = up)."""
        members = list(self._subtree(node))
        for member in members:
            self.layers[member.layer - 1].remove(member)
        for member in members:
            self._place(member, member.layer + delta)
        self._trim()

    def _remove_node(self, node: STNode, heir: STNode | None) -> None:
        """Drop node; children re-parent to heir where the parent constraints
        hold, otherwise they float to layer 1 for the repair pass to settle.
        """
        thr = self._threshold()
        children = list(node.children)
        node.children = []
        self.layers[node.layer - 1].remove(node)
        if node.parent is not None:
            node.parent.children.remove(node)
            node.parent = None
        self.nodes.pop(node.obj.id, None)
        for child in children:
            if (heir is not None and heir.exp < child.exp
                    and self._dom(heir, child) >= thr):
                child.parent = heir
                heir.children.append(child)
                target = heir.layer + 1
            else:
                child.parent = None
                target = 1
            self._shift_subtree(child, target - child.layer)
        self._trim()

    def __len__(self) -> int:
        return len(self.nodes)

    def all_nodes(self):
        for row in self.layers:
            yield from row

    # -- operations ----------------------------------------------------------

    def insert(self, obj: ProbabilisticObject) -> InsertOutcome:
        thr = self._threshold()
        node = STNode(obj, layer=1)
        dominated_l1 = [n for n in list(self.layer(1))
                        if self._dom(node, n) >= thr]
        if dominated_l1:
            self._place(node, 1)
            self.nodes[obj.id] = node
            for n in dominated_l1:
                if obj.exp >= n.exp:
                    self._remove_node(n, heir=node)
                else:
                    n.parent = node
                    node.children.append(n)
                    self._shift_subtree(n, 1)
        else:
            parent: STNode | None = None
            queue = deque(self.layer(1))
            while queue:
                n = queue.popleft()
                if self._dom(n, node) >= thr:
                    if n.exp >= obj.exp:
                        return InsertOutcome.PRUNED
                    if parent is None or n.exp > parent.exp:
                        parent = n
                    queue.extend(n.children)
            if parent is None:
                self._place(node, 1)
            else:
                node.parent = parent
                parent.children.append(node)
                self._place(node, parent.layer + 1)
            self.nodes[obj.id] = node
        self._sweep(node)
        self._repair()
        return InsertOutcome.INSERTED

    def _sweep(self, base: STNode) -> None:
        """Use the newcomer to prune or re-parent nodes on its layer and below."""
        thr = self._threshold()
        changed = True
        while changed:
            changed = False
            if base.obj.id not in self.nodes:
                return
            own = set(self._subtree(base))
            for n in list(self.all_nodes()):
                if n in own or n.obj.id not in self.nodes:
                    continue
                if n.layer < base.layer:
                    continue
                if self._dom(base, n) < thr:
                    continue
                if base.exp >= n.exp:
                    self._remove_node(n, heir=base)
                elif n.parent is None or base.exp > n.parent.exp:
                    if n.parent is not None:
                        n.parent.children.remove(n)
                    n.parent = base
                    base.children.append(n)
                    self._shift_subtree(n, base.layer + 1 - n.layer)
                else:
                    continue
                changed = True
                break

    def _repair(self, budget: int = 100000) -> None:
        """Restore layer-dominance constraints after maintenance updates.

        The printed maintenance rules can leave a node dominating a peer on
        its own or a shallower layer. Each violating pair is resolved by the
        removal rule when the dominator outlives the dominated node, and by
        demotion under the dominator otherwise. Demotions terminate because
        the dominator always expires first, so the demotion relation is
        acyclic in expiration order.
        """
        thr = self._threshold()
        for _ in range(budget):
            pair = self._find_violation(thr)
            if pair is None:
                return
            a, b = pair  # a dominates b with prob >= 1-alpha, b.layer <= a.layer
            if a.exp >= b.exp:
                self._remove_node(b, heir=a)
            elif self._dom(b, a) >= thr:
                # mutual dominance: keep the longer-lived node (b)
                self._remove_node(a, heir=b)
            else:
                if b.parent is not None:
                    b.parent.children.remove(b)
                b.parent = a
                a.children.append(b)
                self._shift_subtree(b, a.layer + 1 - b.layer)
        raise RuntimeError("skyline tree repair did not converge")

    def _find_violation(self, thr: float):
        """A pair (a, b) where a dominates b on b's layer or deeper, if any."""
        nodes = list(self.all_nodes())
        for a in nodes:
            for b in nodes:
                if a is b or a.layer < b.layer:
                    continue
                if self._dom(a, b) >= thr:
                    return a, b
        return None

    def delete_expired(self, t: int) -> list[str]:
        """Remove layer-1 nodes with exp <= t; descendants move up one layer."""
        removed: list[str] = []
        while True:
            expired = [n for n in self.layer(1) if n.exp <= t]
            if not expired:
                break
            for n in expired:
                if n.obj.id in self.nodes:
                    removed.append(n.obj.id)
                    self._remove_node(n, heir=None)
        if removed:
            self._repair()
        return removed

    def first_layer(self) -> list[ProbabilisticObject]:
        return [n.obj for n in self.layer(1)]

    # -- validation and debug --------------------------------------------

    def validate(self) -> list[str]:
        """Empty list when all structural constraints hold; else diagnostics."""
        thr = self._threshold()
        problems: list[str] = []
        for i, row in enumerate(self.layers, start=1):
            exps = [n.exp for n in row]
            if exps != sorted(exps):
                problems.append(f"layer {i} not sorted by expiration")
            for n in row:
                if n.layer != i:
                    problems.append(f"{n.obj.id}: layer field {n.layer} != {i}")
                if n.parent is not None:
                    if n.parent.exp >= n.exp:
                        problems.append(
                            f"{n.obj.id}: parent {n.parent.obj.id} expires last")
                    if self._dom(n.parent, n) < thr:
                        problems.append(
                            f"{n.obj.id}: parent dominance below threshold")
                    if n.parent.layer != i - 1:
                        problems.append(f"{n.obj.id}: parent not one layer up")
                elif i != 1:
                    problems.append(f"{n.obj.id}: orphan below layer 1")
        pair = self._find_violation(thr)
        if pair is not None:
            a, b = pair
            problems.append(
                f"{a.obj.id} (layer {a.layer}) dominates {b.obj.id} "
                f"(layer {b.layer}) at or above its own layer")
        return problems

    def dump(self) -> str:
        lines = []
        for i, row in enumerate(self.layers, start=1):
            lines.append(f"layer {i}:")
            for n in row:
                parent = n.parent.obj.id if n.parent is not None else "-"
                lines.append(
                    f"  (id={n.obj.id}, exp={n.exp}, layer={n.layer}, parent={parent})")
        return "\n".join(lines)
