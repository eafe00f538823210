"""Quiescent structural verification.

With no operations in flight, a full recursive walk of the tree must find
every occupancy bit telling the truth (set implies a non-empty child subtree,
clear implies an absent or empty one), every leaf's vacancy fields agreeing,
and the set of live entries identical to what chained successor calls
enumerate.  The walker also checks the closed-form bound on how many internal
nodes a tree of the current height may retain.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class WalkReport:
    element_count: int = 0
    internal_node_count: int = 0
    leaf_node_count: int = 0
    height: int = 0
    size: int = 0
    violations: list = field(default_factory=list)

    def ok(self) -> bool:
        return not self.violations


def quiescent_walk(array) -> WalkReport:
    """Verify all quiescent invariants of ``array``; callers own quiescence."""
    params = array._params()
    n = array.branching
    report = WalkReport(height=params.height, size=params.size)
    if params.height < 1:
        report.violations.append(("", "height-floor", params.height))
    if params.size != n**params.height:
        report.violations.append(("", "size-capacity-mismatch", params.size))
    entries: list = []
    _walk(params.root, 0, params.height, n, 0, "", report, entries)
    bound = (n**params.height - 1) // (n - 1)
    if report.internal_node_count > bound:
        report.violations.append(
            ("", "internal-node-bound", (report.internal_node_count, bound))
        )
    entries.sort(key=lambda e: e[0])
    chained = _successor_chain(array, min(params.size, array._key_limit))
    if entries != chained:
        report.violations.append(("", "enumeration-mismatch", (len(entries), len(chained))))
    report.element_count = len(entries)
    return report


def _walk(node, level, height, n, key_prefix, path, report, entries) -> int:
    """Recursive invariant check; returns the subtree's live entry count."""
    if level == height:
        report.leaf_node_count += 1
        data = node.data
        index = node.index
        if (data is None) != (index == -1):
            report.violations.append((path, "leaf-vacancy-disagree", (data, index)))
        if data is None:
            return 0
        if index != key_prefix:
            report.violations.append((path, "leaf-index-mismatch", (index, key_prefix)))
        entries.append((key_prefix, data))
        return 1
    report.internal_node_count += 1
    summary = node.summary.load()
    if summary >> n:
        report.violations.append((path, "summary-high-bits", summary))
    children = node.children
    total = 0
    for p in range(n):
        child = children[p]
        count = 0
        if child is not None:
            count = _walk(
                child, level + 1, height, n, key_prefix * n + p,
                "%s/%d" % (path, p), report, entries,
            )
        if summary & (1 << (n - 1 - p)):
            if child is None:
                report.violations.append((path, "bit-set-child-missing", p))
            elif count == 0:
                report.violations.append((path, "bit-set-subtree-empty", p))
        elif count > 0:
            report.violations.append((path, "bit-clear-subtree-nonempty", p))
        total += count
    return total


def _successor_chain(array, bound) -> list:
    """Enumerate by chained ceiling queries; ``bound`` caps the start key at
    the structure's addressable-and-legal key range."""
    out = []
    key = 0
    while key < bound:
        entry = array.successor(key)
        if entry is None:
            break
        if out and entry.key <= out[-1][0]:
            # non-increasing chain would loop forever; record and bail
            out.append((entry.key, entry.value))
            break
        out.append((entry.key, entry.value))
        key = entry.key + 1
    return out


def structure_fingerprint(array) -> tuple:
    """Canonical immutable snapshot of the whole physical structure.

    Two arrays with equal fingerprints hold identical node shapes, summary
    words, leaf contents and published parameters, so their future sequential
    behavior is identical.
    """
    params = array._params()
    return (
        params.size,
        params.height,
        _fingerprint(params.root, 0, params.height),
    )


def _fingerprint(node, level, height):
    if level == height:
        return ("leaf", node.data, node.index)
    return (
        "node",
        node.summary.load(),
        tuple(
            (p, _fingerprint(child, level + 1, height))
            for p, child in enumerate(node.children)
            if child is not None
        ),
    )
