"""Concurrent ordered map over integer keys.

The structure is a fixed-fanout tree of nodes.  An internal node holds an
atomic occupancy summary word plus an array of child slots; a leaf holds one
(key, value) pair.  A key's path through the tree is its base-n digit
expansion, so lookups touch one node per digit.  The tree grows by stacking
new root levels above the old root when a key exceeds the current capacity,
and trims root levels back off when only the leftmost subtree remains.

Concurrency contract:

* ``get``/``successor``/``predecessor``/``minimum``/``maximum`` take no locks.
* ``insert`` briefly read-locks the published-root guard, then read-locks one
  node per level hand over hand; many inserts proceed in parallel.
* ``delete`` write-locks (parent, child) pairs bottom-up, one pair at a time,
  and takes the root guard exclusively only while trimming.
* All locks are fair; no operation ever holds more than two node locks.

Nodes detached from the tree stay readable by threads that still hold
references (reclamation is deferred to the garbage collector), which is what
lets the query paths run unlocked.
"""

from __future__ import annotations

import threading
from typing import Any, NamedTuple, Optional

from .bitops import (
    AtomicReference,
    AtomicWord,
    atomic_set_child,
    capacity,
    check_branching,
    child_mask,
    clear_child,
    max_child_below,
    min_child_above,
    required_height,
    has_child,
)
from .rwlock import FairRWLock


class Entry(NamedTuple):
    key: int
    value: Any


class Capacity(NamedTuple):
    size: int
    height: int


class Node:
    """One tree node.

    Internal role: ``summary`` + ``children`` + a slot-CAS guard.  Leaf role:
    ``data``/``index`` only (``index`` is -1 while the slot is vacant).  The
    role is fixed at creation; growth and trimming shift levels, not roles.
    """

    __slots__ = ("summary", "children", "data", "index", "lock", "_slot_cas")

    def __init__(self, n: int, leaf: bool):
        self.data = None
        self.index = -1
        self.lock = FairRWLock()
        if leaf:
            self.summary = None
            self.children = None
            self._slot_cas = None
        else:
            self.summary = AtomicWord(0)
            self.children = [None] * n
            self._slot_cas = threading.Lock()

    def cas_child(self, pos: int, candidate: "Node") -> "Node":
        """Install ``candidate`` at ``pos`` if the slot is empty.

        Returns the slot's occupant, i.e. ``candidate`` on success or the
        node a racing inserter installed first.
        """
        with self._slot_cas:
            current = self.children[pos]
            if current is None:
                self.children[pos] = candidate
                return candidate
            return current


class TreeParams:
    """Published tree shape: read-only after publication through the ap cell."""

    __slots__ = ("size", "height", "root")

    def __init__(self, size: int, height: int, root: Optional[Node]):
        self.size = size
        self.height = height
        self.root = root


class Trail:
    """Nodes and child positions visited on the way toward a key.

    ``nodes[k]``/``slots[k]`` describe level ``k``.  ``depth`` is the number
    of levels fully traversed: ``depth == height`` means the leaf was reached
    and is stored in ``node``.  On an early stop, entry ``depth`` is still
    recorded (the node whose summary bit was clear, or whose child slot was
    empty; ``node`` is None in the latter case) so that resumable searches
    have a defined frame at the stop level.
    """

    __slots__ = ("nodes", "slots", "depth", "node")

    def __init__(self, nodes, slots, depth, node):
        self.nodes = nodes
        self.slots = slots
        self.depth = depth
        self.node = node


class DcvebArray:
    """Concurrent dynamic set of integer-keyed entries with order queries.

    ``branching`` is the tree fanout (power of two, at most 64).  Keys must
    lie in ``[0, 2**key_bits)``; bounding the key domain bounds how many
    root-growth races a single delete may need to clean up after, which is
    what ``max_rep`` caps (its default is exactly that bound).
    """

    def __init__(self, branching: int = 64, key_bits: int = 63,
                 max_rep: Optional[int] = None, hooks=None):
        check_branching(branching)
        if key_bits < 1:
            raise ValueError("key_bits must be >= 1")
        self._n = branching
        self._shift = branching.bit_length() - 1
        self._mask = branching - 1
        self._key_limit = 1 << key_bits
        needed = required_height(self._key_limit - 1, branching)
        if max_rep is None:
            max_rep = needed
        elif max_rep < needed:
            raise ValueError(
                "max_rep %d is below required_height(max key) = %d" % (max_rep, needed)
            )
        self._max_rep = max_rep
        self._hooks = hooks
        self._ap_lock = FairRWLock()
        self._ap = AtomicReference(TreeParams(branching, 1, Node(branching, False)))

    # -- introspection ---------------------------------------------------

    @property
    def branching(self) -> int:
        return self._n

    @property
    def max_rep(self) -> int:
        return self._max_rep

    def capacity_snapshot(self) -> Capacity:
        params = self._ap.load()
        return Capacity(params.size, params.height)

    def _params(self) -> TreeParams:
        return self._ap.load()

    def _check_key(self, key) -> None:
        if not isinstance(key, int) or key < 0 or key >= self._key_limit:
            raise ValueError(
                "key must be an int in [0, %d), got %r" % (self._key_limit, key)
            )

    # -- queries (lock-free) ----------------------------------------------

    def get(self, key: int) -> Optional[Entry]:
        self._check_key(key)
        params = self._ap.load()
        if key >= params.size:
            return None
        n = self._n
        shift = self._shift
        mask = self._mask
        h = params.height
        node = params.root
        level = 0
        while level < h:
            digit = (key >> (shift * (h - 1 - level))) & mask
            if node.summary.load() & (1 << (n - 1 - digit)) == 0:
                return None
            node = node.children[digit]
            if node is None:
                return None
            level += 1
        value = node.data
        if value is None:
            return None
        return Entry(key, value)

    def successor(self, key: int) -> Optional[Entry]:
        """Entry with the smallest key' >= key, or None.

        Takes no locks.  If a candidate vanishes mid-descent the search
        resumes from the stop point, sweeping rightward; it never restarts
        from the root, so an entry that stays present for the whole call
        cannot be missed.
        """
        self._check_key(key)
        params = self._ap.load()
        if key >= params.size:
            return None
        return self._scan(params, key, True)

    def predecessor(self, key: int) -> Optional[Entry]:
        """Entry with the largest key' <= key, or None.  Mirror of successor."""
        self._check_key(key)
        params = self._ap.load()
        if key >= params.size:
            key = params.size - 1
        return self._scan(params, key, False)

    def minimum(self) -> Optional[Entry]:
        return self.successor(0)

    def maximum(self) -> Optional[Entry]:
        params = self._ap.load()
        return self._scan(params, params.size - 1, False)

    def _scan(self, params: TreeParams, key: int, ascending: bool) -> Optional[Entry]:
        n = self._n
        root = params.root
        if root.summary.load() == 0:
            return None
        h = params.height
        trail = self._make_path(key, params)
        nodes = trail.nodes
        slots = trail.slots
        level = trail.depth
        if level == h:
            leaf = trail.node
            level = h - 1
            if leaf is not None:
                value = leaf.data
                index = leaf.index
                if value is not None and index != -1:
                    return Entry(index, value)
        sideways = min_child_above if ascending else max_child_below
        while True:
            # climb until some sibling subtree remains on the search side
            q = None
            while level >= 0:
                node = nodes[level]
                q = sideways(node.summary.load(), slots[level], n)
                if q is not None:
                    break
                level -= 1
            if level < 0:
                return None
            # dive to the extreme entry of the chosen subtree
            while True:
                slots[level] = q
                nodes[level] = node
                child = node.children[q]
                if child is None:
                    # candidate vanished before we reached it: retry this
                    # level strictly past q
                    break
                level += 1
                if level == h:
                    value = child.data
                    index = child.index
                    if value is not None and index != -1:
                        return Entry(index, value)
                    level -= 1
                    break
                q = sideways(child.summary.load(), None, n)
                if q is None:
                    # subtree emptied under us: resume at its parent level
                    level -= 1
                    break
                node = child

    # -- insert -----------------------------------------------------------

    def insert(self, key: int, value: Any) -> None:
        self._check_key(key)
        if value is None:
            raise ValueError("value must not be None (None marks vacant slots)")
        hooks = self._hooks
        ap_lock = self._ap_lock
        ap_lock.acquire_read()
        params = self._ap.load()
        if hooks is not None:
            hooks("insert-snapshot")
        params.root.lock.acquire_read()
        ap_lock.release_read()
        grew = False
        while key >= params.size:
            new_params = self._grow(key, params)
            new_params.root.lock.acquire_read()
            if hooks is not None:
                hooks("grow-pre-publish")
            published = self._ap.compare_and_set(params, new_params)
            params.root.lock.release_read()
            if published:
                params = new_params
                grew = True
                break
            # lost the publish race: drop the unpublished top and retry
            new_params.root.lock.release_read()
            ap_lock.acquire_read()
            params = self._ap.load()
            params.root.lock.acquire_read()
            ap_lock.release_read()
        n = self._n
        shift = self._shift
        mask = self._mask
        h = params.height
        node = params.root
        prev = None
        level = 0
        while level < h:
            digit = (key >> (shift * (h - 1 - level))) & mask
            if level != 0:
                node.lock.acquire_read()
                prev.lock.release_read()
            prev = node
            summary = node.summary
            if summary.load() & (1 << (n - 1 - digit)) == 0:
                atomic_set_child(summary, digit, n)
            child = node.children[digit]
            if child is None:
                child = node.cas_child(digit, Node(n, level + 1 == h))
            node = child
            level += 1
        node.data = value
        node.index = key
        prev.lock.release_read()
        if grew:
            # the new top claims child 0 unconditionally (concurrent inserts
            # may still be landing in the adopted old tree), so when the old
            # tree was actually empty the all-zeros spine is stale; verify
            # and strip it now that the top is published
            self._clean_residue(0)

    def _grow(self, key: int, params: TreeParams) -> TreeParams:
        """Build (privately) a taller top whose deepest new level adopts the
        current root as child 0.  The old tree is not reorganized."""
        n = self._n
        new_height = required_height(key, n)
        new_params = TreeParams(capacity(new_height, n), new_height, None)
        top_size = new_height - params.height
        prev = None
        for i in range(top_size):
            node = Node(n, False)
            node.summary.store(child_mask(0, n))
            if i == 0:
                new_params.root = node
            else:
                prev.children[0] = node
            if i == top_size - 1:
                node.children[0] = params.root
            prev = node
        return new_params

    # -- delete -----------------------------------------------------------

    def delete(self, key: int) -> None:
        self._check_key(key)
        hooks = self._hooks
        params = self._ap.load()
        if hooks is not None:
            hooks("delete-snapshot")
        if key >= params.size:
            return
        trail = self._make_path(key, params)
        if trail.depth != params.height:
            # incomplete path: nothing to delete
            return
        if not self._delete_internal(params, trail):
            return
        if hooks is not None:
            hooks("delete-cleared")
        rep = 0
        max_rep = self._max_rep
        while self._ap.load() is not params and rep < max_rep:
            self._clean_residue(key)
            rep += 1
        self._trim_top()

    def _make_path(self, key: int, params: TreeParams) -> Trail:
        n = self._n
        shift = self._shift
        mask = self._mask
        h = params.height
        nodes = [None] * h
        slots = [0] * h
        node = params.root
        level = 0
        while level < h:
            digit = (key >> (shift * (h - 1 - level))) & mask
            nodes[level] = node
            slots[level] = digit
            if node.summary.load() & (1 << (n - 1 - digit)) == 0:
                return Trail(nodes, slots, level, node)
            child = node.children[digit]
            if child is None:
                return Trail(nodes, slots, level, None)
            node = child
            level += 1
        return Trail(nodes, slots, h, node)

    def _delete_internal(self, params: TreeParams, trail: Trail) -> bool:
        """Clear the leaf, then walk up clearing occupancy bits level by level.

        Each step locks a (parent, child) pair top-down, so lock order always
        follows tree levels and never deadlocks against descending inserts.
        A node whose summary reaches zero drops its whole child array; nodes
        kept alive by siblings stay referenced with their bit cleared.
        Returns False when the leaf slot no longer holds the leaf we resolved
        (it was emptied and rebuilt since the path snapshot), in which case
        this call linearizes before the rebuild and touches nothing.
        """
        n = self._n
        h = params.height
        nodes = trail.nodes
        slots = trail.slots
        leaf = trail.node
        parent = nodes[h - 1]
        parent.lock.acquire_write()
        leaf.lock.acquire_write()
        if parent.children[slots[h - 1]] is not leaf:
            leaf.lock.release_write()
            parent.lock.release_write()
            return False
        leaf.data = None
        leaf.index = -1
        below = leaf
        level = h - 1
        while level >= 0:
            node = nodes[level]
            digit = slots[level]
            if level == h - 1:
                # pair locks already held from the prologue
                summary = clear_child(node.summary.load(), digit, n)
                node.summary.store(summary)
                if summary == 0:
                    node.children = [None] * n
                below.lock.release_write()
                node.lock.release_write()
                if summary != 0:
                    return True
            else:
                node.lock.acquire_write()
                below.lock.acquire_write()
                altered = False
                if node.children[digit] is below and below.summary.load() == 0:
                    summary = node.summary.load()
                    if has_child(summary, digit, n):
                        summary = clear_child(summary, digit, n)
                        node.summary.store(summary)
                        altered = True
                        if summary == 0:
                            node.children = [None] * n
                below.lock.release_write()
                node.lock.release_write()
                if not altered:
                    return True
            level -= 1
            below = node
        return True

    def _clean_residue(self, key: int) -> None:
        """Re-verify the current path toward ``key`` and strip stale bits.

        A delete that raced a root growth can only propagate up to the root
        it snapshotted, leaving levels above it claiming a subtree that is
        now empty.  This pass starts from the currently published root and,
        bottom-up under the same pair-lock discipline as deletion, clears
        any bit whose child is verifiably empty.  It never clears a bit over
        a live entry: emptiness is re-checked while holding both locks.
        """
        params = self._ap.load()
        if key >= params.size:
            return
        n = self._n
        h = params.height
        trail = self._make_path(key, params)
        if trail.depth == h:
            start = h - 1  # full path: begin at the (parent, leaf) edge
        elif trail.node is None:
            start = trail.depth  # stopped on an empty slot: verify that edge
        else:
            # stopped on a clear bit: that node may itself be an empty
            # residue, so begin at the edge above it
            start = trail.depth - 1
        for level in range(start, -1, -1):
            node = trail.nodes[level]
            digit = trail.slots[level]
            node.lock.acquire_write()
            child = node.children[digit]
            if child is None:
                node.lock.release_write()
                return
            child.lock.acquire_write()
            if level == h - 1:
                empty = child.data is None
            else:
                empty = child.summary.load() == 0
            altered = False
            if empty:
                summary = node.summary.load()
                if has_child(summary, digit, n):
                    summary = clear_child(summary, digit, n)
                    node.summary.store(summary)
                    altered = True
                    if summary == 0:
                        node.children = [None] * n
            child.lock.release_write()
            node.lock.release_write()
            if not altered:
                return

    def _trim_top(self) -> None:
        """Pop root levels while the root's only occupant is child 0.

        One level per iteration; the publish is re-validated and performed
        under the root guard plus the old root's write lock, which is what
        keeps a concurrent insert from landing in a detached top.
        """
        n = self._n
        only_zero = child_mask(0, n)
        hooks = self._hooks
        ap_lock = self._ap_lock
        while True:
            params = self._ap.load()
            if params.root.summary.load() != only_zero:
                return
            if params.height == 1:
                return
            if hooks is not None:
                hooks("trim-pre-publish")
            root = params.root
            ap_lock.acquire_write()
            root.lock.acquire_write()
            if root.summary.load() == only_zero:
                # fetch the lonely child under the locks: its slot may have
                # been wiped and rebuilt since the summary was first read
                lonely = root.children[0]
                if lonely is None:
                    root.lock.release_write()
                    ap_lock.release_write()
                    return
                new_params = TreeParams(
                    capacity(params.height - 1, n), params.height - 1, lonely
                )
                self._ap.compare_and_set(params, new_params)
            root.lock.release_write()
            ap_lock.release_write()
