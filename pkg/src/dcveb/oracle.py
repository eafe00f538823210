"""Single-threaded sorted-map oracle used as ground truth.

Two faces of the same semantics:

* :class:`OracleMap`: mutable, bisect-backed, fast enough to shadow long
  randomized runs call by call.
* :func:`apply_op`: pure function threading an immutable state tuple, so the
  linearizability checker can branch and memoize states cheaply.

Both implement ceiling/floor semantics: successor(k) is the entry with the
smallest key >= k, predecessor(k) the largest key <= k.
"""

from __future__ import annotations

from bisect import bisect_left, insort
from typing import Any, Optional

from .core import Entry

# Ops are plain tagged tuples: ("insert", key, value), ("delete", key),
# ("get", key), ("successor", key), ("predecessor", key), ("minimum",),
# ("maximum",).  Queries return Entry or None; mutators return None.

OP_NAMES = ("insert", "delete", "get", "successor", "predecessor", "minimum", "maximum")


class OracleMap:
    """Mutable ordered map over non-negative integer keys."""

    __slots__ = ("_keys", "_values")

    def __init__(self):
        self._keys: list[int] = []
        self._values: dict[int, Any] = {}

    def __len__(self) -> int:
        return len(self._keys)

    def insert(self, key: int, value: Any) -> None:
        if value is None:
            raise ValueError("value must not be None")
        if key not in self._values:
            insort(self._keys, key)
        self._values[key] = value

    def delete(self, key: int) -> None:
        if key in self._values:
            del self._values[key]
            i = bisect_left(self._keys, key)
            del self._keys[i]

    def get(self, key: int) -> Optional[Entry]:
        value = self._values.get(key)
        if value is None:
            return None
        return Entry(key, value)

    def successor(self, key: int) -> Optional[Entry]:
        i = bisect_left(self._keys, key)
        if i == len(self._keys):
            return None
        k = self._keys[i]
        return Entry(k, self._values[k])

    def predecessor(self, key: int) -> Optional[Entry]:
        i = bisect_left(self._keys, key + 1)
        if i == 0:
            return None
        k = self._keys[i - 1]
        return Entry(k, self._values[k])

    def minimum(self) -> Optional[Entry]:
        if not self._keys:
            return None
        k = self._keys[0]
        return Entry(k, self._values[k])

    def maximum(self) -> Optional[Entry]:
        if not self._keys:
            return None
        k = self._keys[-1]
        return Entry(k, self._values[k])

    def items(self) -> list[Entry]:
        return [Entry(k, self._values[k]) for k in self._keys]

    def apply(self, op: tuple):
        """Dispatch a tagged-tuple op against this map."""
        name = op[0]
        if name == "insert":
            return self.insert(op[1], op[2])
        if name == "delete":
            return self.delete(op[1])
        if name == "get":
            return self.get(op[1])
        if name == "successor":
            return self.successor(op[1])
        if name == "predecessor":
            return self.predecessor(op[1])
        if name == "minimum":
            return self.minimum()
        if name == "maximum":
            return self.maximum()
        raise ValueError("unknown op %r" % (name,))


# Immutable state for the checker: a tuple of (key, value) pairs sorted by key.
EMPTY_STATE: tuple = ()


def apply_op(state: tuple, op: tuple):
    """Pure transition: returns (result, next_state).

    Deterministic and total for well-formed ops; the state is never mutated.
    """
    name = op[0]
    if name == "insert":
        key, value = op[1], op[2]
        if value is None:
            raise ValueError("value must not be None")
        kept = [p for p in state if p[0] != key]
        kept.append((key, value))
        kept.sort(key=lambda p: p[0])
        return None, tuple(kept)
    if name == "delete":
        key = op[1]
        return None, tuple(p for p in state if p[0] != key)
    if name == "get":
        key = op[1]
        for k, v in state:
            if k == key:
                return Entry(k, v), state
        return None, state
    if name == "successor":
        key = op[1]
        for k, v in state:
            if k >= key:
                return Entry(k, v), state
        return None, state
    if name == "predecessor":
        key = op[1]
        best = None
        for k, v in state:
            if k <= key:
                best = Entry(k, v)
            else:
                break
        return best, state
    if name == "minimum":
        return (Entry(*state[0]) if state else None), state
    if name == "maximum":
        return (Entry(*state[-1]) if state else None), state
    raise ValueError("unknown op %r" % (name,))
