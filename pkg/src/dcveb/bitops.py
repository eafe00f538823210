"""Bit-vector arithmetic for occupancy summaries and key digit decomposition.

A node with branching factor ``n`` (a power of two, at most the machine word
width) keeps an ``n``-bit occupancy word.  Child position ``p`` in ``[0, n)``
maps to bit index ``n - 1 - p`` counted from the least significant bit, so
child 0 owns the most significant of the ``n`` bits.  With this layout the
"first child at or after p" query is a mask plus a highest-set-bit, which
``int.bit_length`` gives us directly.

Everything here is either a pure function on plain ints or an operation on an
:class:`AtomicWord` cell, so it is unit-testable without any tree present.
"""

from __future__ import annotations

import threading

WORD_BITS = 64


class OutOfRangeError(ValueError):
    """Key does not fit the addressed capacity; the tree must grow first."""


class AtomicWord:
    """Integer cell with atomic load and compare-and-set.

    CPython has no hardware CAS; a private mutex provides the
    compare-and-set atomicity.  Plain loads are safe without it.
    """

    __slots__ = ("_value", "_lock")

    def __init__(self, value: int = 0):
        self._value = value
        self._lock = threading.Lock()

    def load(self) -> int:
        return self._value

    def store(self, value: int) -> None:
        with self._lock:
            self._value = value

    def compare_and_set(self, expected: int, update: int) -> bool:
        with self._lock:
            if self._value == expected:
                self._value = update
                return True
            return False


class AtomicReference:
    """Reference cell with atomic load and compare-and-set (identity compare)."""

    __slots__ = ("_value", "_lock")

    def __init__(self, value=None):
        self._value = value
        self._lock = threading.Lock()

    def load(self):
        return self._value

    def compare_and_set(self, expected, update) -> bool:
        with self._lock:
            if self._value is expected:
                self._value = update
                return True
            return False


def check_branching(n: int) -> None:
    """Reject branching factors that are not powers of two in [2, WORD_BITS]."""
    if not isinstance(n, int) or n < 2 or n > WORD_BITS or n & (n - 1):
        raise ValueError(
            "branching factor must be a power of two in [2, %d], got %r"
            % (WORD_BITS, n)
        )


def child_mask(p: int, n: int) -> int:
    """Word with exactly the bit for child position ``p`` set."""
    assert 0 <= p < n, "child position out of range"
    return 1 << (n - 1 - p)


def has_child(bits: int, p: int, n: int) -> bool:
    """True iff the occupancy bit for child ``p`` is set."""
    assert 0 <= p < n, "child position out of range"
    return bits & (1 << (n - 1 - p)) != 0


def clear_child(bits: int, p: int, n: int) -> int:
    """``bits`` with the bit for child ``p`` cleared; other bits unchanged."""
    assert 0 <= p < n, "child position out of range"
    return bits & ~(1 << (n - 1 - p))


def only_child_zero(bits: int, n: int) -> bool:
    """True iff exactly the bit for child 0 is set."""
    return bits == 1 << (n - 1)


def min_child_above(bits: int, p: int | None, n: int) -> int | None:
    """Smallest child position strictly greater than ``p`` with its bit set.

    ``p=None`` means no lower bound (the leftmost set child overall).
    Returns None when no qualifying bit is set.
    """
    if p is None:
        masked = bits & ((1 << n) - 1)
    else:
        assert 0 <= p < n, "child position out of range"
        # children q > p live at bit indices strictly below n-1-p
        masked = bits & ((1 << (n - 1 - p)) - 1)
    if masked == 0:
        return None
    return n - masked.bit_length()


def max_child_below(bits: int, p: int | None, n: int) -> int | None:
    """Largest child position strictly less than ``p`` with its bit set.

    ``p=None`` means no upper bound (the rightmost set child overall).
    """
    if p is None:
        masked = bits & ((1 << n) - 1)
    else:
        assert 0 <= p < n, "child position out of range"
        # children q < p live at bit indices n-p and above
        masked = bits & ~((1 << (n - p)) - 1) & ((1 << n) - 1)
    if masked == 0:
        return None
    # lowest set bit index -> largest child position
    low = (masked & -masked).bit_length() - 1
    return n - 1 - low


def atomic_set_child(cell: AtomicWord, p: int, n: int) -> bool:
    """Set child ``p``'s bit in ``cell`` via a CAS retry loop.

    Returns True when this call performed the transition, False when the bit
    was already set.  Concurrent callers may only enable further bits, never
    disable them, so the loop fails at most ``n`` times before the first
    branch must hit.
    """
    mask = child_mask(p, n)
    while True:
        s = cell.load()
        if s & mask:
            return False
        if cell.compare_and_set(s, s | mask):
            return True


def digits(key: int, height: int, n: int) -> tuple[int, ...]:
    """The ``height`` base-``n`` digits of ``key``, most significant first.

    Digit ``k`` is the child position taken at tree level ``k`` on the path
    to the key's leaf.
    """
    if height < 1:
        raise ValueError("height must be >= 1")
    if key < 0 or key >= n**height:
        raise OutOfRangeError(
            "key %d out of range for height %d (capacity %d)"
            % (key, height, n**height)
        )
    shift = n.bit_length() - 1
    mask = n - 1
    return tuple((key >> (shift * (height - 1 - k))) & mask for k in range(height))


def undigits(digs, n: int) -> int:
    """Inverse of :func:`digits`: base-``n`` positional reconstruction."""
    key = 0
    for d in digs:
        key = key * n + d
    return key


def level_digit(key: int, level: int, height: int, n: int) -> int:
    """Single digit of ``key`` at ``level`` without building the whole tuple."""
    shift = n.bit_length() - 1
    return (key >> (shift * (height - 1 - level))) & (n - 1)


def required_height(key: int, n: int) -> int:
    """Smallest height h >= 1 whose capacity n**h strictly exceeds ``key``.

    Defined by the strict inequality rather than ceil(log_n key), which is
    wrong at exact powers of n and undefined at key in {0, 1}.
    """
    if key < 0:
        raise ValueError("key must be non-negative")
    h = 1
    cap = n
    while cap <= key:
        cap *= n
        h += 1
    return h


def capacity(height: int, n: int) -> int:
    """Key capacity of a tree of the given height: n**height."""
    if height < 1:
        raise ValueError("height must be >= 1")
    return n**height
