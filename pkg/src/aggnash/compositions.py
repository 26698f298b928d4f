"""Gray-code walk over integer compositions.

A composition of ``total`` into ``parts`` parts is a tuple of non-negative
integers summing to ``total``. The walk below visits every composition once,
and consecutive compositions differ by moving a single unit from one part to
another.

The order is a reflected odometer. Part ``p`` is swept either downward (from
everything still available to zero) or upward, while the parts after it
enumerate the remainder recursively. The sweep direction of part ``p + 1``
flips whenever part ``p`` is odd, which keeps the first composition of each
sub-walk adjacent to the last composition of the previous one.
"""
from __future__ import annotations

import math


class CompositionWalk:
    """Stateful Hamiltonian walk over the compositions of ``total``.

    Starts at ``(total, 0, ..., 0)``. Each call to :meth:`next_move` moves
    one unit and returns ``(src, dst)``, or ``None`` once every composition
    has been visited.

    Parameters
    ----------
    total : int
    parts : int
    """

    def __init__(self, total, parts):
        if total < 0 or parts < 1:
            raise ValueError("need total >= 0 and parts >= 1")
        self.total = total
        self.parts = parts
        self.current = [0] * parts
        self.current[0] = total
        # False: sweep downward from the remaining total, True: upward
        self.reverse = [False] * parts
        for q in range(1, parts):
            self.reverse[q] = self.reverse[q - 1] ^ bool(self.current[q - 1] & 1)
        self.steps = 0

    def __len__(self):
        return math.comb(self.total + self.parts - 1, self.parts - 1)

    def _at_end(self, p, remaining):
        return self.current[p] == (remaining if self.reverse[p] else 0)

    def next_move(self):
        cur = self.current
        k = self.parts
        if k == 1:
            return None
        rem = [self.total] * k
        for p in range(1, k):
            rem[p] = rem[p - 1] - cur[p - 1]
        # deepest free part whose sweep is not finished
        p = k - 2
        while p >= 0 and self._at_end(p, rem[p]):
            p -= 1
        if p < 0:
            return None
        old = cur[:]
        cur[p] += 1 if self.reverse[p] else -1
        r = rem[p] - cur[p]
        for q in range(p + 1, k - 1):
            self.reverse[q] = self.reverse[q - 1] ^ bool(cur[q - 1] & 1)
            cur[q] = 0 if self.reverse[q] else r
            r -= cur[q]
        cur[k - 1] = r
        src = [q for q in range(k) if cur[q] < old[q]]
        dst = [q for q in range(k) if cur[q] > old[q]]
        assert len(src) == 1 and len(dst) == 1, "walk produced a non-unit move"
        self.steps += 1
        return src[0], dst[0]

    def __iter__(self):
        """Yield every composition as a tuple, starting with the current one."""
        yield tuple(self.current)
        while self.next_move() is not None:
            yield tuple(self.current)


def composition_walk_next(walk):
    """Advance ``walk`` by one unit move; ``None`` when exhausted."""
    return walk.next_move()


def compositions(total, parts):
    """All compositions in lexicographic order (reference enumeration)."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest
