"""Pure-Python solution search kernel.

Bare backtracking with count saturation and required-count forcing, no
proofs, no statistics beyond a node count.  ``_kernel.pyx`` is a line-by-line
port; both must return identical solutions in identical order.
"""

from __future__ import annotations

import sys

BACKEND = "python"


class _Search:
    def __init__(self, n, asterisms, cell_asterisms, counts, values, limit, max_nodes):
        self.n = n
        self.ast = [list(a) for a in asterisms]
        self.cast = [list(x) for x in cell_asterisms]
        self.counts = list(counts)
        self.L = len(counts)
        self.A = len(self.ast)
        full = (1 << self.L) - 1
        self.mask = [full if v < 0 else 1 << v for v in values]
        self.val = [-1] * n
        self.placed = [[0] * self.L for _ in range(self.A)]
        self.dirty = [1] * self.A
        self.trail = []
        self.queue = [c for c in range(n) if values[c] >= 0]
        self.limit = limit
        self.max_nodes = max_nodes
        self.nodes = 0
        self.solutions = []
        self.stop = False
        self.aborted = False

    def setmask(self, c, m):
        self.trail.append((c, self.mask[c]))
        self.mask[c] = m
        for a in self.cast[c]:
            self.dirty[a] = 1

    def commit(self, c):
        m = self.mask[c]
        lab = m.bit_length() - 1
        bit = m
        self.val[c] = lab
        self.trail.append((-c - 1, 0))
        mask, val, placed, counts = self.mask, self.val, self.placed, self.counts
        # count in every asterism first so that undo can always subtract them all
        for a in self.cast[c]:
            self.dirty[a] = 1
            placed[a][lab] += 1
        for a in self.cast[c]:
            p = placed[a][lab]
            if p > counts[lab]:
                return False
            if p == counts[lab]:
                for x in self.ast[a]:
                    if val[x] < 0 and mask[x] & bit:
                        nm = mask[x] & ~bit
                        if nm == 0:
                            return False
                        self.setmask(x, nm)
                        if nm & (nm - 1) == 0:
                            self.queue.append(x)
        return True

    def undo(self, mark):
        trail, mask, val, placed = self.trail, self.mask, self.val, self.placed
        while len(trail) > mark:
            c, old = trail.pop()
            if c < 0:
                c = -c - 1
                lab = val[c]
                for a in self.cast[c]:
                    placed[a][lab] -= 1
                val[c] = -1
            else:
                mask[c] = old
        self.queue = []

    def propagate(self):
        mask, val, counts, dirty = self.mask, self.val, self.counts, self.dirty
        while True:
            while self.queue:
                c = self.queue.pop()
                if val[c] >= 0:
                    continue
                if not self.commit(c):
                    return False
            found = False
            for a in range(self.A):
                if not dirty[a]:
                    continue
                dirty[a] = 0
                cells = self.ast[a]
                placed = self.placed[a]
                for lab in range(self.L):
                    r = counts[lab] - placed[lab]
                    if r <= 0:
                        continue
                    bit = 1 << lab
                    cnt = 0
                    for x in cells:
                        if val[x] < 0 and mask[x] & bit:
                            cnt += 1
                    if cnt < r:
                        return False
                    if cnt == r:
                        for x in cells:
                            if val[x] < 0 and mask[x] & bit and mask[x] != bit:
                                self.setmask(x, bit)
                                self.queue.append(x)
                                found = True
                if found:
                    break
            if not found:
                return True

    def dfs(self):
        self.nodes += 1
        if self.max_nodes > 0 and self.nodes > self.max_nodes:
            self.aborted = True
            return
        mask, val = self.mask, self.val
        best = -1
        bestcnt = 65
        for c in range(self.n):
            if val[c] < 0:
                p = mask[c].bit_count()
                if p < bestcnt:
                    best, bestcnt = c, p
                    if p == 2:
                        break
        if best < 0:
            self.solutions.append(list(val))
            if self.limit > 0 and len(self.solutions) >= self.limit:
                self.stop = True
            return
        m = mask[best]
        while m:
            low = m & -m
            m ^= low
            mark = len(self.trail)
            self.setmask(best, low)
            self.queue.append(best)
            if self.propagate():
                self.dfs()
            self.undo(mark)
            if self.stop or self.aborted:
                return

    def run(self):
        if self.propagate():
            self.dfs()
        return self.solutions, self.nodes, not self.aborted


def search(n, asterisms, cell_asterisms, counts, values, limit=-1, max_nodes=0):
    """Enumerate completions of a partial Latin board.

    ``limit <= 0`` means all solutions; ``max_nodes <= 0`` means no node cap.
    Returns ``(solutions, nodes, complete)`` where each solution is a list of
    label ids per cell and ``complete`` is False when the node cap was hit.
    """
    limit_rec = max(sys.getrecursionlimit(), n + 100)
    if limit_rec > sys.getrecursionlimit():
        sys.setrecursionlimit(limit_rec)
    return _Search(n, asterisms, cell_asterisms, counts, values, limit, max_nodes).run()
