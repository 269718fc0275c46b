# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled solution search kernel; a port of ``_kernel_py`` on C arrays."""

from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free
from libc.string cimport memset

BACKEND = "cython"


cdef extern from * nogil:
    int popcount64 "__builtin_popcountll"(unsigned long long)
    int ctz64 "__builtin_ctzll"(unsigned long long)
    int clz64 "__builtin_clzll"(unsigned long long)


cdef inline int top_label(uint64_t m) nogil:
    return 63 - clz64(m)


cdef class _Search:
    cdef int n, A, L
    cdef int *ast_ptr
    cdef int *ast_cells
    cdef int *cast_ptr
    cdef int *cast_cells
    cdef int *counts
    cdef uint64_t *mask
    cdef int *val
    cdef int *placed
    cdef char *dirty
    cdef int64_t *trail_cell
    cdef uint64_t *trail_old
    cdef int trail_len, trail_cap
    cdef int *queue
    cdef int qlen, qcap
    cdef long limit, max_nodes, nodes
    cdef bint stop, aborted
    cdef list solutions

    def __cinit__(self, int n, asterisms, cell_asterisms, counts, values, long limit, long max_nodes):
        cdef int i, j, pos
        self.n = n
        self.A = len(asterisms)
        self.L = len(counts)
        total = sum(len(a) for a in asterisms)
        self.ast_ptr = <int *> malloc((self.A + 1) * sizeof(int))
        self.ast_cells = <int *> malloc((total + 1) * sizeof(int))
        self.cast_ptr = <int *> malloc((n + 1) * sizeof(int))
        self.cast_cells = <int *> malloc((total + 1) * sizeof(int))
        self.counts = <int *> malloc(self.L * sizeof(int))
        self.mask = <uint64_t *> malloc(n * sizeof(uint64_t))
        self.val = <int *> malloc(n * sizeof(int))
        self.placed = <int *> malloc((self.A * self.L + 1) * sizeof(int))
        self.dirty = <char *> malloc(self.A + 1)
        # every cell is committed at most once and each commit/setmask adds one entry
        self.trail_cap = 4 * n * (self.L + 1) + 16
        self.trail_cell = <int64_t *> malloc(self.trail_cap * sizeof(int64_t))
        self.trail_old = <uint64_t *> malloc(self.trail_cap * sizeof(uint64_t))
        self.qcap = 4 * n * (self.L + 1) + 16
        self.queue = <int *> malloc(self.qcap * sizeof(int))
        if not (self.ast_ptr and self.ast_cells and self.cast_ptr and self.cast_cells and self.counts
                and self.mask and self.val and self.placed and self.dirty and self.trail_cell
                and self.trail_old and self.queue):
            raise MemoryError()
        pos = 0
        for i in range(self.A):
            self.ast_ptr[i] = pos
            for j in asterisms[i]:
                self.ast_cells[pos] = j
                pos += 1
        self.ast_ptr[self.A] = pos
        pos = 0
        for i in range(n):
            self.cast_ptr[i] = pos
            for j in cell_asterisms[i]:
                self.cast_cells[pos] = j
                pos += 1
        self.cast_ptr[n] = pos
        for i in range(self.L):
            self.counts[i] = counts[i]
        cdef uint64_t full = (<uint64_t> 0xFFFFFFFFFFFFFFFF) if self.L == 64 else ((<uint64_t> 1 << self.L) - 1)
        self.qlen = 0
        for i in range(n):
            v = values[i]
            self.val[i] = -1
            if v < 0:
                self.mask[i] = full
            else:
                self.mask[i] = (<uint64_t> 1) << <int> v
                self.queue[self.qlen] = i
                self.qlen += 1
        memset(self.placed, 0, (self.A * self.L + 1) * sizeof(int))
        memset(self.dirty, 1, self.A + 1)
        self.trail_len = 0
        self.limit = limit
        self.max_nodes = max_nodes
        self.nodes = 0
        self.stop = False
        self.aborted = False
        self.solutions = []

    def __dealloc__(self):
        free(self.ast_ptr); free(self.ast_cells); free(self.cast_ptr); free(self.cast_cells)
        free(self.counts); free(self.mask); free(self.val); free(self.placed); free(self.dirty)
        free(self.trail_cell); free(self.trail_old); free(self.queue)

    cdef int _grow(self) except -1:
        cdef int cap = self.trail_cap * 2
        cdef int64_t *tc = <int64_t *> malloc(cap * sizeof(int64_t))
        cdef uint64_t *to = <uint64_t *> malloc(cap * sizeof(uint64_t))
        if not tc or not to:
            raise MemoryError()
        cdef int i
        for i in range(self.trail_len):
            tc[i] = self.trail_cell[i]
            to[i] = self.trail_old[i]
        free(self.trail_cell); free(self.trail_old)
        self.trail_cell = tc
        self.trail_old = to
        self.trail_cap = cap
        return 0

    cdef int _qpush(self, int c) except -1:
        cdef int *q
        cdef int i
        if self.qlen >= self.qcap:
            q = <int *> malloc(2 * self.qcap * sizeof(int))
            if not q:
                raise MemoryError()
            for i in range(self.qlen):
                q[i] = self.queue[i]
            free(self.queue)
            self.queue = q
            self.qcap *= 2
        self.queue[self.qlen] = c
        self.qlen += 1
        return 0

    cdef int setmask(self, int c, uint64_t m) except -1:
        cdef int i
        if self.trail_len >= self.trail_cap:
            self._grow()
        self.trail_cell[self.trail_len] = c
        self.trail_old[self.trail_len] = self.mask[c]
        self.trail_len += 1
        self.mask[c] = m
        for i in range(self.cast_ptr[c], self.cast_ptr[c + 1]):
            self.dirty[self.cast_cells[i]] = 1
        return 0

    cdef int commit(self, int c) except -1:
        cdef uint64_t bit = self.mask[c]
        cdef uint64_t nm
        cdef int lab = top_label(bit)
        cdef int i, j, a, x, p
        self.val[c] = lab
        if self.trail_len >= self.trail_cap:
            self._grow()
        self.trail_cell[self.trail_len] = -c - 1
        self.trail_old[self.trail_len] = 0
        self.trail_len += 1
        # count in every asterism first so that undo can always subtract them all
        for i in range(self.cast_ptr[c], self.cast_ptr[c + 1]):
            a = self.cast_cells[i]
            self.dirty[a] = 1
            self.placed[a * self.L + lab] += 1
        for i in range(self.cast_ptr[c], self.cast_ptr[c + 1]):
            a = self.cast_cells[i]
            p = self.placed[a * self.L + lab]
            if p > self.counts[lab]:
                return 0
            if p == self.counts[lab]:
                for j in range(self.ast_ptr[a], self.ast_ptr[a + 1]):
                    x = self.ast_cells[j]
                    if self.val[x] < 0 and (self.mask[x] & bit):
                        nm = self.mask[x] & ~bit
                        if nm == 0:
                            return 0
                        self.setmask(x, nm)
                        if (nm & (nm - 1)) == 0:
                            self._qpush(x)
        return 1

    cdef void undo(self, int mark):
        cdef int64_t c
        cdef int i, lab
        while self.trail_len > mark:
            self.trail_len -= 1
            c = self.trail_cell[self.trail_len]
            if c < 0:
                c = -c - 1
                lab = self.val[c]
                for i in range(self.cast_ptr[c], self.cast_ptr[c + 1]):
                    self.placed[self.cast_cells[i] * self.L + lab] -= 1
                self.val[c] = -1
            else:
                self.mask[c] = self.trail_old[self.trail_len]
        self.qlen = 0

    cdef int propagate(self) except -1:
        cdef int a, lab, j, x, r, cnt, c
        cdef bint found
        cdef uint64_t bit
        while True:
            while self.qlen > 0:
                self.qlen -= 1
                c = self.queue[self.qlen]
                if self.val[c] >= 0:
                    continue
                if not self.commit(c):
                    return 0
            found = False
            for a in range(self.A):
                if not self.dirty[a]:
                    continue
                self.dirty[a] = 0
                for lab in range(self.L):
                    r = self.counts[lab] - self.placed[a * self.L + lab]
                    if r <= 0:
                        continue
                    bit = (<uint64_t> 1) << lab
                    cnt = 0
                    for j in range(self.ast_ptr[a], self.ast_ptr[a + 1]):
                        x = self.ast_cells[j]
                        if self.val[x] < 0 and (self.mask[x] & bit):
                            cnt += 1
                    if cnt < r:
                        return 0
                    if cnt == r:
                        for j in range(self.ast_ptr[a], self.ast_ptr[a + 1]):
                            x = self.ast_cells[j]
                            if self.val[x] < 0 and (self.mask[x] & bit) and self.mask[x] != bit:
                                self.setmask(x, bit)
                                self._qpush(x)
                                found = True
                if found:
                    break
            if not found:
                return 1

    cdef int dfs(self) except -1:
        cdef int c, best, bestcnt, p, mark
        cdef uint64_t m, low
        self.nodes += 1
        if self.max_nodes > 0 and self.nodes > self.max_nodes:
            self.aborted = True
            return 0
        best = -1
        bestcnt = 65
        for c in range(self.n):
            if self.val[c] < 0:
                p = popcount64(self.mask[c])
                if p < bestcnt:
                    best = c
                    bestcnt = p
                    if p == 2:
                        break
        if best < 0:
            self.solutions.append([self.val[c] for c in range(self.n)])
            if self.limit > 0 and len(self.solutions) >= self.limit:
                self.stop = True
            return 0
        m = self.mask[best]
        while m:
            low = m & (~m + 1)
            m ^= low
            mark = self.trail_len
            self.setmask(best, low)
            self._qpush(best)
            if self.propagate():
                self.dfs()
            self.undo(mark)
            if self.stop or self.aborted:
                return 0
        return 0

    def run(self):
        if self.propagate():
            self.dfs()
        return self.solutions, self.nodes, not self.aborted


def search(n, asterisms, cell_asterisms, counts, values, limit=-1, max_nodes=0):
    """Enumerate completions of a partial Latin board; see ``_kernel_py.search``."""
    return _Search(n, asterisms, cell_asterisms, counts, values, limit, max_nodes).run()
