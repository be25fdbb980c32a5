#!/usr/bin/env python3
"""Small DIMACS CNF solver: DPLL with queue-driven unit propagation.

Usage: dpll_solve.py FILE.cnf
Prints "s SATISFIABLE" plus a "v" model line, or "s UNSATISFIABLE".
"""

import sys
from collections import deque


def parse(path):
    nvars = 0
    clauses = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line[0] == "c":
                continue
            if line[0] == "p":
                nvars = int(line.split()[2])
                continue
            lits = [int(tok) for tok in line.split()]
            if lits[-1] != 0:
                raise ValueError("clause line missing terminator: " + line)
            clauses.append(lits[:-1])
    return nvars, clauses


class Solver:
    def __init__(self, nvars, clauses):
        self.clauses = clauses
        self.nvars = nvars
        self.value = [0] * (nvars + 1)  # 0 free, 1 true, -1 false
        self.occ_pos = [[] for _ in range(nvars + 1)]
        self.occ_neg = [[] for _ in range(nvars + 1)]
        for ci, clause in enumerate(clauses):
            for lit in clause:
                (self.occ_pos if lit > 0 else self.occ_neg)[abs(lit)].append(ci)
        self.sat_count = [0] * len(clauses)
        self.free_count = [len(clause) for clause in clauses]
        self.trail = []
        self.pending = deque()

    def assign(self, lit):
        var = abs(lit)
        val = 1 if lit > 0 else -1
        if self.value[var] != 0:
            return self.value[var] == val
        self.value[var] = val
        self.trail.append(var)
        sats = self.occ_pos[var] if val > 0 else self.occ_neg[var]
        hits = self.occ_neg[var] if val > 0 else self.occ_pos[var]
        for ci in sats:
            self.sat_count[ci] += 1
        for ci in hits:
            self.free_count[ci] -= 1
            if self.free_count[ci] <= 1 and self.sat_count[ci] == 0:
                self.pending.append(ci)
        return True

    def undo(self, mark):
        while len(self.trail) > mark:
            var = self.trail.pop()
            val = self.value[var]
            self.value[var] = 0
            sats = self.occ_pos[var] if val > 0 else self.occ_neg[var]
            hits = self.occ_neg[var] if val > 0 else self.occ_pos[var]
            for ci in sats:
                self.sat_count[ci] -= 1
            for ci in hits:
                self.free_count[ci] += 1

    def propagate(self):
        # Stale queue entries from abandoned branches are skipped by the
        # counter re-checks, so only a seed scan is needed here.
        self.pending.clear()
        for ci in range(len(self.clauses)):
            if self.sat_count[ci] == 0 and self.free_count[ci] <= 1:
                self.pending.append(ci)
        while self.pending:
            ci = self.pending.popleft()
            if self.sat_count[ci] > 0:
                continue
            if self.free_count[ci] == 0:
                return False
            if self.free_count[ci] != 1:
                continue
            unit = next(
                lit for lit in self.clauses[ci] if self.value[abs(lit)] == 0
            )
            if not self.assign(unit):
                return False
        return True

    def verified(self):
        return all(count > 0 for count in self.sat_count)

    def solve(self):
        mark = len(self.trail)
        if not self.propagate():
            self.undo(mark)
            return False
        var = next(
            (v for v in range(1, self.nvars + 1) if self.value[v] == 0), None
        )
        if var is None:
            if self.verified():
                return True
            self.undo(mark)
            return False
        for lit in (var, -var):
            submark = len(self.trail)
            if self.assign(lit) and self.solve():
                return True
            self.undo(submark)
        self.undo(mark)
        return False


def main():
    if len(sys.argv) != 2:
        print("usage: dpll_solve.py FILE.cnf", file=sys.stderr)
        return 2
    nvars, clauses = parse(sys.argv[1])
    solver = Solver(nvars, clauses)
    if solver.solve():
        print("s SATISFIABLE")
        model = " ".join(
            str(v if solver.value[v] > 0 else -v) for v in range(1, nvars + 1)
        )
        print("v " + model + " 0")
    else:
        print("s UNSATISFIABLE")
    return 0


if __name__ == "__main__":
    sys.exit(main())
