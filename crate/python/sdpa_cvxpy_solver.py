#!/usr/bin/env python3
"""CSDP-compatible command line wrapper around cvxpy.

    sdpa_cvxpy_solver.py problem.dat-s solution.sol

Reads an SDPA sparse problem

    minimize c.x  subject to  sum_j x_j F_j - F_0 >= 0

and writes a CSDP-style solution: the vector x on the first line, then
`1 blk i j v` entries of the slack matrix and `2 blk i j v` entries of the
dual matrix. Use with `specref --solver file:python/sdpa_cvxpy_solver.py`.
The cvxpy backend defaults to CLARABEL; set SPECREF_CVXPY_SOLVER to change it.
"""

import os
import re
import sys

import cvxpy as cp
import numpy as np


def read_sdpa(path):
    with open(path) as f:
        lines = [l for l in f if l.strip() and l.lstrip()[0] not in '*"']
    tokens = lambda l: [t for t in re.split(r"[\s,{}()]+", l.strip()) if t]
    m = int(tokens(lines[0])[0])
    nblocks = int(tokens(lines[1])[0])
    dims = [int(t) for t in tokens(lines[2])[:nblocks]]
    c = np.array([float(t) for t in tokens(lines[3])[:m]]) if m else np.zeros(0)
    mats = [[np.zeros((abs(n), abs(n))) for n in dims] for _ in range(m + 1)]
    for line in lines[4:]:
        t = tokens(line)
        j, blk, i, k = (int(x) for x in t[:4])
        v = float(t[4])
        mats[j][blk - 1][i - 1, k - 1] = v
        mats[j][blk - 1][k - 1, i - 1] = v
    return m, dims, c, mats


def main(argv):
    if len(argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    m, dims, c, mats = read_sdpa(argv[1])
    x = cp.Variable(m)
    slacks = []
    for blk, n in enumerate(dims):
        expr = -mats[0][blk]
        for j in range(m):
            if np.any(mats[j + 1][blk]):
                expr = expr + x[j] * mats[j + 1][blk]
        slacks.append(expr)
    constraints = [(s + s.T) / 2 >> 0 for s in slacks]
    problem = cp.Problem(cp.Minimize(c @ x), constraints)
    solver = os.environ.get("SPECREF_CVXPY_SOLVER", "CLARABEL")
    try:
        problem.solve(solver=solver)
    except cp.error.SolverError as e:
        print(f"solver error: {e}", file=sys.stderr)
        return 1
    if x.value is None:
        print(f"no solution: status {problem.status}", file=sys.stderr)
        return 1

    out = [" ".join(f"{v:.17e}" for v in x.value)]
    for sel, values in ((1, [s.value for s in slacks]), (2, [con.dual_value for con in constraints])):
        for blk, mat in enumerate(values, start=1):
            mat = np.atleast_2d(mat)
            for i in range(mat.shape[0]):
                for k in range(i, mat.shape[1]):
                    if mat[i, k] != 0.0:
                        out.append(f"{sel} {blk} {i + 1} {k + 1} {mat[i, k]:.17e}")
    with open(argv[2], "w") as f:
        f.write("\n".join(out) + "\n")
    return 0 if problem.status == cp.OPTIMAL else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv))
