#!/usr/bin/env python3
"""Reference optima for the densest-k-subgraph SDP relaxation.

Builds the same (n+1) x (n+1) Gram-matrix program the C++ solver works on
and solves it with CLARABEL at tight tolerances (falling back to the solver
defaults, ~1e-8, when the tight run reports inaccuracy).  The printed values
are frozen into tests/test_sdp.cpp as oracle fixtures, so rerun this only
when the fixture list changes.
"""

import numpy as np
import cvxpy as cp


def solve_sdp(n, k, edges):
    """edges: list of (u, v, w) with u < v."""
    dim = n + 1
    G = cp.Variable((dim, dim), symmetric=True)
    cons = [G >> 0, G[n, n] == 1]
    cons.append(cp.sum(cp.diag(G)[:n]) == k)
    for i in range(n):
        cons.append(G[i, n] == G[i, i])
        cons.append(G[i, i] <= 1)
        row = cp.sum(G[i, :n])
        cons.append(row <= k * G[i, i])
        for j in range(n):
            if j != i:
                cons.append(G[i, j] <= G[i, i])
    for i in range(n):
        for j in range(i + 1, n):
            cons.append(G[i, j] >= 0)
    obj = sum(w * G[u, v] for u, v, w in edges)
    prob = cp.Problem(cp.Maximize(obj), cons)
    prob.solve(solver=cp.CLARABEL, tol_gap_abs=1e-10, tol_gap_rel=1e-10,
               tol_feas=1e-10)
    if prob.status == cp.OPTIMAL:
        return prob.value
    # The tie constraints G[i,n] == G[i,i] make the program degenerate, and
    # CLARABEL reports optimal_inaccurate on some fixtures.  Cross-check the
    # inaccurate value against SCS and accept when both agree.
    clarabel_val = prob.value
    assert prob.status == "optimal_inaccurate", prob.status
    prob.solve(solver=cp.SCS, eps=1e-9, max_iters=200000)
    assert prob.status in (cp.OPTIMAL, "optimal_inaccurate"), prob.status
    assert abs(prob.value - clarabel_val) <= 1e-7 * (1 + abs(prob.value)), (
        clarabel_val, prob.value)
    return prob.value


def cycle(n):
    return [(min(i, (i + 1) % n), max(i, (i + 1) % n), 1.0) for i in range(n)]


def complete(n, w=1.0):
    return [(i, j, w) for i in range(n) for j in range(i + 1, n)]


def path(n):
    return [(i, i + 1, 1.0) for i in range(n - 1)]


def star(n):
    return [(0, i, 1.0) for i in range(1, n)]


def weighted_fixture():
    # Two triangles sharing no vertex, bridged by a light edge; irrational-ish
    # weights exercise the weighted path.
    e = [(0, 1, 1.5), (0, 2, 2.25), (1, 2, 0.75),
         (3, 4, 1.0), (3, 5, 0.5), (4, 5, 2.0), (2, 3, 0.125)]
    return 6, e


def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    e = sorted((min(u, v), max(u, v)) for u, v in outer + spokes + inner)
    return 10, [(u, v, 1.0) for u, v in e]


def main():
    np.random.seed(0)
    fixtures = []
    fixtures.append(("C5_k2", 5, 2, cycle(5)))
    fixtures.append(("C5_k3", 5, 3, cycle(5)))
    fixtures.append(("C6_k3", 6, 3, cycle(6)))
    fixtures.append(("C6_k4", 6, 4, cycle(6)))
    fixtures.append(("P4_k2", 4, 2, path(4)))
    fixtures.append(("P5_k3", 5, 3, path(5)))
    fixtures.append(("K4_k3", 4, 3, complete(4)))
    fixtures.append(("K6_k4", 6, 4, complete(6)))
    fixtures.append(("star6_k3", 6, 3, star(6)))
    n, e = weighted_fixture()
    fixtures.append(("twotri_k3", n, 3, e))
    fixtures.append(("twotri_k4", n, 4, e))
    n, e = petersen()
    fixtures.append(("petersen_k4", n, 4, e))
    fixtures.append(("petersen_k5", n, 5, e))

    print("// generated by tools/gen_sdp_oracle.py (CLARABEL, tol 1e-10,")
    print("// SCS cross-check on degenerate fixtures)")
    for name, n, k, edges in fixtures:
        val = solve_sdp(n, k, edges)
        edge_str = ", ".join("{%d, %d, %r}" % (u, v, w) for u, v, w in edges)
        print("{\"%s\", %d, %d, %.12f, {%s}}," % (name, n, k, val, edge_str))


if __name__ == "__main__":
    main()
