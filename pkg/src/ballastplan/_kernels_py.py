"""Pure-Python reference implementation of the hot kernels.

Mirrors ``_kernels.pyx`` exactly; selected at import time by
:mod:`ballastplan.kernels` when the compiled extension is unavailable or
``BALLASTPLAN_PURE_PYTHON`` is set.  Both implementations must stay in
lockstep — see tests/test_kernels.py.
"""

from __future__ import annotations

_INF = float("inf")


def _leftmost_root(xs, sl, ic):
    """Leftmost t in [xs[0], xs[-1]] where the piecewise-linear, continuous,
    non-decreasing function D(t) = sl[k]*t + ic[k] is >= 0, or xs[-1] if none."""
    if sl[0] * xs[0] + ic[0] >= 0.0:
        return xs[0], 0
    for k in range(len(sl)):
        if sl[k] * xs[k + 1] + ic[k] >= 0.0:
            if sl[k] > 0.0:
                t = -ic[k] / sl[k]
                if t < xs[k]:
                    t = xs[k]
                elif t > xs[k + 1]:
                    t = xs[k + 1]
                return t, k
            return xs[k + 1], k
    return xs[-1], len(sl) - 1


def chain_argmin(quad, lin, out):
    """Exact minimiser of sum_i quad[i]*u_i^2 + lin[i]*u_i over the set
    {u in [0,1]^n, u_i >= u_{i-1} for odd legs, u_i <= u_{i-1} for even legs}
    (legs 1-based, u_0 = 0).

    Dynamic program over the derivative of the stage value function, which
    stays piecewise linear and non-decreasing; each stage flattens one side
    (the running min over the feasible predecessor range) and adds the
    stage's own derivative.  The backward pass clamps each stage argmin
    against its successor.  Ties resolve to the leftmost minimiser.
    """
    n = len(quad)
    if n == 0:
        return
    quad = list(map(float, quad))
    lin = list(map(float, lin))
    xs = [0.0, 1.0]
    sl = [2.0 * quad[0]]
    ic = [lin[0]]
    m = [0.0] * n
    m[0], _ = _leftmost_root(xs, sl, ic)

    for i in range(1, n):
        root, k = _leftmost_root(xs, sl, ic)
        if (i + 1) % 2 == 0:
            # even leg: value uses min over s >= t, so D <- max(D, 0)
            if root >= 1.0:
                xs = [0.0, 1.0]
                sl = [0.0]
                ic = [0.0]
            elif root > 0.0:
                xs = [0.0] + [root] + xs[k + 1:]
                sl = [0.0] + sl[k:]
                ic = [0.0] + ic[k:]
        else:
            # odd leg: min over s <= t, so D <- min(D, 0)
            if root <= 0.0:
                xs = [0.0, 1.0]
                sl = [0.0]
                ic = [0.0]
            elif root < 1.0:
                xs = xs[:k + 1] + [root] + [1.0]
                sl = sl[:k + 1] + [0.0]
                ic = ic[:k + 1] + [0.0]
        a = 2.0 * quad[i]
        b = lin[i]
        for k in range(len(sl)):
            sl[k] += a
            ic[k] += b
        m[i], _ = _leftmost_root(xs, sl, ic)

    out[n - 1] = m[n - 1]
    for i in range(n - 1, 0, -1):
        if (i + 1) % 2 == 0:
            out[i - 1] = out[i] if out[i] > m[i - 1] else m[i - 1]
        else:
            out[i - 1] = out[i] if out[i] < m[i - 1] else m[i - 1]


def grid_search(cost, c_units, out_idx):
    """Exhaustive search over grid-valued buoyancy changes.

    ``cost[i][g]`` is the cost of traversing leg i at level index g; fills
    (1-based odd legs) raise the level index and consume air units, vents
    lower it.  Feasible iff every level index stays in [0, res-1] and total
    air units never exceed ``c_units``.  Returns the minimum cost; the
    first minimiser in lexicographic order is written to ``out_idx``.
    Branches whose partial cost already meets the incumbent are pruned
    (leg costs are non-negative, so descendants cannot improve).
    """
    n = len(cost)
    res = len(cost[0])
    cost = [list(map(float, row)) for row in cost]
    best = _INF
    gi = [0] * n
    lvl = [0] * n
    air = [0] * n
    pc = [0.0] * n
    i = 0
    gi[0] = -1
    while i >= 0:
        gi[i] += 1
        g = gi[i]
        if i % 2 == 0:
            mx = res - 1 - lvl[i]
            rem = c_units - air[i]
            if rem < mx:
                mx = rem
        else:
            mx = lvl[i]
        if g > mx:
            i -= 1
            continue
        nl = lvl[i] + g if i % 2 == 0 else lvl[i] - g
        npc = pc[i] + cost[i][nl]
        if npc >= best:
            continue
        if i == n - 1:
            best = npc
            for j in range(n):
                out_idx[j] = gi[j]
            continue
        lvl[i + 1] = nl
        air[i + 1] = air[i] + (g if i % 2 == 0 else 0)
        pc[i + 1] = npc
        i += 1
        gi[i] = -1
    return best
