"""Numeric inner loops.

Everything here is restricted to the numba-compatible subset of numpy so
the functions run either compiled or interpreted (see :mod:`._jit`).
Arguments are dense integer/float arrays; no Python objects cross the
boundary.
"""

import numpy as np

from ._jit import njit

# record layout produced by enumerate_occurrences:
#   [root position, order, label_0..label_3, slot_0..slot_15]
# slot_m holds the hyperedge label of member-bitmask m, or -1 if absent.
REC_WIDTH = 22
REC_ORDER = 1
REC_LABELS = 2
REC_SLOTS = 6


@njit(nogil=True)
def _mark(x, delta, mark, adj_ptr, adj_idx):
    mark[x] += delta
    for t in range(adj_ptr[x], adj_ptr[x + 1]):
        mark[adj_idx[t]] += delta


@njit(nogil=True)
def _emit(k, S, pos, inc_ptr, inc_idx, mem_ptr, mem_idx, vlab, elab, rec):
    """Fill ``rec`` with the sub-hypergraph induced by ``S[:k]``.

    Returns ``(connected, conflicts)``; conflicts counts hyperedges dropped
    because an earlier hyperedge with the same member set had another label.
    """
    for c in range(1, REC_WIDTH):
        rec[c] = -1
    rec[REC_ORDER] = k
    for p in range(k):
        rec[REC_LABELS + p] = vlab[S[p]]
    conflicts = 0
    present = 0
    for p in range(k):
        x = S[p]
        low = 1 << p
        for t in range(inc_ptr[x], inc_ptr[x + 1]):
            e = inc_idx[t]
            a = mem_ptr[e]
            b = mem_ptr[e + 1]
            if b - a > k:
                continue
            mask = 0
            inside = True
            for q in range(a, b):
                pp = pos[mem_idx[q]]
                if pp < 0:
                    inside = False
                    break
                mask |= 1 << pp
            # visit each hyperedge once, from its lowest-position member
            if not inside or (mask & -mask) != low:
                continue
            slot = REC_SLOTS + mask
            if rec[slot] < 0:
                rec[slot] = elab[e]
                present |= 1 << mask
            elif rec[slot] != elab[e]:
                conflicts += 1
    full = (1 << k) - 1
    reach = 1
    changed = True
    while changed:
        changed = False
        for mask in range(16):
            if (present >> mask) & 1 and (mask & reach) and (mask | reach) != reach:
                reach |= mask
                changed = True
    return reach == full, conflicts


@njit(nogil=True)
def _push(out, n_out, rec, r):
    if n_out == out.shape[0]:
        grown = np.empty((2 * out.shape[0], REC_WIDTH), dtype=out.dtype)
        grown[:n_out] = out[:n_out]
        out = grown
    out[n_out, 0] = r
    for c in range(1, REC_WIDTH):
        out[n_out, c] = rec[c]
    return out, n_out + 1


@njit(nogil=True)
def enumerate_occurrences(adj_ptr, adj_idx, inc_ptr, inc_idx, mem_ptr, mem_idx, vlab, elab, roots, max_order):
    """Induced connected sub-hypergraphs of order <= ``max_order`` at each root.

    Connected vertex sets containing the root are walked with the rooted
    variant of the ESU extension scheme, so each set is produced exactly
    once.  ``inc_*`` must list only hyperedges of cardinality >= 2.

    Returns ``(records, conflicts)`` where ``records`` has one row per
    occurrence (layout above) and ``conflicts[r]`` counts collapsed
    duplicate member sets at root ``r``.
    """
    n = adj_ptr.shape[0] - 1
    out = np.empty((1024, REC_WIDTH), dtype=np.int64)
    n_out = 0
    conflicts = np.zeros(roots.shape[0], dtype=np.int64)
    S = np.empty(4, dtype=np.int64)
    pos = -np.ones(n, dtype=np.int64)
    mark = np.zeros(n, dtype=np.int64)
    ext0 = np.empty(n, dtype=np.int64)
    ext1 = np.empty(n, dtype=np.int64)
    ext2 = np.empty(n, dtype=np.int64)
    rec = np.empty(REC_WIDTH, dtype=np.int64)

    for r in range(roots.shape[0]):
        v = roots[r]
        S[0] = v
        pos[v] = 0
        ok, c = _emit(1, S, pos, inc_ptr, inc_idx, mem_ptr, mem_idx, vlab, elab, rec)
        out, n_out = _push(out, n_out, rec, r)
        if max_order >= 2:
            _mark(v, 1, mark, adj_ptr, adj_idx)
            n0 = 0
            for t in range(adj_ptr[v], adj_ptr[v + 1]):
                ext0[n0] = adj_idx[t]
                n0 += 1
            for i0 in range(n0):
                w1 = ext0[i0]
                S[1] = w1
                pos[w1] = 1
                ok, c = _emit(2, S, pos, inc_ptr, inc_idx, mem_ptr, mem_idx, vlab, elab, rec)
                conflicts[r] += c
                if ok:
                    out, n_out = _push(out, n_out, rec, r)
                if max_order >= 3:
                    n1 = 0
                    for t in range(i0 + 1, n0):
                        ext1[n1] = ext0[t]
                        n1 += 1
                    for t in range(adj_ptr[w1], adj_ptr[w1 + 1]):
                        u = adj_idx[t]
                        if mark[u] == 0:
                            ext1[n1] = u
                            n1 += 1
                    _mark(w1, 1, mark, adj_ptr, adj_idx)
                    for i1 in range(n1):
                        w2 = ext1[i1]
                        S[2] = w2
                        pos[w2] = 2
                        ok, c = _emit(3, S, pos, inc_ptr, inc_idx, mem_ptr, mem_idx, vlab, elab, rec)
                        conflicts[r] += c
                        if ok:
                            out, n_out = _push(out, n_out, rec, r)
                        if max_order >= 4:
                            n2 = 0
                            for t in range(i1 + 1, n1):
                                ext2[n2] = ext1[t]
                                n2 += 1
                            for t in range(adj_ptr[w2], adj_ptr[w2 + 1]):
                                u = adj_idx[t]
                                if mark[u] == 0 and pos[u] < 0:
                                    ext2[n2] = u
                                    n2 += 1
                            for i2 in range(n2):
                                w3 = ext2[i2]
                                S[3] = w3
                                pos[w3] = 3
                                ok, c = _emit(4, S, pos, inc_ptr, inc_idx, mem_ptr, mem_idx, vlab, elab, rec)
                                conflicts[r] += c
                                if ok:
                                    out, n_out = _push(out, n_out, rec, r)
                                pos[w3] = -1
                        pos[w2] = -1
                    _mark(w1, -1, mark, adj_ptr, adj_idx)
                pos[w1] = -1
            _mark(v, -1, mark, adj_ptr, adj_idx)
        pos[v] = -1
    return out[:n_out].copy(), conflicts


# -- paired random walks -------------------------------------------------------

# columns of the uniform draws consumed per step
DRAW_EDGE_U, DRAW_DEST_U, DRAW_EDGE_V, DRAW_DEST_V, DRAW_RESTART = 0, 1, 2, 3, 4
DRAW_WIDTH = 5


@njit(nogil=True)
def _walk_step(x, r_edge, r_dest, inc_ptr, inc_idx, mem_ptr, mem_idx, stay, prev):
    # ``prev`` >= 0 is the arriving hyperedge, skipped whenever x has another
    base = inc_ptr[x]
    deg = inc_ptr[x + 1] - base
    skip = -1
    if prev >= 0 and deg > 1:
        for q in range(base, inc_ptr[x + 1]):
            if inc_idx[q] == prev:
                skip = q - base
        if skip >= 0:
            deg -= 1
    k = int(r_edge * deg)
    if k >= deg:
        k = deg - 1
    if skip >= 0 and k >= skip:
        k += 1
    e = inc_idx[base + k]
    a = mem_ptr[e]
    choices = mem_ptr[e + 1] - a - (0 if stay else 1)
    k = int(r_dest * choices)
    if k >= choices:
        k = choices - 1
    for q in range(a, mem_ptr[e + 1]):
        y = mem_idx[q]
        if y == x and not stay:
            continue
        if k == 0:
            return e, y
        k -= 1
    return e, x  # unreachable for cardinality >= 2


@njit(nogil=True)
def paired_walk_score(inc_ptr, inc_idx, mem_ptr, mem_idx, vlab, elab, u, v, draws, restart_prob, cumulative,
                      stay=False, avoid_arrival=False):
    """Score simultaneous restarting walks from ``u`` and ``v``.

    ``draws`` holds one row of uniforms per step (see DRAW_* columns).
    Exact mode adds 1 per walk whose whole label sequence agrees; cumulative
    mode adds 1 per step where the hyperedge labels or the destination
    labels agree.  The walk cut off by the step budget is scored too.
    ``stay`` lets the destination equal the current vertex;
    ``avoid_arrival`` keeps a walk off the hyperedge it just used when the
    vertex has another one.
    """
    score = 0.0
    x = u
    y = v
    px = -1
    py = -1
    start_match = vlab[u] == vlab[v]
    match = start_match
    length = 0
    for t in range(draws.shape[0]):
        ex, nx = _walk_step(x, draws[t, DRAW_EDGE_U], draws[t, DRAW_DEST_U], inc_ptr, inc_idx, mem_ptr, mem_idx,
                            stay, px)
        ey, ny = _walk_step(y, draws[t, DRAW_EDGE_V], draws[t, DRAW_DEST_V], inc_ptr, inc_idx, mem_ptr, mem_idx,
                            stay, py)
        same_edge = elab[ex] == elab[ey]
        same_vertex = vlab[nx] == vlab[ny]
        if cumulative:
            if same_edge or same_vertex:
                score += 1.0
        else:
            match = match and same_edge and same_vertex
        length += 1
        x = nx
        y = ny
        if avoid_arrival:
            px = ex
            py = ey
        if draws[t, DRAW_RESTART] < restart_prob:
            if not cumulative and match:
                score += 1.0
            x = u
            y = v
            px = -1
            py = -1
            match = start_match
            length = 0
    if length > 0 and not cumulative and match:
        score += 1.0
    return score


# -- SMO for the soft-margin SVM dual -------------------------------------------


@njit(nogil=True)
def smo_solve(K, y, C, tol, max_iter):
    """Minimize 0.5 a'Qa - sum(a) s.t. y'a = 0, 0 <= a <= C, Q = yy' * K.

    Sequential pairwise optimization with second-order working-set
    selection.  Stops when the maximal KKT violation drops below ``tol``.
    Returns ``(alpha, grad, iterations, converged)``.
    """
    n = y.shape[0]
    alpha = np.zeros(n)
    G = -np.ones(n)
    diag = np.diag(K).copy()
    it = 0
    converged = False
    while it < max_iter:
        yG = -y * G
        up = ((alpha < C) & (y > 0)) | ((alpha > 0) & (y < 0))
        low = ((alpha < C) & (y < 0)) | ((alpha > 0) & (y > 0))
        score_up = np.where(up, yG, -np.inf)
        i = np.argmax(score_up)
        gmax = score_up[i]
        gmin = np.min(np.where(low, yG, np.inf))
        if gmax - gmin < tol:
            converged = True
            break
        b = gmax - yG
        a = diag[i] + diag - 2.0 * K[i]
        a = np.where(a > 0, a, 1e-12)
        obj = np.where(low & (yG < gmax), -(b * b) / a, np.inf)
        j = np.argmin(obj)

        ai_old = alpha[i]
        aj_old = alpha[j]
        Qij = y[i] * y[j] * K[i, j]
        if y[i] != y[j]:
            quad = diag[i] + diag[j] + 2.0 * Qij
            if quad <= 0:
                quad = 1e-12
            delta = (-G[i] - G[j]) / quad
            diff = ai_old - aj_old
            ai = ai_old + delta
            aj = aj_old + delta
            if diff > 0:
                if aj < 0:
                    aj = 0.0
                    ai = diff
            else:
                if ai < 0:
                    ai = 0.0
                    aj = -diff
            if diff > 0:
                if ai > C:
                    ai = C
                    aj = C - diff
            else:
                if aj > C:
                    aj = C
                    ai = C + diff
        else:
            quad = diag[i] + diag[j] - 2.0 * Qij
            if quad <= 0:
                quad = 1e-12
            delta = (G[i] - G[j]) / quad
            total = ai_old + aj_old
            ai = ai_old - delta
            aj = aj_old + delta
            if total > C:
                if ai > C:
                    ai = C
                    aj = total - C
            else:
                if aj < 0:
                    aj = 0.0
                    ai = total
            if total > C:
                if aj > C:
                    aj = C
                    ai = total - C
            else:
                if ai < 0:
                    ai = 0.0
                    aj = total
        alpha[i] = ai
        alpha[j] = aj
        dai = ai - ai_old
        daj = aj - aj_old
        G += y * (K[i] * (y[i] * dai) + K[j] * (y[j] * daj))
        it += 1
    return alpha, G, it, converged
