"""Inner loops of the exhaustive searches.

Every kernel comes in two flavours: an explicit-loop version that numba
compiles, and a numpy (or plain Python) version used when numba is missing
or ``CROSSHOM_BACKEND=numpy`` is set.  The module-level names bind to the
selected backend; ``LOOP`` and ``NUMPY`` expose both for benchmarks and
equivalence tests.

All kernels assume element 0 is the identity of every table they receive.
"""
from __future__ import annotations

from types import SimpleNamespace

import numpy as np

from ._backend import BACKEND, jit

# ---------------------------------------------------------------------------
# associativity


def _assoc_rows_loop(table, rows):
    n = table.shape[0]
    out = np.full(3, -1, np.int64)
    for r in range(rows.shape[0]):
        i = rows[r]
        for j in range(n):
            ij = table[i, j]
            for k in range(n):
                if table[ij, k] != table[i, table[j, k]]:
                    out[0] = i
                    out[1] = j
                    out[2] = k
                    return out
    return out


def _assoc_rows_np(table, rows):
    for i in rows:
        left = table[table[i]]
        right = table[i][table]
        bad = np.argwhere(left != right)
        if bad.size:
            j, k = bad[0]
            return np.array([i, j, k], dtype=np.int64)
    return np.full(3, -1, np.int64)


# ---------------------------------------------------------------------------
# element orders


def _element_orders_loop(table):
    n = table.shape[0]
    orders = np.zeros(n, np.int64)
    for x in range(n):
        y = x
        k = 1
        while y != 0 and k <= n:
            y = table[y, x]
            k += 1
        orders[x] = k if k <= n else 0
    return orders


def _element_orders_np(table):
    n = table.shape[0]
    idx = np.arange(n)
    cur = idx.copy()
    orders = np.zeros(n, np.int64)
    done = cur == 0
    orders[done] = 1
    k = 1
    while not done.all() and k < n:
        k += 1
        cur = table[cur, idx]
        newly = (cur == 0) & ~done
        orders[newly] = k
        done |= newly
    return orders


# ---------------------------------------------------------------------------
# subgroup generated by a set


def _generated_loop(table, gens):
    n = table.shape[0]
    mask = np.zeros(n, np.bool_)
    queue = np.empty(n, np.int64)
    mask[0] = True
    queue[0] = 0
    head = 0
    tail = 1
    while head < tail:
        x = queue[head]
        head += 1
        for t in range(gens.shape[0]):
            y = table[x, gens[t]]
            if not mask[y]:
                mask[y] = True
                queue[tail] = y
                tail += 1
    return mask


def _generated_np(table, gens):
    n = table.shape[0]
    mask = np.zeros(n, bool)
    mask[0] = True
    frontier = np.zeros(1, np.int64)
    gens = np.asarray(gens, np.int64)
    if gens.size == 0:
        return mask
    while frontier.size:
        nxt = np.unique(table[np.ix_(frontier, gens)])
        nxt = nxt[~mask[nxt]]
        mask[nxt] = True
        frontier = nxt
    return mask


# ---------------------------------------------------------------------------
# homomorphism extension over the Cayley graph


def _extend_loop(ftable, gtable, gens, imgs, k, img, queue):
    # BFS over the subgroup generated by gens[:k]; -1 on an inconsistent edge
    img[:] = -1
    img[0] = 0
    queue[0] = 0
    head = 0
    tail = 1
    while head < tail:
        f = queue[head]
        head += 1
        v = img[f]
        for j in range(k):
            f2 = ftable[f, gens[j]]
            w = gtable[v, imgs[j]]
            if img[f2] < 0:
                img[f2] = w
                queue[tail] = f2
                tail += 1
            elif img[f2] != w:
                return -1
    return tail


def _hom_search_loop(ftable, gtable, gens, cand, ncand, budget):
    nf = ftable.shape[0]
    k = gens.shape[0]
    cap = 64
    out = np.empty((cap, nf), np.int32)
    nout = 0
    evals = 0
    if k == 0:
        out[0, :] = 0
        return out[:1], evals
    choice = np.full(k, -1, np.int64)
    imgs = np.zeros(k, np.int64)
    img = np.empty(nf, np.int64)
    queue = np.empty(nf, np.int64)
    d = 0
    while d >= 0:
        choice[d] += 1
        if choice[d] >= ncand[d]:
            choice[d] = -1
            d -= 1
            continue
        evals += 1
        if evals > budget:
            return out[:nout], evals
        imgs[d] = cand[d, choice[d]]
        if _extend_jit(ftable, gtable, gens, imgs, d + 1, img, queue) < 0:
            continue
        if d + 1 == k:
            if nout == cap:
                cap *= 2
                grown = np.empty((cap, nf), np.int32)
                grown[:nout] = out[:nout]
                out = grown
            for t in range(nf):
                out[nout, t] = img[t]
            nout += 1
        else:
            d += 1
    return out[:nout], evals


def _extend_np(ftable, gtable, gens, imgs):
    n = ftable.shape[0]
    img = np.full(n, -1, np.int64)
    img[0] = 0
    frontier = np.zeros(1, np.int64)
    while frontier.size:
        src = ftable[np.ix_(frontier, gens)].ravel()
        val = gtable[np.ix_(img[frontier], imgs)].ravel()
        known = img[src] >= 0
        if np.any(img[src[known]] != val[known]):
            return None
        src, val = src[~known], val[~known]
        if not src.size:
            break
        order = np.argsort(src, kind="stable")
        src, val = src[order], val[order]
        first = np.ones(src.size, bool)
        first[1:] = src[1:] != src[:-1]
        group = np.cumsum(first) - 1
        if np.any(val != val[first][group]):
            return None
        img[src[first]] = val[first]
        frontier = src[first]
    return img


def _hom_search_np(ftable, gtable, gens, cand, ncand, budget):
    nf = ftable.shape[0]
    k = len(gens)
    if k == 0:
        return np.zeros((1, nf), np.int32), 0
    found = []
    evals = 0
    gens = np.asarray(gens, np.int64)
    imgs = np.zeros(k, np.int64)

    def descend(d):
        nonlocal evals
        for c in range(ncand[d]):
            evals += 1
            if evals > budget:
                return False
            imgs[d] = cand[d, c]
            img = _extend_np(ftable, gtable, gens[: d + 1], imgs[: d + 1])
            if img is None:
                continue
            if d + 1 == k:
                found.append(img.astype(np.int32))
            elif not descend(d + 1):
                return False
        return True

    descend(0)
    out = np.array(found, np.int32).reshape(len(found), nf)
    return out, evals


# ---------------------------------------------------------------------------
# generator-image search against relators (finitely presented sources)


def _eval_word_loop(gtable, ginv, word, length, imgs):
    x = 0
    for t in range(length):
        s = word[t]
        if s > 0:
            x = gtable[x, imgs[s - 1]]
        else:
            x = gtable[x, ginv[imgs[-s - 1]]]
    return x


def _relator_search_loop(gtable, ginv, rel, rellen, relmax, cand, ncand, budget):
    k = cand.shape[0]
    cap = 64
    out = np.empty((cap, max(k, 1)), np.int32)
    nout = 0
    evals = 0
    if k == 0:
        return out[:1, :0], evals
    choice = np.full(k, -1, np.int64)
    imgs = np.zeros(k, np.int64)
    d = 0
    while d >= 0:
        choice[d] += 1
        if choice[d] >= ncand[d]:
            choice[d] = -1
            d -= 1
            continue
        evals += 1
        if evals > budget:
            return out[:nout], evals
        imgs[d] = cand[d, choice[d]]
        ok = True
        for r in range(rel.shape[0]):
            if relmax[r] == d:
                if _eval_word_jit(gtable, ginv, rel[r], rellen[r], imgs) != 0:
                    ok = False
                    break
        if not ok:
            continue
        if d + 1 == k:
            if nout == cap:
                cap *= 2
                grown = np.empty((cap, k), np.int32)
                grown[:nout] = out[:nout]
                out = grown
            for t in range(k):
                out[nout, t] = imgs[t]
            nout += 1
        else:
            d += 1
    return out[:nout], evals


def _relator_search_py(gtable, ginv, rel, rellen, relmax, cand, ncand, budget):
    k = cand.shape[0]
    if k == 0:
        return np.zeros((1, 0), np.int32), 0
    by_level = [[(rel[r], rellen[r]) for r in range(rel.shape[0]) if relmax[r] == d]
                for d in range(k)]
    found = []
    evals = 0
    imgs = [0] * k

    def value(word, length):
        x = 0
        for s in word[:length]:
            x = gtable[x, imgs[s - 1]] if s > 0 else gtable[x, ginv[imgs[-s - 1]]]
        return x

    def descend(d):
        nonlocal evals
        for c in range(ncand[d]):
            evals += 1
            if evals > budget:
                return False
            imgs[d] = int(cand[d, c])
            if any(value(w, n) != 0 for w, n in by_level[d]):
                continue
            if d + 1 == k:
                found.append(list(imgs))
            elif not descend(d + 1):
                return False
        return True

    descend(0)
    return np.array(found, np.int32).reshape(len(found), k), evals


# ---------------------------------------------------------------------------
# backend binding

# the search loops call these by global name, so numba sees compiled helpers
_extend_jit = jit(_extend_loop)
_eval_word_jit = jit(_eval_word_loop)

LOOP = SimpleNamespace(
    assoc_violation=jit(_assoc_rows_loop),
    element_orders=jit(_element_orders_loop),
    generated_mask=jit(_generated_loop),
    hom_search=jit(_hom_search_loop),
    relator_search=jit(_relator_search_loop),
)

NUMPY = SimpleNamespace(
    assoc_violation=_assoc_rows_np,
    element_orders=_element_orders_np,
    generated_mask=_generated_np,
    hom_search=_hom_search_np,
    relator_search=_relator_search_py,
)

_active = LOOP if BACKEND == "numba" else NUMPY


def assoc_violation(table: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """First (i, j, k) with (ij)k != i(jk) for i in ``rows``, else [-1, -1, -1]."""
    return _active.assoc_violation(table, np.asarray(rows, np.int64))


def element_orders(table: np.ndarray) -> np.ndarray:
    return _active.element_orders(table)


def generated_mask(table: np.ndarray, gens) -> np.ndarray:
    """Boolean membership mask of the subgroup generated by ``gens``."""
    return _active.generated_mask(table, np.asarray(gens, np.int64))


def hom_search(ftable, gtable, gens, cand, ncand, budget):
    """Backtrack over generator images; returns (image rows, evaluations)."""
    return _active.hom_search(
        ftable, gtable, np.asarray(gens, np.int64), cand, ncand, budget
    )


def relator_search(gtable, ginv, rel, rellen, relmax, cand, ncand, budget):
    return _active.relator_search(gtable, ginv, rel, rellen, relmax, cand, ncand, budget)
