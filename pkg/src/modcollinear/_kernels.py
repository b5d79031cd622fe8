"""Compiled inner loops.

Bucket layout for permutations: ``buckets[k - 1, s]`` is the number of graph
points on the line y = k*x + s, for slopes k = 1..n-1.  For general point sets
``buckets[d, line]`` covers n + 1 directions: d = 0 is vertical (line = x) and
d = k + 1 is slope k (line = y - k*x).

Moving one point off a line holding V points changes the triple count by
-C(V-1, 2); moving one onto it changes it by +C(V, 2).  Only the C(., 2)
table is needed for deltas.
"""

import numpy as np
from numba import njit


def choose_table(n, r):
    """C(v, r) for v = 0..n as an int64 lookup table."""
    v = np.arange(n + 1, dtype=np.int64)
    if r == 2:
        return v * (v - 1) // 2
    if r == 3:
        return v * (v - 1) * (v - 2) // 6
    raise ValueError(r)


@njit(cache=True)
def perm_buckets(image, n):
    buckets = np.zeros((n - 1, n), dtype=np.int64)
    for k in range(1, n):
        for i in range(n):
            buckets[k - 1, (image[i] - k * i) % n] += 1
    total = 0
    for k in range(n - 1):
        for s in range(n):
            v = buckets[k, s]
            total += v * (v - 1) * (v - 2) // 6
    return buckets, total


@njit(cache=True)
def perm_psi(image, n, scratch, c2):
    """Triple count of one permutation graph using a length-n scratch buffer.

    Each point joining a line that already holds v points adds C(v, 2).
    """
    total = 0
    for k in range(1, n):
        scratch[:] = 0
        off = 0  # k*i mod n
        for i in range(n):
            r = image[i] - off
            if r < 0:
                r += n
            total += c2[scratch[r]]
            scratch[r] += 1
            off += k
            if off >= n:
                off -= n
    return total


@njit(cache=True)
def swap_delta(image, buckets, c2, i, j, n):
    """Swap image[i], image[j] in place; return the change in the triple count.

    Both points are removed before either is re-added so that lines shared
    by i and j are accounted for correctly.
    """
    vi = image[i]
    vj = image[j]
    delta = 0
    for k in range(1, n):
        row = k - 1
        r = (vi - k * i) % n
        buckets[row, r] -= 1
        delta -= c2[buckets[row, r]]
        r = (vj - k * j) % n
        buckets[row, r] -= 1
        delta -= c2[buckets[row, r]]
        r = (vj - k * i) % n
        delta += c2[buckets[row, r]]
        buckets[row, r] += 1
        r = (vi - k * j) % n
        delta += c2[buckets[row, r]]
        buckets[row, r] += 1
    image[i] = vj
    image[j] = vi
    return delta


@njit(cache=True)
def _lex_less(a, b):
    for t in range(a.shape[0]):
        if a[t] != b[t]:
            return a[t] < b[t]
    return False


@njit(cache=True)
def _max_row(buf, count):
    best = 0
    for r in range(1, count):
        if _lex_less(buf[best], buf[r]):
            best = r
    return best


@njit(cache=True)
def _keep_candidate(buf, count, worst, cand):
    """Insert ``cand`` into the buffer of lexicographically smallest rows.

    Returns the updated (count, worst) pair; ``worst`` indexes the largest row.
    """
    cap = buf.shape[0]
    if cap == 0:
        return count, worst
    if count < cap:
        buf[count, :] = cand
        count += 1
        if count == 1 or _lex_less(buf[worst], cand):
            worst = count - 1
        return count, worst
    if _lex_less(cand, buf[worst]):
        buf[worst, :] = cand
        worst = _max_row(buf, count)
    return count, worst


@njit(cache=True)
def sweep_permutations(image, start, n, keep):
    """Visit every arrangement of image[start:] in plain-changes order.

    Successive arrangements differ by one adjacent transposition, so each
    costs one ``swap_delta``.  Returns (visited, sum of triple counts,
    minimum, number of minimizers, buffer of lexicographically smallest
    minimizers, rows used).  ``image`` is left permuted.
    """
    c2 = np.zeros(n + 1, dtype=np.int64)
    for v in range(n + 1):
        c2[v] = v * (v - 1) // 2
    buckets, total = perm_buckets(image, n)

    m = n - start
    # Johnson-Trotter state over labels 0..m-1 placed at offsets 0..m-1
    label = np.arange(m)
    where = np.arange(m)
    direction = -np.ones(m, dtype=np.int64)

    buf = np.zeros((keep, n), dtype=np.int64)
    count = 0
    worst = 0
    best = total
    n_best = 0
    acc = 0
    visited = 0
    while True:
        visited += 1
        acc += total
        if total < best:
            best = total
            n_best = 0
            count = 0
            worst = 0
        if total == best:
            n_best += 1
            count, worst = _keep_candidate(buf, count, worst, image)

        # largest mobile label
        mobile = -1
        for e in range(m - 1, -1, -1):
            pos = where[e]
            nxt = pos + direction[e]
            if 0 <= nxt < m and label[nxt] < e:
                mobile = e
                break
        if mobile < 0:
            break
        pos = where[mobile]
        nxt = pos + direction[mobile]
        other = label[nxt]
        label[pos] = other
        label[nxt] = mobile
        where[other] = pos
        where[mobile] = nxt
        for e in range(mobile + 1, m):
            direction[e] = -direction[e]
        total += swap_delta(image, buckets, c2, start + pos, start + nxt, n)
    return visited, acc, best, n_best, buf, count


@njit(cache=True)
def anneal_restart(image, n, pos_i, pos_j, u, temps):
    """One Metropolis run over transposition moves.

    ``pos_i``, ``pos_j``, ``u`` and ``temps`` are pre-drawn per step so the
    run is a pure function of its inputs.  Returns (best total, best image,
    final total, accepted moves).
    """
    c2 = np.zeros(n + 1, dtype=np.int64)
    for v in range(n + 1):
        c2[v] = v * (v - 1) // 2
    buckets, total = perm_buckets(image, n)
    best = total
    best_image = image.copy()
    accepted = 0
    for step in range(pos_i.shape[0]):
        i = pos_i[step]
        j = pos_j[step]
        delta = swap_delta(image, buckets, c2, i, j, n)
        if delta <= 0 or u[step] < np.exp(-delta / temps[step]):
            total += delta
            accepted += 1
            if total < best:
                best = total
                best_image[:] = image
                if best == 0:
                    break
        else:
            swap_delta(image, buckets, c2, i, j, n)
    return best, best_image, total, accepted


@njit(cache=True)
def revolving_door_next(c, t):
    """Advance a revolving-door combination in place.

    ``c[1..t]`` holds the current t-combination (increasing) and ``c[t+1]``
    the ground-set size.  Returns (removed, added) elements, or (-1, -1)
    after the last combination.
    """
    if t % 2 == 1:
        if c[1] + 1 < c[2]:
            c[1] += 1
            return c[1] - 1, c[1]
        j = 2
        go_increase = False
    else:
        if c[1] > 0:
            c[1] -= 1
            return c[1] + 1, c[1]
        j = 2
        go_increase = True
    while True:
        if j > t:
            return -1, -1
        if not go_increase:
            # c[j] == c[j-1] + 1 here
            if c[j] >= j:
                removed = c[j]
                c[j] = c[j - 1]
                c[j - 1] = j - 2
                return removed, j - 2
            j += 1
            if j > t:
                return -1, -1
        # c[j-1] == j - 2 here
        if c[j] + 1 < c[j + 1]:
            removed = c[j - 1]
            c[j - 1] = c[j]
            c[j] += 1
            return removed, c[j]
        j += 1
        go_increase = False


@njit(cache=True)
def _point_delta_add(buckets, line_of, c2, p):
    delta = 0
    for d in range(buckets.shape[0]):
        r = line_of[p, d]
        delta += c2[buckets[d, r]]
        buckets[d, r] += 1
    return delta


@njit(cache=True)
def _point_delta_remove(buckets, line_of, c2, p):
    delta = 0
    for d in range(buckets.shape[0]):
        r = line_of[p, d]
        buckets[d, r] -= 1
        delta -= c2[buckets[d, r]]
    return delta


@njit(cache=True)
def line_table(n):
    line_of = np.zeros((n * n, n + 1), dtype=np.int64)
    for p in range(n * n):
        x = p // n
        y = p % n
        line_of[p, 0] = x
        for k in range(n):
            line_of[p, k + 1] = (y - k * x) % n
    return line_of


@njit(cache=True)
def survey_smallest(n, size, s):
    """All subsets of the n*n points of the given size whose smallest point is s.

    Points are indexed p = x*n + y.  Returns (visited, minimum, sorted witness
    indices of the lexicographically least minimizer, zero-count).
    """
    npts = n * n
    c2 = np.zeros(n + 1, dtype=np.int64)
    for v in range(n + 1):
        c2[v] = v * (v - 1) // 2
    line_of = line_table(n)
    buckets = np.zeros((n + 1, n), dtype=np.int64)
    witness = np.full(size, -1, dtype=np.int64)

    t = size - 1
    ground = npts - s - 1
    if size < 1 or t > ground:
        return 0, -1, witness, 0
    base = s + 1
    total = _point_delta_add(buckets, line_of, c2, s)
    c = np.zeros(t + 2, dtype=np.int64)
    for j in range(1, t + 1):
        c[j] = j - 1
        total += _point_delta_add(buckets, line_of, c2, base + c[j])
    c[t + 1] = ground

    cur = np.zeros(size, dtype=np.int64)
    best = -1
    zeros = 0
    visited = 0
    while True:
        visited += 1
        if total == 0:
            zeros += 1
        if best < 0 or total <= best:
            cur[0] = s
            for j in range(1, t + 1):
                cur[j] = base + c[j]
            if best < 0 or total < best or _lex_less(cur, witness):
                best = total
                witness[:] = cur
        if t == 0:
            break
        removed, added = revolving_door_next(c, t)
        if removed < 0:
            break
        total += _point_delta_remove(buckets, line_of, c2, base + removed)
        total += _point_delta_add(buckets, line_of, c2, base + added)
    return visited, best, witness, zeros


@njit(cache=True)
def batch_psi(images, n):
    """Triple count for each row of a 2-D array of permutation images."""
    out = np.zeros(images.shape[0], dtype=np.int64)
    scratch = np.zeros(n, dtype=np.int64)
    c2 = np.zeros(n + 1, dtype=np.int64)
    for v in range(n + 1):
        c2[v] = v * (v - 1) // 2
    for r in range(images.shape[0]):
        out[r] = perm_psi(images[r], n, scratch, c2)
    return out
