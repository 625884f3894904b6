"""Pure-Python versions of the hot kernels (same contracts as ``_ckernels``).

Elements are indexed ``0..n-1`` along a linear extension of the order, so a
componentwise-smaller argument tuple always has a smaller row-major index.
Tables are flat, row-major, of length ``n ** arity``.
"""


def _lower_neighbours(leq, n, arity):
    size = n**arity
    strides = [n ** (arity - 1 - k) for k in range(arity)]
    out = []
    for p in range(size):
        digits = [(p // s) % n for s in strides]
        lows = []
        for k in range(arity):
            d = digits[k]
            for e in range(d):
                if leq[e][d]:
                    lows.append(p + (e - d) * strides[k])
        out.append(lows)
    return out


def is_monotone(leq, table, n, arity):
    leq = [list(r) for r in leq]
    table = list(table)
    for p, lows in enumerate(_lower_neighbours(leq, n, arity)):
        c = table[p]
        for q in lows:
            if not leq[table[q]][c]:
                return False
    return True


def monotone_tables(leq, n, arity):
    """Every monotone operation table, in lexicographic order."""
    leq = [list(r) for r in leq]
    lows = _lower_neighbours(leq, n, arity)
    size = n**arity
    table = [0] * size
    out = []

    def fill(p):
        if p == size:
            out.append(tuple(table))
            return
        for c in range(n):
            for q in lows[p]:
                if not leq[table[q]][c]:
                    break
            else:
                table[p] = c
                fill(p + 1)

    fill(0)
    return out


def table_kleene(kind, consts, arity, offset, children, tables, leq, n, bottom, budget):
    """Ascending iteration of a flattened system over finite tables.

    Returns ``(values, iterations, status)`` with status 0 = converged,
    1 = budget exhausted, 2 = iterates failed to form a chain.
    """
    kind = list(kind)
    consts = list(consts)
    arity = list(arity)
    offset = list(offset)
    children = [list(r) for r in children]
    tables = list(tables)
    leq = [list(r) for r in leq]
    m = len(kind)
    old = [bottom] * m
    for it in range(1, budget + 1):
        new = old[:]
        for i in range(m):
            k = kind[i]
            if k == 0:
                v = bottom
            elif k == 1:
                v = consts[i]
            else:
                idx = 0
                ch = children[i]
                for j in range(arity[i]):
                    idx = idx * n + old[ch[j]]
                v = tables[offset[i] + idx]
            new[i] = v
        changed = False
        for i in range(m):
            if new[i] != old[i]:
                if not leq[old[i]][new[i]]:
                    return new, it, 2
                changed = True
        if not changed:
            return new, it, 0
        old = new
    return old, budget, 1


def capped_kleene(kind, consts, left, right, cap, budget):
    """Ascending iteration of a flattened system over naturals clamped at ``cap``.

    Node kinds: 0 bottom (0), 1 constant, 2 plus, 3 times, 4 zero, 5 one.
    Returns ``(values, iterations, status)`` as for :func:`table_kleene`.
    """
    kind, consts, left, right = list(kind), list(consts), list(left), list(right)
    m = len(kind)
    old = [0] * m
    for it in range(1, budget + 1):
        new = [0] * m
        for i in range(m):
            k = kind[i]
            if k == 1:
                v = consts[i]
            elif k == 2:
                v = old[left[i]] + old[right[i]]
            elif k == 3:
                v = old[left[i]] * old[right[i]]
            elif k == 5:
                v = 1
            else:
                v = 0
            new[i] = v if v <= cap else cap
        changed = False
        for i in range(m):
            if new[i] != old[i]:
                if new[i] < old[i]:
                    return new, it, 2
                changed = True
        if not changed:
            return new, it, 0
        old = new
    return old, budget, 1
