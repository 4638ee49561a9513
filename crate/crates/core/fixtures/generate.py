"""Regenerate the frozen phase tables from a direct evaluation of the
plaquette phase formula and a brute-force orbit solve.

Usage: python3 generate.py  (writes next to this file)
"""
import os

D = 4
OUT = os.path.dirname(os.path.abspath(__file__))


def V(r, k): return 2 * D * (r % D) + (k % (2 * D))
def Bot(r, c): return V(r, 2 * ((c + 1) % D))
def LL(r, c): return V(r, 2 * (c % D) + 1)
def Z(r, k): return 3 * D * (r % D) + (k % (2 * D))
def Vert(r, c): return 3 * D * (r % D) + 2 * D + (c % D)


def hexedges(r, c):
    return [Vert(r, c + 1), Z(r, 2 * ((c + 1) % D)), Z(r, 2 * (c % D) + 1),
            Vert(r, c), Z(r + 1, 2 * (c % D)), Z(r + 1, 2 * (c % D) + 1)]


ends = {}
for r in range(D):
    for k in range(2 * D):
        ends[Z(r, k)] = (V(r, k), V(r, k + 1))
    for c in range(D):
        ends[Vert(r, c)] = (LL(r, c), Bot(r + 1, c - 1))
inc = {v: [] for v in range(2 * D * D)}
for e, (a, b) in ends.items():
    inc[a].append(e)
    inc[b].append(e)


def support(r, c):
    h = hexedges(r, c)
    legs = []
    for k in range(6):
        e1, e2 = h[k], h[(k + 1) % 6]
        v = (set(ends[e1]) & set(ends[e2])).pop()
        legs.append([e for e in inc[v] if e not in (e1, e2)][0])
    return h + legs


def n_minus(j, i): return j[i - 1]
def n_plus(j, i): return 1 - j[i - 1]


def beta(j):
    n = lambda i: n_minus(j, i)
    m = lambda i: n_plus(j, i)
    g = (n(12) * (n(1) * n(6) - m(1) * m(6)) + n(7) * (m(1) * m(2) - n(1) * n(2))
         + m(8) * (n(2) * m(3) - m(2) * n(3)) + n(9) * (n(3) * n(4) - m(3) * m(4))
         + n(10) * (m(4) * m(5) - n(4) * n(5)) + m(11) * (n(5) * m(6) - m(5) * n(6)))
    return g % 4


def signs(j):
    g = 0
    for k in range(1, 7):
        prev = 6 if k == 1 else k - 1
        g += 2 * n_minus(j, prev) * n_plus(j, k)
    return g % 4


def bits(x, n): return [(x >> i) & 1 for i in range(n)]


BETA = [beta(bits(x, 12)) for x in range(4096)]
FULL = [(beta(bits(x, 12)) + signs(bits(x, 12))) % 4 for x in range(4096)]
PLAQS = [(r, c) for r in range(D) for c in range(D)]
SUP = {p: support(*p) for p in PLAQS}
HEX = {p: hexedges(*p) for p in PLAQS}


def bval(p, state):
    x = 0
    for i, e in enumerate(SUP[p]):
        if e in state:
            x |= 1 << i
    return FULL[x]


def solve(P):
    verts = set(v for e in P for v in ends[e])
    conn = sorted(set(e for v in verts for e in inc[v]))
    idx = {e: i for i, e in enumerate(conn)}
    n = len(conn)
    pm = sum(1 << idx[e] for e in P)
    gens = []
    for p in PLAQS:
        t = sum(1 << idx[e] for e in HEX[p] if e in idx)
        if t:
            gens.append((p, t))

    def st(j): return {conn[i] for i in range(n) if (j >> i) & 1}

    def delta(p, j):
        s = st(j)
        return (bval(p, s ^ set(P)) - bval(p, s)) % 4

    g = [None] * (1 << n)
    for j0 in range(1 << n):
        if g[j0] is not None:
            continue
        sym = {j0: (1, 0)}
        stack = [j0]
        cons = []
        while stack:
            j = stack.pop()
            s, c = sym[j]
            nb = [(j ^ pm, (-s, (-c) % 4))]
            for p, t in gens:
                nb.append((j ^ t, (s, (c + delta(p, j)) % 4)))
            for k, v in nb:
                if k in sym:
                    if sym[k] != v:
                        cons.append((sym[k], v))
                else:
                    sym[k] = v
                    stack.append(k)
        x = None
        for (s1, c1), (s2, c2) in cons:
            assert s1 != s2
            diff = (c2 - c1) % 4
            assert diff % 2 == 0
            xx = ((diff // 2) * s1) % 2
            assert x is None or x == xx
            x = xx
        x = x or 0
        for k, (s, c) in sym.items():
            g[k] = (s * x + c) % 4
    return conn, g


def write(name, header, values):
    with open(os.path.join(OUT, name), "w") as f:
        f.write("# " + header + "\n")
        for v in values:
            f.write("%d\n" % v)


write("beta_d4_p1.txt", "vertex phase product, plaquette 1, d=4; line k+2 is local state k", BETA)
write("bp_d4_p1.txt", "full plaquette phase, plaquette 1, d=4; line k+2 is local state k", FULL)
r, c = 1, 1
for name, e in [("A", Z(r, 2 * (c + 1))), ("B", Vert(r, c)), ("C", Z(r, 2 * c + 1))]:
    conn, g = solve([e])
    write("string_%s_d4.txt" % name,
          "single-edge string phase, edge %d, d=4; support %s" % (e + 1, " ".join(str(x + 1) for x in conn)),
          g)
