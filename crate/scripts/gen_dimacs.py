#!/usr/bin/env python3
"""Rebuild three deterministic DIMACS clique benchmark instances.

The original archive is not always reachable, but these three families are
fully determined by their generator definitions (up to vertex relabelling,
which does not affect any k-plex count):

  johnson8-4-4  weight-4 binary vectors of length 8, adjacent when their
                Hamming distance is at least 4.
  MANN_a9       clique formulation of the Steiner triple covering problem
                on STS(9): the complement graph has one triangle per triple
                (one vertex per triple/point incidence), each incidence
                vertex joined to a vertex for its point.
  c-fat200-5    200 vertices in a ring of 7 clusters of sizes
                29,29,29,29,28,28,28; clusters are cliques and consecutive
                clusters are completely joined.

p_hat300-1 is a seeded random instance and cannot be rebuilt this way.

Usage: gen_dimacs.py <output-dir>
"""
import itertools
import sys
from pathlib import Path


def johnson(n=8, w=4, d=4):
    verts = [c for c in itertools.combinations(range(n), w)]
    edges = []
    for i, a in enumerate(verts):
        for j in range(i + 1, len(verts)):
            b = verts[j]
            hamming = 2 * (w - len(set(a) & set(b)))
            if hamming >= d:
                edges.append((i, j))
    return len(verts), edges


def mann_a9():
    points = [(x, y) for x in range(3) for y in range(3)]
    pid = {p: i for i, p in enumerate(points)}
    lines = set()
    for p, q in itertools.combinations(points, 2):
        r = ((-p[0] - q[0]) % 3, (-p[1] - q[1]) % 3)
        lines.add(tuple(sorted((pid[p], pid[q], pid[r]))))
    lines = sorted(lines)
    assert len(lines) == 12
    verts = []
    for t, line in enumerate(lines):
        for p in line:
            verts.append(("inc", t, p))
    for p in range(9):
        verts.append(("pt", p))
    n = len(verts)
    comp = set()
    for a in range(n):
        for b in range(a + 1, n):
            va, vb = verts[a], verts[b]
            if va[0] == "inc" and vb[0] == "inc" and va[1] == vb[1]:
                comp.add((a, b))
            elif va[0] == "inc" and vb[0] == "pt" and va[2] == vb[1]:
                comp.add((a, b))
            elif vb[0] == "inc" and va[0] == "pt" and vb[2] == va[1]:
                comp.add((a, b))
    edges = [(a, b) for a in range(n) for b in range(a + 1, n) if (a, b) not in comp]
    return n, edges


def c_fat(sizes):
    cluster = []
    for c, s in enumerate(sizes):
        cluster.extend([c] * s)
    n, p = len(cluster), len(sizes)
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            diff = (cluster[b] - cluster[a]) % p
            if diff in (0, 1, p - 1):
                edges.append((a, b))
    return n, edges


def write(path, name, n, edges, note):
    with open(path, "w") as f:
        f.write(f"c {name}\n")
        f.write(f"c {note}\n")
        f.write(f"p edge {n} {len(edges)}\n")
        for a, b in edges:
            f.write(f"e {a + 1} {b + 1}\n")
    print(f"{name}: n={n} m={len(edges)} 2m={2 * len(edges)}")


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
    out.mkdir(parents=True, exist_ok=True)
    write(out / "johnson8-4-4.clq", "johnson8-4-4", *johnson(),
          "rebuilt from definition: weight-4 vectors of length 8, Hamming distance >= 4")
    write(out / "MANN_a9.clq", "MANN_a9", *mann_a9(),
          "rebuilt from definition: Steiner triple covering clique formulation on STS(9)")
    write(out / "c-fat200-5.clq", "c-fat200-5", *c_fat([29, 29, 29, 29, 28, 28, 28]),
          "rebuilt from definition: ring of 7 clusters, sizes 29x4 and 28x3")


if __name__ == "__main__":
    main()
