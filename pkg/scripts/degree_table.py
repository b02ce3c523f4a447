"""Print deg(a) by Hermite enumeration next to the BFS index for det(a) = 1..N."""

import sys

from heckelab.hecke import degree, diag, index_via_bfs

n_max = int(sys.argv[1]) if len(sys.argv) > 1 else 50
bad = 0
print("n,degree,bfs")
for n in range(1, n_max + 1):
    a = diag(1, n)
    d, b = degree(a), index_via_bfs(a)
    bad += d != b
    print(f"{n},{d},{b}")
sys.exit(1 if bad else 0)
