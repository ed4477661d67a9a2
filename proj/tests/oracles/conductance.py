"""Brute-force conductance and weak conductance on small graphs.

Graphs are rebuilt from their definitions, independently of the C++
generators. Prints one `name value` line per case; values are exact
fractions.
"""
from fractions import Fraction
from itertools import combinations

import networkx as nx


def conductance(g):
    nodes = list(g.nodes)
    best = None
    for k in range(1, len(nodes)):
        for s in combinations(nodes, k):
            s = set(s)
            cut = sum(1 for u, v in g.edges if (u in s) != (v in s))
            vol_s = sum(d for v, d in g.degree if v in s)
            vol_t = sum(d for v, d in g.degree if v not in s)
            den = min(vol_s, vol_t)
            if den == 0:
                continue
            phi = Fraction(cut, den)
            best = phi if best is None or phi < best else best
    return best


def induced_conductance(g, nodes):
    h = g.subgraph(nodes)
    if len(nodes) == 1:
        return Fraction(1)
    if not nx.is_connected(h):
        return Fraction(0)
    return conductance(h)


def weak_conductance(g, c):
    n = g.number_of_nodes()
    need = max(1, -(-n // c))
    worst = None
    for v in g.nodes:
        best = Fraction(0)
        others = [u for u in g.nodes if u != v]
        for k in range(need - 1, n):
            for rest in combinations(others, k):
                best = max(best, induced_conductance(g, (v,) + rest))
        worst = best if worst is None or best < worst else worst
    return worst


def dumbbell(n):
    k = n // 2
    g = nx.disjoint_union(nx.complete_graph(k), nx.complete_graph(n - k))
    g.add_edge(k - 1, k)
    return g


def c_barbell(n, c):
    k = n // c
    g = nx.empty_graph(0)
    for i in range(c):
        g = nx.disjoint_union(g, nx.complete_graph(k))
        if i:
            g.add_edge(i * k - 1, i * k)
    return g


def main():
    cases = [
        ("conductance complete2", conductance(nx.complete_graph(2))),
        ("conductance complete4", conductance(nx.complete_graph(4))),
        ("conductance dumbbell6", conductance(dumbbell(6))),
        ("weak complete4 c1", weak_conductance(nx.complete_graph(4), 1)),
        ("weak dumbbell8 c2", weak_conductance(dumbbell(8), 2)),
        ("weak c_barbell9 c3", weak_conductance(c_barbell(9, 3), 3)),
        ("edges c_barbell12 c3", Fraction(c_barbell(12, 3).number_of_edges())),
        ("edges dumbbell6", Fraction(dumbbell(6).number_of_edges())),
        ("diameter dumbbell64", Fraction(nx.diameter(dumbbell(64)))),
    ]
    for name, val in cases:
        print(f"{name} {val}")


if __name__ == "__main__":
    main()
