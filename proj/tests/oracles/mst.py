"""Minimum spanning tree weights of edge-list files via networkx.

Usage: mst.py FILE...  prints `FILE total_weight edge_count` per file.
Files use the CLI format: a `n m` header, then `u v w` lines.
"""
import sys

import networkx as nx


def load(path):
    with open(path) as f:
        n, _ = map(int, f.readline().split())
        g = nx.Graph()
        g.add_nodes_from(range(1, n + 1))
        for line in f:
            parts = line.split()
            if len(parts) == 3:
                u, v, w = map(int, parts)
                g.add_edge(u, v, weight=w)
    return g


def main():
    for path in sys.argv[1:]:
        t = nx.minimum_spanning_tree(load(path), algorithm="kruskal")
        print(path, int(t.size(weight="weight")), t.number_of_edges())


if __name__ == "__main__":
    main()
