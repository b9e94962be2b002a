#!/usr/bin/env python3
"""Write the connected non-isomorphic 8-vertex graphs as edge-list files.

The full set (11117 graphs) comes from nauty's geng:

    geng -c 8 > connected8.g6
    scripts/connected8.py connected8.g6 graphs8/

Pass --sample K to keep a random subset of K graphs (seeded), e.g. for a
quick sweep:

    scripts/connected8.py connected8.g6 graphs8/ --sample 100 --seed 1
    maqaoa sweep --graphs graphs8 --backend statevector \
        --ansatz qaoa:1@50,qaoa:2@100,qaoa:3@1000,ma@100 --out out8

Without geng, --random K draws K connected G(8, 1/2) graphs instead (these
are not distinct up to isomorphism; the `gnp-connected` generator of the
maqaoa tool gives the same distribution).

Needs networkx.
"""

import argparse
import random
import sys
from pathlib import Path

import networkx as nx


def read_graph6(path):
    graphs = []
    with open(path, "rb") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith(b">>"):
                continue
            graphs.append(nx.from_graph6_bytes(line))
    return graphs


def random_connected(count, rng):
    out = []
    while len(out) < count:
        g = nx.gnp_random_graph(8, 0.5, seed=rng.randrange(2**32))
        if nx.is_connected(g):
            out.append(g)
    return out


def write_edge_list(g, path):
    lines = [f"# n={g.number_of_nodes()}"]
    lines += [f"{min(u, v)} {max(u, v)}" for u, v in sorted(g.edges())]
    path.write_text("\n".join(lines) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("graph6", nargs="?", help="geng output (graph6, one graph per line)")
    ap.add_argument("out", help="output directory")
    ap.add_argument("--sample", type=int, help="keep a random subset of this size")
    ap.add_argument("--random", type=int, help="draw this many connected G(8, 1/2) graphs instead")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    if args.random:
        graphs = random_connected(args.random, rng)
    elif args.graph6:
        graphs = read_graph6(args.graph6)
        if any(not nx.is_connected(g) or g.number_of_nodes() != 8 for g in graphs):
            sys.exit("input contains graphs that are not connected on 8 vertices")
    else:
        sys.exit("give a graph6 file from `geng -c 8` or --random K")

    if args.sample is not None and args.sample < len(graphs):
        keep = sorted(rng.sample(range(len(graphs)), args.sample))
        graphs = [graphs[i] for i in keep]

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    width = max(5, len(str(len(graphs))))
    for i, g in enumerate(graphs):
        write_edge_list(g, out / f"g8-{i:0{width}d}.txt")
    print(f"wrote {len(graphs)} graphs to {out}")


if __name__ == "__main__":
    main()
