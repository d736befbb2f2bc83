"""Success rate of the randomized automorphism cover on G_{n,d}, per sphere weight.

For each weight w the base is the weight-w sphere, gamma = ceil(log2(|E|/K))
and m = ceil(2^gamma ln|E|) unless --m-scale rescales it. Prints one row per
weight with the achieved profile triple of the first complete cover.
"""

import argparse
import math
import time

from cominfo.covering import HypercubeSampler, random_cover, verify_witness
from cominfo.fixed_distance import FixedDistanceSpec, build_fixed_graph, sphere_rectangle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--d", type=int, default=4)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--m-scale", type=float, default=1.0, help="multiply the default number of images")
    args = ap.parse_args()

    spec = FixedDistanceSpec(args.n, args.d)
    g = build_fixed_graph(spec)
    sampler = HypercubeSampler(spec.n)
    print(f"G_{{{spec.n},{spec.d}}}: |E| = {g.num_edges}")
    print("w   K        gamma  m      success  triple       secs")
    for w in range(args.d // 2, spec.n - args.d // 2 + 1):
        base = sphere_rectangle(spec, w, brute=False)
        if base.count == 0:
            continue
        gamma = math.ceil(math.log2(g.num_edges / base.count))
        m = max(1, round(args.m_scale * 2**gamma * math.log(g.num_edges)))
        t0 = time.perf_counter()
        ok, triple = 0, None
        for s in range(args.seeds):
            c = random_cover(g, sampler, base.rectangle, m, s, gamma)
            if c.is_complete():
                ok += 1
                triple = triple or tuple(verify_witness(g, c))
        print(f"{w:<3} {base.count:<8} {gamma:<6} {m:<6} {ok:>3}/{args.seeds:<4} {str(triple):<12} {time.perf_counter() - t0:.1f}")


if __name__ == "__main__":
    main()
