"""Hypomagnetic field effect over the (k, r) plane for one proton.

Writes effect_map_<born><channel>.csv on the default 61 x 61 log grid in
[1e3, 1e9] 1/s.
"""
import numpy as np

from _common import parser, write
from radpair import RadicalPairSpec
from radpair.sweep import default_rate_grid, effect_map, records_to_csv, sweep_kr


def main():
    p = parser(__doc__.splitlines()[0])
    p.add_argument("--born", choices=["S", "T"], default="S")
    p.add_argument("--channel", choices=["S", "T"], default="S")
    args = p.parse_args()
    k, r = default_rate_grid("k_per_s"), default_rate_grid("r_per_s")
    recs = sweep_kr(RadicalPairSpec.from_couplings([args.a]), k, r, args.born, args.channel)
    m = effect_map(recs, (len(k), len(r)))
    i, j = np.unravel_index(np.nanargmax(m), m.shape)
    print(f"max {m[i, j]:.2f}% at k={k.values[i]:.3g}, r={r.values[j]:.3g}; "
          f"{np.mean(m > 10):.1%} of cells above 10%")
    write(args.out, f"effect_map_{args.born}{args.channel}.csv", records_to_csv(recs))


if __name__ == "__main__":
    main()
