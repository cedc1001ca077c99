"""Effect maps for two protons with equal vs opposite hyperfine signs.

Writes sign_pp.csv and sign_pm.csv and prints the Jaccard overlap of the
regions where the effect exceeds 10%.
"""
import numpy as np

from _common import parser, write
from radpair import RadicalPairSpec
from radpair.sweep import default_rate_grid, effect_map, records_to_csv, sweep_kr


def main():
    p = parser(__doc__.splitlines()[0])
    p.set_defaults(a=500.0)
    args = p.parse_args()
    k, r = default_rate_grid("k_per_s"), default_rate_grid("r_per_s")
    regions = []
    for tag, signs in (("pp", (1, 1)), ("pm", (1, -1))):
        spec = RadicalPairSpec.from_couplings([s * args.a for s in signs])
        recs = sweep_kr(spec, k, r)
        m = effect_map(recs, (len(k), len(r)))
        regions.append(m > 10)
        print(f"{tag}: max {np.nanmax(m):.2f}%")
        write(args.out, f"sign_{tag}.csv", records_to_csv(recs))
    inter, union = np.sum(regions[0] & regions[1]), np.sum(regions[0] | regions[1])
    print(f"Jaccard overlap of >10% regions: {inter / union if union else 1.0:.3f}")


if __name__ == "__main__":
    main()
