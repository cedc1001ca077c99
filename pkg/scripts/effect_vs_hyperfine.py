"""Hypomagnetic field effect (1 vs 50 uT) against the hyperfine constant.

Writes effect_vs_hyperfine.csv: a over 60 log points in [10, 1e6] uT for the
default (k, r) pairs. Note the large-a tail: the effect levels off instead
of vanishing, because the field splitting inside the upper hyperfine
manifold is independent of a.
"""
import numpy as np

from _common import parser, write
from radpair import RadicalPairSpec
from radpair.sweep import DEFAULT_FIELD_RATES, default_hyperfine_grid, records_to_csv, sweep_hyperfine


def main():
    args = parser(__doc__.splitlines()[0]).parse_args()
    recs = sweep_hyperfine(RadicalPairSpec.from_couplings([args.a]), DEFAULT_FIELD_RATES, default_hyperfine_grid())
    for ip, (k, r) in enumerate(DEFAULT_FIELD_RATES):
        d = np.array([rec.outputs["delta_percent"] for rec in recs if rec.index[1] == ip])
        a = np.array([rec.inputs["a_uT"] for rec in recs if rec.index[1] == ip])
        print(f"k={k:.0e} r={r:.0e}: max {d.max():.2f}% at a={a[d.argmax()]:.3g} uT, at a=1e6: {d[-1]:.2f}%")
    write(args.out, "effect_vs_hyperfine.csv", records_to_csv(recs))


if __name__ == "__main__":
    main()
