"""Singlet yield of a singlet-born pair against field for a few (k, r) pairs.

Writes yield_vs_field.csv over the default field grid (0 plus 60 log points
in [0.1, 1e4] uT) for the default rate pairs.
"""
from _common import parser, write
from radpair import RadicalPairSpec
from radpair.sweep import DEFAULT_FIELD_RATES, default_field_grid, records_to_csv, sweep_field


def main():
    args = parser(__doc__.splitlines()[0]).parse_args()
    spec = RadicalPairSpec.from_couplings([args.a])
    grid = default_field_grid()
    records = []
    for k, r in DEFAULT_FIELD_RATES:
        recs = sweep_field(spec, k, r, "S", "S", grid)
        phi = [rec.outputs["phi"] for rec in recs]
        print(f"k={k:.0e} r={r:.0e}: Phi(0)={phi[0]:.4f}  min={min(phi):.4f}  Phi(1e4)={phi[-1]:.4f}")
        records += recs
    write(args.out, "yield_vs_field.csv", records_to_csv(records))


if __name__ == "__main__":
    main()
