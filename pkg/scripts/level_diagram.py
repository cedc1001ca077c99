"""Energy levels of the one-proton pair against field, with their singlet overlap.

Writes levels.csv: every eigenlevel at every field, and the weight of the
singlet-born (nucleus up) state on it. Three levels carry weight; two of
them coincide at B = 0 and split linearly with B.
"""
import numpy as np

from _common import parser, write
from radpair import RadicalPairSpec
from radpair.eigen import decompose_spec, singlet_with_nuclei
from radpair.sweep import format_value
from radpair.system import DEFAULT_CONSTANTS


def main():
    p = parser(__doc__.splitlines()[0])
    p.add_argument("--b-max", type=float, default=100.0)
    p.add_argument("--num", type=int, default=201)
    args = p.parse_args()
    spec = RadicalPairSpec.from_couplings([args.a])
    psi = singlet_with_nuclei(spec, [0])
    rows = ["B_uT,level_index,energy_uT,singlet_weight"]
    for B in np.linspace(0, args.b_max, args.num):
        eig = decompose_spec(spec, float(B))
        w = np.abs(eig.vectors.conj().T @ psi) ** 2
        e = DEFAULT_CONSTANTS.to_field_ut(eig.values)
        rows += [",".join(map(format_value, (float(B), j, float(e[j]), float(w[j])))) for j in range(len(e))]
    write(args.out, "levels.csv", "\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
