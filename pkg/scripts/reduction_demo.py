"""Reduce a shifted 2F1 to the base function and its derivative, then certify it.

    python scripts/reduction_demo.py "1/2+eps" "1/3" "3/2" 2 -1 1
"""

import sys

from hornred.horn import PFQSpec
from hornred.reduction import reduce


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 6:
        print(__doc__.strip(), file=sys.stderr)
        return 1
    a, b, c = argv[:3]
    m1, m2, n1 = (int(x) for x in argv[3:])
    f = PFQSpec((a, b), (c,))
    res = reduce(f, [m1, m2], [n1])
    print(f"base   : {f}")
    print(f"target : {res.target}")
    print(f"R      = {res.prefactor_R}")
    for k, p in enumerate(res.pcoeffs):
        print(f"P_{k}    = {p}")
    print(f"checked exactly through z^{res.verified_order}")
    assert res.residual(res.verified_order).is_zero()
    return 0


if __name__ == "__main__":
    sys.exit(main())
