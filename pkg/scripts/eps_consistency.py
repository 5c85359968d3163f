"""Compare truncated eps-expansions against direct summation at small eps.

For each function f and truncation order K the remainder
|f(z, eps0) - sum_{k<=K} c_k(z) eps0^k| should scale like eps0^(K+1); the
script prints the fitted constant C at two values of eps0 and their ratio.
"""

import sys

from hornred.epsilon import laurent_expand
from hornred.horn import PFQSpec, eval_numeric

CASES = [
    (PFQSpec((1, 1), ("eps",)), -1),
    (PFQSpec(("eps",), ()), 1),
    (PFQSpec(("1/2+eps", "1/3"), ("3/2",)), 1),
    (PFQSpec(("1/4+eps", "3/4"), ("1/2-eps",)), 2),
    (PFQSpec(("eps", "eps", 1), (2, "3/2+eps")), 2),
]


def main() -> int:
    worst = 1.0
    print(f"{'function':<36} {'K':>2} {'z':>5} {'C(1e-2)':>12} {'C(1e-3)':>12} {'ratio':>7}")
    for f, K in CASES:
        L = laurent_expand(f, K, 60)
        for z in (0.1, 0.25, 0.5):
            C = []
            for e0 in (1e-2, 1e-3):
                err = abs(eval_numeric(f, z, e0, rel_tol=1e-15) - L.evaluate(z, e0))
                C.append(err / e0 ** (K + 1))
            ratio = C[0] / C[1]
            worst = max(worst, ratio, 1 / ratio)
            print(f"{str(f):<36} {K:>2} {z:>5} {C[0]:>12.4e} {C[1]:>12.4e} {ratio:>7.3f}")
    print(f"largest deviation factor: {worst:.3f}")
    return 0 if worst <= 4 else 1


if __name__ == "__main__":
    sys.exit(main())
