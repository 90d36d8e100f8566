"""Sweep the one-circle family of closed profiles over the dimension.

For l = 1 a closed profile exists for every hypersurface dimension n >= 4;
the starting radius and the period both shrink monotonically as n grows.
The sweep continues in n, reusing each converged radius (scaled) to center
the next bracket.

Pass a larger upper end on the command line for the full family, e.g.
``python demos/05_family_table.py 50``.
"""

import sys

from rotspec.profile import table_sweep


def main():
    n_to = int(sys.argv[1]) if len(sys.argv) > 1 else 12
    result = table_sweep(1, (4, n_to))
    print(f"{'n':>3}  {'a0':>10}  {'T':>9}  {'|f1(T/2)|':>10}")
    for p in result.profiles:
        print(f"{p.params.n:3d}  {p.a0:10.7f}  {p.T:9.6f}  "
              f"{p.residual_f1:10.2e}")
    for n, reason in result.failures:
        print(f"{n:3d}  failed: {reason}")
    a0s = [p.a0 for p in result.profiles]
    ratio = [a * (p.params.n ** 0.5)
             for a, p in zip(a0s, result.profiles)]
    print("\na0 * sqrt(n) drifts slowly:",
          ", ".join(f"{r:.4f}" for r in ratio[:6]), "...")


if __name__ == "__main__":
    main()
