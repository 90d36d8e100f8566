"""Sample the Floquet discriminants whose zeros are Laplace eigenvalues.

For each harmonic mode (i, j), a number lambda is an eigenvalue exactly
when delta0(lambda) = 1 + W(T) - (z1(T) + z2'(T)) vanishes.  This script
reproduces the four discriminant curves that carry the whole spectrum
below 12 for the S^3 x S^1 example, and marks their zeros.
"""

import os

from rotspec import (
    OperatorKind,
    RotationParams,
    ShootingProblem,
    discriminant_curve,
    lambda_grid,
    mode_index,
    scan_and_refine,
    solve_periodic,
)

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

MODES = [(0, 0), (1, 0), (0, 1), (1, 1)]


def main():
    profile = solve_periodic(ShootingProblem(
        params=RotationParams(k=3, l=1, n=5)))
    print(f"profile: a0={profile.a0:.8f}, T={profile.T:.8f}\n")

    curves = {}
    roots = {}
    for (i, j) in MODES:
        mode = mode_index(i, j, profile.params)
        grid = lambda_grid(0.0, 12.0, 0.025)
        curves[(i, j)] = discriminant_curve(
            profile, mode, OperatorKind.LAPLACE, grid)
        records = scan_and_refine(profile, mode, OperatorKind.LAPLACE,
                                  (0.0, 12.0))
        roots[(i, j)] = [r.value for r in records]
        print(f"mode ({i},{j}):  zeros at "
              + ", ".join(f"{v:.7f}" for v in roots[(i, j)]))

        path = os.path.join(OUT, f"discriminant_{i}{j}.csv")
        with open(path, "w") as handle:
            handle.write("lambda,delta0\n")
            for lam, d in zip(grid, curves[(i, j)].delta0):
                handle.write(f"{lam:.9g},{d:.9g}\n")
    print("\nwrote", OUT + "/discriminant_??.csv")

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return
    fig, axes = plt.subplots(2, 2, figsize=(10, 6), sharex=True)
    for ax, (i, j) in zip(axes.ravel(), MODES):
        curve = curves[(i, j)]
        ax.plot(curve.lams, curve.delta0, lw=1.0)
        ax.axhline(0.0, color="k", lw=0.5)
        for root in roots[(i, j)]:
            ax.plot([root], [0.0], "ro", ms=4)
        ax.set_title(f"mode ({i},{j})")
        ax.set_ylim(-30, 30)
    for ax in axes[1]:
        ax.set_xlabel("lambda")
    fig.suptitle("Floquet discriminants, Laplace operator, S^3 x S^1 example")
    fig.tight_layout()
    fig.savefig(os.path.join(OUT, "discriminants.png"), dpi=150)
    print("wrote", os.path.join(OUT, "discriminants.png"))


if __name__ == "__main__":
    main()
