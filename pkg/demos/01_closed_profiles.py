"""Construct closed minimal profile curves and look at their geometry.

A closed curve (f1(u), f2(u)) inside the unit disk, rotated by a product of
spheres S^k x S^l, generates a minimal hypersurface of S^(n+1) with
n = k + l + 1.  The curve is found by shooting on the starting radius a0:
fly from (0, a0, 0) until the tangent angle reaches pi and drive the
returning f1 to zero.  Reflection symmetry then closes the curve over a
full period.

Outputs land in demos/output/.
"""

import math
import os

import numpy as np

from rotspec import RotationParams, ShootingProblem, solve_periodic
from rotspec.profile import sample_profile

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)


def describe(profile):
    p = profile.params
    print(f"S^{p.k} x S^{p.l} rotation, hypersurface dimension n={p.n}:")
    print(f"  starting radius a0   = {profile.a0:.9f}")
    print(f"  curve length (period) T = {profile.T:.9f}")
    print(f"  closure residuals    |f1| = {profile.residual_f1:.2e}, "
          f"|theta - pi| = {profile.residual_theta:.2e}")
    print(f"  top of the oval      f2(T/2) = "
          f"{profile.a0 + profile.residual_f2:.6f}")
    print(f"  worst |nH| along the flight = "
          f"{profile.minimality_residual:.2e}")
    print()


def closed_curve_points(profile, count=801):
    """Full-period samples; the second half mirrors the first."""
    half = sample_profile(profile, count // 2 + 1)
    pts = [(u, f1, f2) for (u, f1, f2, _, _) in half]
    t_half = profile.T / 2
    mirrored = [(profile.T - u, -f1, f2) for (u, f1, f2) in reversed(pts[:-1])]
    return pts + mirrored


def main():
    # the embedded example in S^6 generated by S^3 x S^1
    ex1 = solve_periodic(ShootingProblem(
        params=RotationParams(k=3, l=1, n=5)))
    describe(ex1)

    # the S^2 x S^2 x S^1 example in the same ambient sphere
    ex2 = solve_periodic(ShootingProblem(
        params=RotationParams(k=2, l=2, n=5)))
    describe(ex2)

    for name, profile in (("ex1_k3_l1", ex1), ("ex2_k2_l2", ex2)):
        pts = closed_curve_points(profile)
        path = os.path.join(OUT, f"profile_{name}.csv")
        with open(path, "w") as handle:
            handle.write("u,f1,f2\n")
            for u, f1, f2 in pts:
                handle.write(f"{u:.9g},{f1:.9g},{f2:.9g}\n")
        print("wrote", path)

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not available; skipping the figure")
        return
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    for ax, (name, profile) in zip(
            axes, (("S^3 x S^1", ex1), ("S^2 x S^2", ex2))):
        pts = np.array(closed_curve_points(profile))
        ax.plot(pts[:, 1], pts[:, 2])
        ax.plot([0], [profile.a0], "o", ms=4)
        circle = np.linspace(0, 2 * math.pi, 200)
        ax.plot(np.cos(circle), np.sin(circle), ":", lw=0.8)
        ax.set_aspect("equal")
        ax.set_title(f"{name}: a0={profile.a0:.5f}")
        ax.set_xlabel("f1")
        ax.set_ylabel("f2")
    fig.tight_layout()
    fig.savefig(os.path.join(OUT, "closed_profiles.png"), dpi=150)
    print("wrote", os.path.join(OUT, "closed_profiles.png"))


if __name__ == "__main__":
    main()
