"""Stability indices and nullities of the two embedded examples.

The stability operator adds n + |A|^2 to the Laplacian, so its negative
eigenvalues measure area-decreasing deformations; their count (with
multiplicity) is the stability index, and the dimension of its kernel is
the nullity.  Zero modes come from ambient isometries; the eigenvalue -n
carries the Gauss map components.
"""

from rotspec import (
    OperatorKind,
    RotationParams,
    ShootingProblem,
    assemble_spectrum,
    solve_periodic,
)


def report_for(k, l):
    n = k + l + 1
    profile = solve_periodic(ShootingProblem(
        params=RotationParams(k=k, l=l, n=n)))
    rep = assemble_spectrum(profile, OperatorKind.JACOBI, (-60.0, 1.0))
    print(f"=== S^{k} x S^{l} example "
          f"(a0={profile.a0:.7f}, T={profile.T:.7f}) ===")
    print(f"{'eigenvalue':>12}  {'mult':>4}  contributing modes")
    for group in rep.groups:
        if group.value > 1e-4:
            continue
        contributions = ", ".join(
            f"({r.mode.i},{r.mode.j})x{r.total_multiplicity}"
            for r in group.members)
        print(f"{group.value:12.6f}  {group.multiplicity:4d}  {contributions}")
    print(f"stability index = {rep.stability_index}")
    print(f"nullity         = {rep.nullity}")
    print()
    return rep


def main():
    report_for(3, 1)
    rep = report_for(2, 2)

    # with k = l the two sphere factors can be exchanged, so modes (i,j)
    # and (j,i) are distinct ODEs with identical spectra; both contribute
    # their own eigenfunctions, which is visible in every shared group
    shared = [g for g in rep.groups
              if len({r.mode.pair for r in g.members}) > 1]
    print("k = l makes mirror modes carry equal eigenvalues; shared groups:")
    for group in shared:
        pairs = ", ".join(f"({r.mode.i},{r.mode.j})" for r in group.members)
        print(f"  {group.value:10.6f}: {pairs}")


if __name__ == "__main__":
    main()
