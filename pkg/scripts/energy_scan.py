"""Polynomial energies E_P^q(G) against their bounds for every subgroup order in a range."""

import argparse

from cosetbounds.bounds import bound_corollaries, bound_energy
from cosetbounds.counting import polynomial_energy
from cosetbounds.ffield import FieldCtx, divisors, subgroup_of_order
from cosetbounds.polyalg import parse_poly


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=1_003_001)
    ap.add_argument("--poly", default="x^2 + 3*x*y + 5*y^2")
    ap.add_argument("--tmin", type=int, default=2)
    ap.add_argument("--tmax", type=int, default=1200)
    ap.add_argument("--q", type=int, nargs="+", default=[2, 3, 4, 5])
    args = ap.parse_args()

    ctx = FieldCtx(args.p)
    P = parse_poly(args.poly, ctx)
    m, n = P.bidegree
    deg = P.total_degree
    print("t," + ",".join(f"E{q},ratio{q},applicable{q}" for q in args.q) + ",ratio_17")
    for t in divisors(args.p - 1):
        if not args.tmin <= t <= args.tmax:
            continue
        G = subgroup_of_order(ctx, t)
        cells = []
        for q in args.q:
            e = polynomial_energy(P, G, q)
            rep = bound_energy(deg, q, t, args.p)
            cells.append(f"{e},{e / rep.approx:.3e},{int(rep.applicable)}")
        e2 = polynomial_energy(P, G, 2)
        cells.append(f"{e2 / bound_corollaries(m, n, t, args.p)[0].approx:.3e}")
        print(f"{t}," + ",".join(cells))


if __name__ == "__main__":
    main()
