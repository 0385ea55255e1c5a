#!/usr/bin/env python3
"""Walk through one planted Artin-Schreier sequence over F_2.

Builds the window, checks pseudo-convergence, finds a witness polynomial,
pushes a quadratic through the sequence and factors a linear polynomial at
the limit as d * u with u a unit.
"""
from hahnci.hahn import FieldConfig
from hahnci.ordered import ge
from hahnci.planted import artin_schreier
from hahnci.poly import MultiPoly
from hahnci.pseudo import (check_pseudo_convergent, classify, factor_below_degree,
                           image_sequence)


def main():
    cfg = FieldConfig(2, 2)
    inst = artin_schreier(cfg, 2, window=8)
    print("window:")
    for v in inst.seq.window[:4]:
        print("  ", v.pretty())
    print("   ...")

    chk = check_pseudo_convergent(inst.seq)
    print("pseudo-convergent:", chk.ok)
    print("gammas:", ", ".join(str(g[0]) for g in chk.profile))

    c = classify(inst.seq, 2, 1, gamma_star=ge(1))
    print(f"classification: {c.kind}, witness {c.witness.pretty()}, onset {c.onset}")
    print("profile reaches 1 inside the window:", c.fundamental)

    X = MultiPoly.var(cfg, "X")
    img = image_sequence(X * X + X, inst.seq, inst.limit)
    print("image of X^2 + X: onset", img.onset, "limit verified", img.limit_verified)

    g = X + cfg.monomial(ge(2))
    fac = factor_below_degree(g, inst.limit, inst.seq, 2)
    print(f"g(x) = d u with d = {fac.d.pretty()} at index {fac.indices[0]}, val(u) = {fac.u.v[0]}")


if __name__ == "__main__":
    main()
