#!/usr/bin/env python3
"""A two-level planted tower over F_3 and its triangular presentation.

Shows the fraction variables, one transition map, the relation between the
levels, a morphism check and the end-to-end reduction of a degree 5 element.
"""
from hahnci.ci import (build_presentation, element_reduction_report, fraction_var,
                       levels_from_planted, transition)
from hahnci.hahn import FieldConfig
from hahnci.ordered import ge
from hahnci.planted import planted_tower
from hahnci.poly import MultiPoly


def main():
    cfg = FieldConfig(3, 3)
    pt = planted_tower(cfg, 2, 3, window=8, betas=[ge(1)], shifts=[cfg.one()], m0=3)
    levels = levels_from_planted(pt)
    print("h_0 =", pt.tower.level(0).pretty())

    x = fraction_var(levels[0], 2)
    print("x_{0,2} has value", x.v[0])
    tm = transition(levels[0], 2, 4)
    print(f"x_2 = alpha + beta x_4 with val(alpha) = {tm.alpha.v[0]}, val(beta) = {tm.beta.v[0]}")

    P = build_presentation(levels, (2, 3), [(3, 4), (2, 5)])
    print("relation:", P.relations[0].pretty())
    print("triangular:", P.is_triangular(), " vanishes at witness:", P.witness_vanishes())
    print("morphisms ok:", [m.ok for m in P.morphisms])

    X = MultiPoly.var(cfg, "X0")
    f = X ** 5 + cfg.monomial(ge(1)) * X ** 3 + cfg.monomial(ge(2), 2)
    r = element_reduction_report(f, levels)
    print("F =", r.F.pretty())
    print(f"f(x_0) = d' u with val(d') = {r.d_prime.v[0]}, indices {r.indices}, ok = {r.ok}")


if __name__ == "__main__":
    main()
