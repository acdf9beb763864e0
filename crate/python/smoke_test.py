"""Smoke test for the pybifree extension.

Build it first with `pip install --no-build-isolation -e crates/python`.
"""

from fractions import Fraction

import pybifree as bf


def main():
    parts = bf.enumerate_bnc("llrlr")
    assert len(parts) == 42, len(parts)
    assert "1,3|2,4,5" in parts
    assert bf.is_bi_noncrossing("llrlr", "1,3|2,4,5")
    assert not bf.is_bi_noncrossing("llll", "1,3|2,4")
    assert bf.kreweras("llll", "1|2|3|4") == "1,2,3,4"
    assert bf.mobius("lrl", "1|2|3", "1,2,3") == Fraction(2)
    assert bf.refines("llrlr", "1,3|2|4,5", "1,3|2,4,5")
    assert len(bf.lr_diagrams("rlr", "1,1,2")) == 8

    trace = bf.trace("lrllrrlrr", "1,2|3,5,9|4,7|6,8")
    assert trace == "E(T1T2 L_{E(T3 L_{E(T4T7)} T5 R_{E(T6T8)} T9)})", trace

    x = bf.Bimodule.random(2, 1, seed=5)
    s = x.random_left_operator(seed=1)
    t = x.random_right_operator(seed=2)
    assert x.is_left_operator(s) and x.is_right_operator(t)
    # E_{1_chi} is the plain moment; E over 0_chi for "lr" factors.
    assert x.e_pi("lr", "1,2", [s, t]) == x.expect_word([s, t])
    e_s, e_t = x.expectation(s), x.expectation(t)
    zero = x.e_pi("lr", "1|2", [s, t])
    assert zero == x.expect_word([s, x.rb(e_t)]), (zero, e_s, e_t)
    # kappa over 1_chi for two operators: E(ST) - E over 0_chi.
    k = x.kappa_pi("lr", "1,2", [s, t])
    full = x.expect_word([s, t])
    assert k == [[full[i][j] - zero[i][j] for j in range(2)] for i in range(2)]
    a = [[1, 0, Fraction(1, 2), 0], [0, 1, 0, 0], [2, 0, 1, 0], [0, 0, 0, 3]]
    assert x.is_left_operator(x.left_operator(a))

    y = bf.Bimodule.random(2, 1, seed=6)
    fp = bf.FreeProduct([x, y], depth=3)
    assert fp.dim == 7 * 4
    c1, d1 = fp.lam(0, s), fp.rho(0, t)
    c2 = fp.lam(1, y.random_left_operator(seed=3))
    assert fp.expect_word([c1, d1]) == x.expect_word([s, t])
    # Mixed cumulants of freely independent families vanish.
    k = fp.kappa_pi("ll", "1,2", [c1, c2])
    assert all(v == 0 for row in k for v in row), k

    ok, report = bf.verify("lattice", seed=7, max_n=5)
    assert ok, report
    print("smoke test passed")


if __name__ == "__main__":
    main()
