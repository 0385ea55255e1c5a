import pytest
from hypothesis import given
from hypothesis import strategies as st

from hahnci.gf import GF, field, is_prime, prime_power

QS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27]


def test_prime_helpers():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
    assert prime_power(8) == (2, 3) and prime_power(9) == (3, 2)
    assert prime_power(12) is None and prime_power(1) is None


def test_rejects_non_prime_power():
    with pytest.raises(ValueError):
        GF(6)


@pytest.mark.parametrize("q", QS)
def test_multiplicative_group_is_cyclic_of_order_q_minus_1(q):
    F = field(q)
    orders = set()
    for a in range(1, q):
        assert F.pow(a, q - 1) == 1
        n = 1
        while F.pow(a, n) != 1:
            n += 1
        orders.add(n)
    assert q - 1 in orders


@pytest.mark.parametrize("q", QS)
def test_additive_group_has_exponent_p(q):
    F = field(q)
    for a in range(q):
        s = 0
        for _ in range(F.p):
            s = F.add(s, a)
        assert s == 0
        assert F.add(a, F.neg(a)) == 0


@given(st.sampled_from(QS), st.data())
def test_field_axioms(q, data):
    F = field(q)
    a, b, c = (data.draw(st.integers(0, q - 1)) for _ in range(3))
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(a, b) == F.mul(b, a)
    assert F.sub(F.add(a, b), b) == a
    if a:
        assert F.mul(a, F.inv(a)) == 1
    # Frobenius is additive
    p = F.p
    assert F.pow(F.add(a, b), p) == F.add(F.pow(a, p), F.pow(b, p))


def test_from_int_reduces_mod_p():
    F = field(9)
    assert F.from_int(3) == 0 and F.from_int(4) == 1 and F.from_int(-1) == F.neg(1)
