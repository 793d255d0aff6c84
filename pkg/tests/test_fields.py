"""Field-layer tests against a small independent polynomial oracle.

The oracle below does plain coefficient-vector arithmetic modulo the
defining polynomial, with no Zech tables, so table bugs cannot hide.
"""

import numpy as np
import pytest

from paleyschemes.errors import ParameterError
from paleyschemes.fields import ZERO, FiniteField, get_field


# --------------------------------------------------------------------------
# oracle helpers (deliberately naive)
# --------------------------------------------------------------------------

def poly_mul_mod(a, b, modulus, p):
    m = len(modulus) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            prod[i + j] = (prod[i + j] + ai * bj) % p
    for top in range(len(prod) - 1, m - 1, -1):
        c = prod[top]
        if c:
            for j in range(m + 1):
                prod[top - m + j] = (prod[top - m + j] - c * modulus[j]) % p
    out = prod[:m] + [0] * max(0, m - len(prod))
    return [c % p for c in out]


def poly_powers_of_x(modulus, p, count):
    m = len(modulus) - 1
    x = [0, 1][:m] + [0] * max(0, m - 2)
    if m == 1:
        x = [(-modulus[0]) % p]
    cur = [1] + [0] * (m - 1)
    out = [cur]
    for _ in range(count - 1):
        cur = poly_mul_mod(cur, x, modulus, p)
        out.append(cur)
    return out


def naive_is_primitive(modulus, p):
    m = len(modulus) - 1
    n1 = p ** m - 1
    pw = poly_powers_of_x(modulus, p, n1 + 1)
    one = [1] + [0] * (m - 1)
    first = next(i for i in range(1, n1 + 1) if pw[i] == one)
    return first == n1


def naive_smallest_primitive(p, m):
    best = None
    for code in range(p ** m):
        coeffs = []
        t = code
        for _ in range(m):
            coeffs.append(t % p)
            t //= p
        coeffs.append(1)
        # skip polynomials with x as a factor quickly
        if coeffs[0] == 0:
            continue
        if naive_is_primitive(coeffs, p):
            best = tuple(coeffs)
            break
    return best


# --------------------------------------------------------------------------
# default modulus selection
# --------------------------------------------------------------------------

def test_default_modulus_f9():
    F = get_field(3, 2)
    assert F.modulus == (2, 1, 1)  # x^2 + x + 2


def test_default_modulus_f27():
    F = get_field(3, 3)
    assert F.modulus == (1, 2, 0, 1)  # x^3 + 2x + 1


@pytest.mark.parametrize("p,m", [(3, 2), (3, 3), (5, 2), (7, 2), (11, 1), (13, 1)])
def test_default_modulus_matches_naive_enumeration(p, m):
    F = get_field(p, m)
    assert F.modulus == naive_smallest_primitive(p, m)


def test_construction_is_deterministic():
    a = FiniteField(3, 3)
    b = FiniteField(3, 3)
    assert a.modulus == b.modulus
    assert np.array_equal(a.zech, b.zech)


def test_rejects_bad_characteristic():
    with pytest.raises(ParameterError):
        FiniteField(4, 2)
    with pytest.raises(ParameterError):
        FiniteField(2, 3)
    with pytest.raises(ParameterError):
        FiniteField(9, 1)


def test_rejects_imprimitive_modulus():
    # x^2 + 1 is irreducible over F_3 but x has order 4, not 8
    with pytest.raises(ParameterError):
        FiniteField(3, 2, modulus=[1, 0, 1])


def test_rejects_oversized_field():
    with pytest.raises(ParameterError):
        FiniteField(3, 2, max_order=5)


# --------------------------------------------------------------------------
# Zech addition vs polynomial oracle
# --------------------------------------------------------------------------

def test_f9_one_plus_g_example():
    F = get_field(3, 2)
    assert F.add(0, 1) == 7  # g^0 + g^1 = g^7


@pytest.mark.parametrize("p,m", [(3, 2), (3, 3), (5, 2), (7, 1), (11, 1), (3, 5)])
def test_zech_addition_matches_polynomials(p, m):
    F = get_field(p, m)
    pw = poly_powers_of_x(F.modulus, p, F.n1)
    code = {tuple(v): i for i, v in enumerate(pw)}
    rng = np.random.default_rng(7 * p + m)
    for _ in range(1000):
        a, b = rng.integers(0, F.n1, size=2)
        s = [(pw[a][j] + pw[b][j]) % p for j in range(m)]
        expect = ZERO if all(c == 0 for c in s) else code[tuple(s)]
        assert F.add(int(a), int(b)) == expect


def test_add_array_agrees_with_scalar_add():
    F = get_field(3, 3)
    rng = np.random.default_rng(5)
    a = rng.integers(-1, F.n1, size=500)
    b = rng.integers(-1, F.n1, size=500)
    got = F.add_array(a, b)
    for i in range(len(a)):
        assert got[i] == F.add(int(a[i]), int(b[i]))


def test_additive_inverses():
    F = get_field(3, 3)
    for a in range(F.n1):
        assert F.add(a, F.neg(a)) == ZERO
    assert F.neg(ZERO) == ZERO


def test_zero_is_absorbing_and_neutral():
    F = get_field(5, 2)
    assert F.add(ZERO, 11) == 11
    assert F.add(11, ZERO) == 11
    assert F.mul(ZERO, 11) == ZERO
    assert F.add(ZERO, ZERO) == ZERO


# --------------------------------------------------------------------------
# traces, squares, Frobenius
# --------------------------------------------------------------------------

def test_trace_examples_f27():
    F = get_field(3, 3)
    assert F.rel_trace(1, 1) == ZERO           # tr(g) = 0
    assert F.rel_trace(1, 2) == F.dlog_of_int(2)  # tr(g^2) = 2


def test_trace_is_linear_over_subfield():
    F = get_field(3, 3)  # tr to F_3
    rng = np.random.default_rng(11)
    step = F.subfield_step(1)
    for _ in range(200):
        x, y = (int(v) for v in rng.integers(0, F.n1, size=2))
        tx, ty = F.rel_trace(1, x), F.rel_trace(1, y)
        assert F.rel_trace(1, F.add(x, y)) == F.add(tx, ty)
        c = int(rng.integers(0, F.p - 1)) * step  # element of F_3^*
        assert F.rel_trace(1, F.mul(c, x)) == F.mul(c, tx)


def test_trace_exponents_vectorized_matches_scalar():
    F = get_field(3, 3)
    te = F.trace_exponents(1)
    for a in range(F.n1):
        assert te[a] == F.rel_trace(1, a)


def test_tower_trace_composition():
    F = FiniteField(3, 6, max_order=3 ** 6)
    rng = np.random.default_rng(3)
    for _ in range(50):
        x = int(rng.integers(0, F.n1))
        t = F.rel_trace(2, x)  # down to F_9
        # push the F_9 value down to F_3 by hand: tr_{9/3}(t) = t + t^3
        inner = F.add(t, F.frobenius(t, 1))
        assert inner == F.rel_trace(1, x)


def test_squares_f7():
    F = get_field(7, 1)
    squares = sorted({pow(a, 2, 7) for a in range(1, 7)})
    got = sorted(t for t in range(1, 7) if F.is_square(F.dlog_of_int(t)))
    want = sorted(F_t for F_t in squares)
    assert [2 in squares] == [F.is_square(F.dlog_of_int(2))]
    assert got == want
    with pytest.raises(ParameterError):
        F.is_square(ZERO)


def test_square_exponent_parity_consistency():
    F = get_field(3, 5)
    rng = np.random.default_rng(13)
    for _ in range(300):
        a = int(rng.integers(0, F.n1))
        # a is a square iff some y has 2*dlog(y) = a mod n1; n1 is even
        assert F.is_square(a) == (a % 2 == 0)


def test_frobenius_fixes_prime_field_and_composes():
    F = get_field(3, 3)
    for t in range(1, 3):
        e = F.dlog_of_int(t)
        assert F.frobenius(e, 1) == e
    rng = np.random.default_rng(17)
    for _ in range(100):
        a = int(rng.integers(0, F.n1))
        assert F.frobenius(F.frobenius(a, 1), 2) == F.frobenius(a, 3)
        assert F.frobenius(a, F.m) == a


def test_frobenius_is_additive():
    F = get_field(3, 3)
    rng = np.random.default_rng(19)
    for _ in range(200):
        x, y = (int(v) for v in rng.integers(-1, F.n1, size=2))
        assert F.frobenius(F.add(x, y), 1) == F.add(F.frobenius(x, 1), F.frobenius(y, 1))


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------

def test_descriptor_roundtrip():
    from paleyschemes.fields import field_from_descriptor
    F = get_field(3, 3)
    G = field_from_descriptor(F.descriptor())
    assert F == G
    assert np.array_equal(F.zech, G.zech)
