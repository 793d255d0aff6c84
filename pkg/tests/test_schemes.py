import itertools

import numpy as np
import pytest

from paleyschemes.errors import (ParameterError, PreconditionError,
                                 VerificationFailedError)
from paleyschemes.fields import get_field
from paleyschemes.schemes import (SchemeRecord, build_DX, certify,
                                  complement_units, dual_scheme, frobenius,
                                  is_half_point, negate, recover_X, scale,
                                  verify_additive, verify_dual,
                                  verify_multiplicative, verify_quotient,
                                  verify_scheme)
from paleyschemes.singer import singer_bundle


def brute_eq1(rec):
    """Difference-count oracle, no group-ring convolution involved."""
    F = rec.field
    n1 = rec.n1
    D = list(rec.D)
    if len(D) != n1 // 2:
        return False
    counts = {}
    for a in D:
        for b in D:
            d = F.sub(a, b)
            counts[d] = counts.get(d, 0) + 1
    inD = set(D)
    for g in range(n1):
        n = counts.get(g, 0)
        lhs = 4 * n + 2 * (g in inD) + 2 * (F.neg(g) in inD)
        if lhs != n1:
            return False
    return True


def exps_of_values(F, values):
    """Map prime-field element values to discrete-log exponents."""
    return tuple(sorted(F.dlog_of_int(val) for val in values))


def test_quadratic_residues_of_f7_verify():
    F = get_field(7, 1)
    D = exps_of_values(F, [1, 2, 4])
    rec = SchemeRecord(field=F, e=1, l=1, D=D, X=None,
                       provenance="paley", verified_by=frozenset())
    assert D == (0, 2, 4)  # squares are the even powers of g = 5
    assert verify_additive(rec)
    bad = SchemeRecord(field=F, e=1, l=1, D=exps_of_values(F, [1, 2, 3]),
                       X=None, provenance="manual", verified_by=frozenset())
    assert not verify_additive(bad)


@pytest.mark.parametrize("p,m", [(3, 1), (5, 1), (7, 1), (11, 1), (3, 2),
                                 (13, 1), (3, 3), (5, 2), (19, 1)])
def test_paley_schemes_verify(p, m):
    rec = build_DX(p, 1, m, range((p ** m - 1) // (p - 1))) if m % 2 else None
    if rec is None:  # even degree: build S directly
        F = get_field(p, m)
        rec = SchemeRecord(field=F, e=1, l=m, D=tuple(range(0, F.n1, 2)),
                           X=None, provenance="paley",
                           verified_by=frozenset())
    assert verify_additive(rec)


def test_full_and_empty_X_give_squares_and_nonsquares():
    rec = build_DX(3, 1, 3, range(13))
    assert rec.D == tuple(range(0, 26, 2))
    rec = build_DX(3, 1, 3, [])
    assert rec.D == tuple(range(1, 26, 2))
    assert len(build_DX(3, 1, 3, singer_bundle(3, 1, 3).S).D) == 13


def test_additive_route_matches_bruteforce_oracle():
    rng = np.random.default_rng(7)
    towers = [(3, 1, 3), (5, 1, 2), (7, 1, 1)]
    for p, e, l in towers:
        v = (p ** (e * l) - 1) // (p ** e - 1)
        for _ in range(6):
            X = [int(x) for x in np.flatnonzero(rng.integers(0, 2, v))]
            if l % 2 == 0:
                with pytest.warns(UserWarning):
                    rec = build_DX(p, e, l, X)
            else:
                rec = build_DX(p, e, l, X)
            assert verify_additive(rec) == brute_eq1(rec)


def test_half_point_detection():
    rng = np.random.default_rng(3)
    for _ in range(10):
        X = [int(x) for x in np.flatnonzero(rng.integers(0, 2, 13))]
        assert is_half_point(build_DX(3, 1, 3, X))
    F = get_field(3, 3)
    # both elements of one F_3^* coset plus 11 fillers: not half-point
    D = tuple(sorted({0, 13} | set(range(2, 24, 2))))
    rec = SchemeRecord(field=F, e=1, l=3, D=D, X=None,
                       provenance="manual", verified_by=frozenset())
    assert not is_half_point(rec)
    # wrong total size
    small = SchemeRecord(field=F, e=1, l=3, D=(0, 2, 4), X=None,
                         provenance="manual", verified_by=frozenset())
    assert not is_half_point(small)


def test_recover_X_round_trip():
    rng = np.random.default_rng(11)
    for p, e, l in [(3, 1, 3), (5, 1, 3), (3, 2, 3)]:
        v = (p ** (e * l) - 1) // (p ** e - 1)
        for _ in range(5):
            X = tuple(int(x) for x in np.flatnonzero(rng.integers(0, 2, v)))
            rec = build_DX(p, e, l, X)
            assert recover_X(rec) == X
            rebuilt = build_DX(p, e, l, recover_X(rec))
            assert rebuilt.D == rec.D
    full = build_DX(3, 1, 3, range(13))
    assert recover_X(full) == tuple(range(13))
    assert recover_X(build_DX(3, 1, 3, [])) == ()


def test_multiplicative_route_on_f27():
    S = build_DX(3, 1, 3, range(13))
    assert verify_multiplicative(S)
    N = complement_units(S)
    assert verify_multiplicative(N)


def test_quotient_route_examples():
    assert verify_quotient(3, 1, 3, range(13))
    # scaled Singer set at the 243-element field appears among known schemes
    S5 = singer_bundle(3, 1, 5).S
    X = sorted(2 * s % 121 for s in S5)
    assert verify_quotient(3, 1, 5, X)
    rec = build_DX(3, 1, 5, X)
    assert verify_additive(rec)


def test_route_agreement_random_half_point_sets():
    rng = np.random.default_rng(2026)
    for p, e, l in [(3, 1, 3), (5, 1, 3)]:
        v = (p ** (e * l) - 1) // (p ** e - 1)
        agree = 0
        for _ in range(150):
            X = [int(x) for x in np.flatnonzero(rng.integers(0, 2, v))]
            rec = build_DX(p, e, l, X)
            a = verify_additive(rec)
            m = verify_multiplicative(rec)
            qv = verify_quotient(p, e, l, recover_X(rec))
            d = verify_dual(rec)
            assert a == m == qv == d
            agree += 1
        assert agree == 150


def test_scheme_census_on_13_residues():
    # all 8192 residue subsets; the fast route must find exactly 288 schemes,
    # and spot checks against the additive route must agree
    rng = np.random.default_rng(5)
    hits = 0
    sample_checked = 0
    for r in range(14):
        for X in itertools.combinations(range(13), r):
            ok = verify_quotient(3, 1, 3, X)
            hits += ok
            if ok and rng.random() < 0.1:
                assert verify_additive(build_DX(3, 1, 3, X))
                sample_checked += 1
    assert hits == 288
    assert sample_checked > 10


def test_complement_closure():
    rng = np.random.default_rng(17)
    for _ in range(20):
        X = [int(x) for x in np.flatnonzero(rng.integers(0, 2, 13))]
        rec = build_DX(3, 1, 3, X)
        comp = complement_units(rec)
        assert verify_additive(rec) == verify_additive(comp)
        # complement in F* is the same construction from the complement of X
        Xc = sorted(set(range(13)) - set(X))
        assert comp.D == build_DX(3, 1, 3, Xc).D


def test_skewness_for_3_mod_4_fields():
    for p, e, l in [(3, 1, 3), (3, 1, 5), (7, 1, 3)]:
        v = (p ** l - 1) // (p - 1)
        rec = build_DX(p, e, l, range(v))
        assert verify_additive(rec)
        n1 = rec.n1
        assert (p ** l) % 4 == 3
        neg = {(i + n1 // 2) % n1 for i in rec.D}
        assert neg.isdisjoint(rec.D)
        assert neg | set(rec.D) == set(range(n1))


def test_symmetry_for_1_mod_4_fields():
    # 3^2 = 9 and 5^2 = 25 are 1 mod 4: schemes there satisfy D = -D
    for p, m in [(3, 2), (5, 2)]:
        F = get_field(p, m)
        D = tuple(range(0, F.n1, 2))
        assert {(i + F.n1 // 2) % F.n1 for i in D} == set(D)


def test_scaling_and_frobenius_preserve_schemes():
    rec = certify(build_DX(3, 1, 5, sorted(2 * s % 121
                                           for s in singer_bundle(3, 1, 5).S)),
                  ("additive",))
    for s in (1, 2, 100):
        assert verify_additive(scale(rec, s))
    assert verify_additive(frobenius(rec))
    assert verify_additive(negate(rec))


def test_dual_of_paley_27_is_the_nonsquares():
    # sigma(W) = -3 here, which flips the branch
    assert sum(singer_bundle(3, 1, 3).W) == -3
    rec = certify(build_DX(3, 1, 3, range(13)), ("additive",))
    d = dual_scheme(rec)
    assert d.D == tuple(range(1, 26, 2))


def test_dual_of_paley_243_is_itself():
    assert sum(singer_bundle(3, 1, 5).W) == 9
    rec = certify(build_DX(3, 1, 5, range(121)), ("multiplicative",))
    assert dual_scheme(rec).D == rec.D


def test_double_dual_is_identity():
    S5 = singer_bundle(3, 1, 5).S
    seeds = [range(121), sorted(2 * s % 121 for s in S5)]
    for X in seeds:
        rec = certify(build_DX(3, 1, 5, X), ("multiplicative",))
        d1 = certify(dual_scheme(rec), ("multiplicative",))
        assert verify_additive(d1)
        assert dual_scheme(d1).D == rec.D


def test_certify_stamps_and_strictness():
    rec = certify(build_DX(3, 1, 3, range(13)), "all")
    assert rec.verified_by == {"additive", "multiplicative",
                               "quotient", "dual"}
    with pytest.warns(UserWarning):
        even = build_DX(3, 1, 2, range(4))
    even = certify(even, "all")
    assert even.verified_by == {"additive"}  # other routes need odd l
    bad = build_DX(3, 1, 3, [0, 5])
    with pytest.raises(VerificationFailedError):
        certify(bad, ("additive",))
    assert certify(bad, ("additive",), strict=False).verified_by == frozenset()


def test_preconditions_and_errors():
    F = get_field(3, 3)
    not_half = SchemeRecord(field=F, e=1, l=3, D=(0, 1, 2), X=None,
                            provenance="manual", verified_by=frozenset())
    with pytest.raises(PreconditionError):
        verify_multiplicative(not_half)
    with pytest.raises(PreconditionError):
        recover_X(not_half)
    with pytest.raises(PreconditionError):
        verify_quotient(3, 1, 2, [0])
    with pytest.raises(ParameterError):
        build_DX(3, 1, 3, [13])
    with pytest.raises(ParameterError):
        verify_scheme(not_half, "fancy")
    with pytest.raises(PreconditionError):
        dual_scheme(build_DX(3, 1, 3, range(13)))  # unverified
    with pytest.raises(ParameterError):
        SchemeRecord(field=F, e=1, l=3, D=(2, 1), X=None,
                     provenance="manual", verified_by=frozenset())
    with pytest.raises(ParameterError):
        SchemeRecord(field=F, e=1, l=3, D=(0,), X=None,
                     provenance="spooky", verified_by=frozenset())


def test_record_json_round_trip():
    rec = certify(build_DX(3, 1, 3, [0, 2, 3]), strict=False)
    data = rec.to_json()
    back = SchemeRecord.from_json(data)
    assert back.D == rec.D and back.X == rec.X
    assert back.field == rec.field
    assert back.verified_by == rec.verified_by
    rec2 = certify(build_DX(5, 1, 3, range(31)), "all")
    assert SchemeRecord.from_json(rec2.to_json()).verified_by == rec2.verified_by
