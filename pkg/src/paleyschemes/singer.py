"""Singer difference sets, relative difference sets, and weighing vectors.

Everything is built from trace computations inside one big field and then
projected; multi-layer objects are never assembled from separately built
small fields, because the discrete-log presentations would not match.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import InternalInconsistencyError, ParameterError
from .fields import FiniteField, get_field
from .groupring import (CyclicGroup, GroupRingElement, is_difference_set,
                        is_relative_difference_set)


@dataclass(frozen=True)
class SingerBundle:
    """Trace-one data of the layer F_{q^l} / F_q, q = p^e."""

    p: int
    e: int
    l: int
    field: FiniteField
    R: tuple[int, ...]        # trace-one exponents in Z_{q^l - 1}
    S: tuple[int, ...]        # projection to Z_v, v = (q^l-1)/(q-1)
    W: Optional[tuple[int, ...]]  # signed projection, l odd only
    verified: bool

    @property
    def q(self) -> int:
        return self.p ** self.e

    @property
    def v(self) -> int:
        return (self.q ** self.l - 1) // (self.q - 1)

    @property
    def n1(self) -> int:
        return self.q ** self.l - 1

    def ds_params(self) -> tuple[int, int, int]:
        q, l = self.q, self.l
        return (self.v, q ** (l - 1), q ** (l - 2) * (q - 1))

    def complement_params(self) -> tuple[int, int, int]:
        q, l = self.q, self.l
        return (self.v, (q ** (l - 1) - 1) // (q - 1), (q ** (l - 2) - 1) // (q - 1))

    def rds_params(self) -> tuple[int, int, int, int]:
        q, l = self.q, self.l
        return (self.v, q - 1, q ** (l - 1), q ** (l - 2))

    def weighing_element(self) -> GroupRingElement:
        if self.W is None:
            raise ParameterError("weighing vector exists only for odd l")
        return GroupRingElement(CyclicGroup(self.v), np.array(self.W, dtype=np.int64))

    def to_json(self) -> dict:
        return {"v": self.v, "set": list(self.S),
                "params": list(self.ds_params()), "kind": "singer"}


def _weighing_from_R(R: np.ndarray, v: int) -> np.ndarray:
    W = np.zeros(v, dtype=np.int64)
    W[R % v] = 1 - 2 * (R % 2)
    return W


def _verify_bundle(b: SingerBundle) -> None:
    q, l, v, n1 = b.q, b.l, b.v, b.n1
    R = np.array(b.R, dtype=np.int64)
    S = np.array(b.S, dtype=np.int64)

    if len(R) != q ** (l - 1):
        raise InternalInconsistencyError("trace-one set has wrong size")
    coset_hits = np.bincount(R % v, minlength=v)
    if coset_hits.max(initial=0) > 1:
        raise InternalInconsistencyError(
            "a multiplicative coset holds two trace-one elements")
    zero_cosets = int(np.sum(coset_hits == 0))
    if zero_cosets != (q ** (l - 1) - 1) // (q - 1):
        raise InternalInconsistencyError("trace-zero coset count is off")

    if l >= 2:
        G = CyclicGroup(n1)
        subgroup = [i * v for i in range(q - 1)]
        Rel = GroupRingElement.from_indices(G, R)
        if not is_relative_difference_set(Rel, subgroup, *b.rds_params()):
            raise InternalInconsistencyError(
                "trace-one set is not a relative difference set")
        Gv = CyclicGroup(v)
        Sel = GroupRingElement.from_indices(Gv, S)
        if not is_difference_set(Sel, *b.ds_params()):
            raise InternalInconsistencyError("projection is not a difference set")
        comp = GroupRingElement.from_indices(
            Gv, sorted(set(range(v)) - set(b.S)))
        if not is_difference_set(comp, *b.complement_params()):
            raise InternalInconsistencyError("complement parameters failed")

    # multiplication by p permutes both sets (Frobenius stability)
    if set((R * b.p) % n1) != set(b.R):
        raise InternalInconsistencyError("R is not stable under the multiplier p")
    if set((S * b.p) % v) != set(b.S):
        raise InternalInconsistencyError("S is not stable under the multiplier p")

    if b.W is not None:
        Wel = b.weighing_element()
        prod = Wel * Wel.power_map(-1)
        expect = np.zeros(v, dtype=np.int64)
        expect[0] = q ** (l - 1)
        if not np.array_equal(prod.coeffs, expect):
            raise InternalInconsistencyError("weighing autocorrelation failed")
        sigma = Wel.coeff_sum()
        if sigma * sigma != q ** (l - 1):
            raise InternalInconsistencyError("weighing coefficient sum is off")


def build_singer_bundle(p: int, e: int, l: int,
                        field: Optional[FiniteField] = None,
                        verify: bool = True) -> SingerBundle:
    if l < 1:
        raise ParameterError(f"layer degree l = {l} must be >= 1")
    if field is None:
        field = get_field(p, e * l)
    elif field.p != p or field.m != e * l:
        raise ParameterError("field does not match the requested tower")
    q = p ** e
    v = (q ** l - 1) // (q - 1)
    te = field.trace_exponents(e)
    R = np.flatnonzero(te == 0).astype(np.int64)  # trace exactly 1
    S = np.unique(R % v)
    if len(S) != len(R):
        raise InternalInconsistencyError("projection lost elements")
    W = tuple(int(x) for x in _weighing_from_R(R, v)) if l % 2 == 1 else None
    bundle = SingerBundle(p=p, e=e, l=l, field=field,
                          R=tuple(int(x) for x in R),
                          S=tuple(int(x) for x in S),
                          W=W, verified=verify)
    if verify:
        _verify_bundle(bundle)
    return bundle


@lru_cache(maxsize=None)
def singer_bundle(p: int, e: int, l: int) -> SingerBundle:
    """Cached, verified bundle over the shared default-modulus field."""
    return build_singer_bundle(p, e, l)


# -- GMW layer composition ----------------------------------------------------


@dataclass(frozen=True)
class GmwComponents:
    """Objects of the tower F_q <= F_{q^t} <= F_{q^{st}}, all in one field."""

    p: int
    e: int
    t: int
    s: int
    field: FiniteField
    rtilde: tuple[int, ...]        # in Z_{v_st}
    s_sub: tuple[int, ...]         # in Z_{v_t}, embedded presentation
    w_sub: tuple[int, ...]         # weighing vector of the sub-layer (t odd)
    s_big: tuple[int, ...]         # in Z_{v_st}

    @property
    def q(self) -> int:
        return self.p ** self.e

    @property
    def v_t(self) -> int:
        return (self.q ** self.t - 1) // (self.q - 1)

    @property
    def v_st(self) -> int:
        return (self.q ** (self.s * self.t) - 1) // (self.q - 1)

    @property
    def embed_step(self) -> int:
        return self.v_st // self.v_t

    def embed(self, X) -> np.ndarray:
        """Index map Z_{v_t} -> Z_{v_st}, j -> j * (v_st / v_t)."""
        return (np.asarray(sorted(X), dtype=np.int64) * self.embed_step) % self.v_st

    def rtilde_rds_params(self) -> tuple[int, int, int, int]:
        q, t, s = self.q, self.t, self.s
        return ((q ** (s * t) - 1) // (q ** t - 1), (q ** t - 1) // (q - 1),
                q ** (s * t - t), q ** (s * t - 2 * t) * (q - 1))


def gmw_components(p: int, e: int, t: int, s: int,
                   field: Optional[FiniteField] = None,
                   verify: bool = True) -> GmwComponents:
    if s < 2:
        raise ParameterError(f"need at least two layers, got s = {s}")
    q = p ** e
    m_big = e * s * t
    if field is None:
        field = get_field(p, m_big)
    elif field.p != p or field.m != m_big:
        raise ParameterError("field does not match the requested tower")
    n1 = field.n1
    v_st = (q ** (s * t) - 1) // (q - 1)
    v_t = (q ** t - 1) // (q - 1)
    u = (q ** (s * t) - 1) // (q ** t - 1)  # subfield exponent step; = v_st/v_t

    # relative trace-one set of the top layer, projected to Z_{v_st}
    te_top = field.trace_exponents(e * t)
    R_top = np.flatnonzero(te_top == 0).astype(np.int64)
    rtilde = np.unique(R_top % v_st)
    if len(rtilde) != len(R_top):
        raise InternalInconsistencyError("top-layer projection lost elements")

    # Singer set of the middle layer built inside the subfield F_{q^t}
    sub_exps = np.arange(q ** t - 1, dtype=np.int64) * u
    acc = sub_exps.copy()
    for i in range(1, t):
        acc = field.add_array(acc, (sub_exps * pow(q, i, n1)) % n1)
    R_sub = np.flatnonzero(acc == 0).astype(np.int64)  # small exponents j
    s_sub = np.unique(R_sub % v_t)
    if len(s_sub) != len(R_sub):
        raise InternalInconsistencyError("sub-layer projection lost elements")
    w_sub = _weighing_from_R(R_sub, v_t) if t % 2 == 1 else np.zeros(0, np.int64)

    # full-tower Singer set
    te_all = field.trace_exponents(e)
    S_big = np.unique(np.flatnonzero(te_all == 0).astype(np.int64) % v_st)

    comps = GmwComponents(p=p, e=e, t=t, s=s, field=field,
                          rtilde=tuple(int(x) for x in rtilde),
                          s_sub=tuple(int(x) for x in s_sub),
                          w_sub=tuple(int(x) for x in w_sub),
                          s_big=tuple(int(x) for x in S_big))
    if verify:
        _verify_gmw(comps)
    return comps


def _verify_gmw(c: GmwComponents) -> None:
    G = CyclicGroup(c.v_st)
    Rt = GroupRingElement.from_indices(G, c.rtilde)
    Semb = GroupRingElement.from_indices(G, c.embed(c.s_sub))
    Sbig = GroupRingElement.from_indices(G, c.s_big)
    if Rt * Semb != Sbig:
        raise InternalInconsistencyError("layer composition identity failed")
    m, n, k, lam = c.rtilde_rds_params()
    subgroup = [i * c.embed_step for i in range(n)]
    if not is_relative_difference_set(Rt, subgroup, m, n, k, lam):
        raise InternalInconsistencyError(
            "top-layer projection is not a relative difference set")
    # trace composition: tr_{q^{st}/q} = tr_{q^t/q} after tr_{q^{st}/q^t}
    F = c.field
    rng = np.random.default_rng(0)
    q = c.q
    for x in rng.integers(0, F.n1, size=32):
        inner = F.rel_trace(c.e * c.t, int(x))
        acc = inner
        for i in range(1, c.t):
            acc = F.add(acc, F.pow(inner, pow(q, i, F.n1)))
        if acc != F.rel_trace(c.e, int(x)):
            raise InternalInconsistencyError("trace tower composition failed")
