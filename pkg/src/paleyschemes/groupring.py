"""Exact integer group-ring arithmetic over the two group kinds in play.

Supported groups: cyclic Z_n, and the additive group of a finite field.
Coefficient vectors are numpy int64 with an explicit overflow bound check;
when a product could leave the 64-bit range the convolution escalates to
arbitrary-precision Python integers instead of wrapping.

Coefficient indexing for field-additive groups is fixed for serialization:
index 0 is the zero field element and index 1 + i is g^i.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from . import ntt
from .errors import InternalInconsistencyError, ParameterError
from .fields import ZERO, FiniteField, field_from_descriptor

_INT64_SAFE = 2 ** 62
_SCHOOLBOOK_LIMIT = 20000


class CyclicGroup:
    """Z_n written additively; coefficient index = group element."""

    kind = "cyclic"

    def __init__(self, n: int):
        if n < 1:
            raise ParameterError(f"cyclic group order must be positive, got {n}")
        self.order = n

    def invert_indices(self, idx):
        return (-np.asarray(idx, dtype=np.int64)) % self.order

    def power_indices(self, idx, t: int):
        return (np.asarray(idx, dtype=np.int64) * (t % self.order)) % self.order

    def op_table_row(self, i: int) -> np.ndarray:
        """Permutation j -> i + j of coefficient indices."""
        return (np.arange(self.order, dtype=np.int64) + i) % self.order

    def descriptor(self) -> dict:
        return {"kind": "cyclic", "n": self.order}

    def __eq__(self, other):
        return isinstance(other, CyclicGroup) and other.order == self.order

    def __hash__(self):
        return hash(("cyclic", self.order))

    def __repr__(self):
        return f"CyclicGroup({self.order})"


class FieldAdditiveGroup:
    """(F_{p^m}, +); index 0 is the zero element, index 1+e is g^e."""

    kind = "field_additive"

    def __init__(self, field: FiniteField):
        self.field = field
        self.order = field.order

    def _exps(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        return np.where(idx == 0, ZERO, idx - 1)

    def _indices(self, exps):
        exps = np.asarray(exps, dtype=np.int64)
        return np.where(exps == ZERO, 0, exps + 1)

    def invert_indices(self, idx):
        F = self.field
        e = self._exps(idx)
        neg = np.where(e == ZERO, ZERO, (e + F.n1 // 2) % F.n1)
        return self._indices(neg)

    def power_indices(self, idx, t: int):
        # g^t in an additive group is the scalar multiple t*g
        F = self.field
        t_exp = F.dlog_of_int(t % F.p)
        e = self._exps(idx)
        if t_exp == ZERO:
            return np.zeros_like(e)
        out = np.where(e == ZERO, ZERO, (e + t_exp) % F.n1)
        return self._indices(out)

    def op_table_row(self, i: int) -> np.ndarray:
        """Permutation j -> (element_i + element_j) of coefficient indices."""
        F = self.field
        all_exps = np.concatenate(([ZERO], np.arange(F.n1, dtype=np.int64)))
        if i == 0:
            return np.arange(self.order, dtype=np.int64)
        summed = F.add_array(np.int64(i - 1), all_exps)
        return self._indices(summed)

    def descriptor(self) -> dict:
        return {"kind": "field_additive", "field": self.field.descriptor()}

    def __eq__(self, other):
        return isinstance(other, FieldAdditiveGroup) and other.field == self.field

    def __hash__(self):
        return hash(("field_additive", self.field))

    def __repr__(self):
        return f"FieldAdditiveGroup({self.field!r})"


def group_from_descriptor(desc: dict):
    if desc["kind"] == "cyclic":
        return CyclicGroup(int(desc["n"]))
    if desc["kind"] == "field_additive":
        return FieldAdditiveGroup(field_from_descriptor(desc["field"]))
    raise ParameterError(f"unknown group kind {desc.get('kind')!r}")


def _conv_cyclic(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    bound = min(int(np.abs(a).sum()) * int(np.abs(b).max(initial=0)),
                int(np.abs(b).sum()) * int(np.abs(a).max(initial=0)))
    if bound >= _INT64_SAFE:
        # escalate to arbitrary precision rather than risk wraparound
        out = [0] * n
        for i in np.flatnonzero(a):
            ai = int(a[i])
            for j in np.flatnonzero(b):
                out[(int(i) + int(j)) % n] += ai * int(b[j])
        return np.array(out, dtype=object)
    if n > _SCHOOLBOOK_LIMIT:
        lin = ntt.convolve_exact(a, b).astype(np.int64)
    else:
        lin = np.convolve(a, b)
    out = np.zeros(n, dtype=np.int64)
    for start in range(0, len(lin), n):
        chunk = lin[start:start + n]
        out[: len(chunk)] += chunk
    return out


class GroupRingElement:
    """Element of Z[G] as a dense integer coefficient vector."""

    def __init__(self, group, coeffs):
        if isinstance(coeffs, np.ndarray) and coeffs.dtype == object:
            arr = coeffs.copy()
        else:
            arr = np.array(coeffs, dtype=np.int64)
        if arr.shape != (group.order,):
            raise ParameterError(
                f"coefficient vector has length {arr.shape}, group order {group.order}")
        arr.setflags(write=False)
        self.group = group
        self.coeffs = arr

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, group):
        return cls(group, np.zeros(group.order, dtype=np.int64))

    @classmethod
    def identity(cls, group):
        c = np.zeros(group.order, dtype=np.int64)
        c[0] = 1
        return cls(group, c)

    @classmethod
    def all_ones(cls, group):
        return cls(group, np.ones(group.order, dtype=np.int64))

    @classmethod
    def from_indices(cls, group, indices: Iterable[int]):
        c = np.zeros(group.order, dtype=np.int64)
        idx = np.asarray(sorted(int(i) for i in indices), dtype=np.int64)
        if len(idx) and (idx.min() < 0 or idx.max() >= group.order):
            raise ParameterError("subset index out of range")
        if len(idx) != len(set(int(i) for i in idx)):
            raise ParameterError("subset indices must be distinct")
        c[idx] = 1
        return cls(group, c)

    # -- ring structure --------------------------------------------------------

    def _check_group(self, other: "GroupRingElement"):
        if self.group != other.group:
            raise ParameterError("group mismatch in group-ring operation")

    def __add__(self, other):
        self._check_group(other)
        return GroupRingElement(self.group, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check_group(other)
        return GroupRingElement(self.group, self.coeffs - other.coeffs)

    def __rmul__(self, scalar: int):
        if not isinstance(scalar, (int, np.integer)):
            return NotImplemented
        return GroupRingElement(self.group, self.coeffs * int(scalar))

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return GroupRingElement(self.group, self.coeffs * int(other))
        if isinstance(other, GroupRingElement):
            return self.convolve(other)
        return NotImplemented

    def __neg__(self):
        return GroupRingElement(self.group, -self.coeffs)

    def convolve(self, other: "GroupRingElement") -> "GroupRingElement":
        self._check_group(other)
        g = self.group
        if g.kind == "cyclic":
            return GroupRingElement(g, _conv_cyclic(self.coeffs, other.coeffs, g.order))
        # field-additive: accumulate permuted copies over the sparser support
        a, b = self.coeffs, other.coeffs
        if np.count_nonzero(a) > np.count_nonzero(b):
            a, b = b, a
        bound = int(np.abs(a).sum()) * int(np.abs(b).max(initial=0))
        dtype = object if bound >= _INT64_SAFE else np.int64
        out = np.zeros(g.order, dtype=dtype)
        bb = b if dtype is np.int64 else b.astype(object)
        for i in np.flatnonzero(a):
            row = g.op_table_row(int(i))
            out[row] += int(a[i]) * bb
        return GroupRingElement(g, out)

    def power_map(self, t: int) -> "GroupRingElement":
        """A^{(t)} = sum a_g g^t (accumulating when t is not a unit)."""
        g = self.group
        out = np.zeros(g.order, dtype=self.coeffs.dtype)
        idx = np.flatnonzero(self.coeffs)
        if len(idx):
            tgt = g.power_indices(idx, t)
            np.add.at(out, tgt, self.coeffs[idx])
        return GroupRingElement(g, out)

    # -- queries ---------------------------------------------------------------

    def coeff_sum(self) -> int:
        return int(self.coeffs.sum())

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.coeffs)

    def is_zero_one(self) -> bool:
        return bool(np.all((self.coeffs == 0) | (self.coeffs == 1)))

    def subset_indices(self) -> tuple[int, ...]:
        if not self.is_zero_one():
            raise ParameterError("element is not a 0/1 subset indicator")
        return tuple(int(i) for i in self.support())

    def scalar_divisible(self, d: int) -> bool:
        if d == 0:
            raise ParameterError("division by zero")
        return bool(np.all(self.coeffs % d == 0))

    def exact_scalar_div(self, d: int) -> "GroupRingElement":
        if not self.scalar_divisible(d):
            raise ParameterError(f"coefficients not divisible by {d}")
        return GroupRingElement(self.group, self.coeffs // d)

    def __eq__(self, other):
        return (isinstance(other, GroupRingElement)
                and self.group == other.group
                and bool(np.all(self.coeffs == other.coeffs)))

    def __hash__(self):
        return hash((self.group, self.coeffs.tobytes()
                     if self.coeffs.dtype != object else tuple(self.coeffs)))

    def __repr__(self):
        nz = np.count_nonzero(self.coeffs)
        return f"GroupRingElement({self.group!r}, support={nz})"

    # -- serialization -----------------------------------------------------------

    def to_json(self) -> dict:
        return {"group": self.group.descriptor(),
                "coeffs": [int(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "GroupRingElement":
        return cls(group_from_descriptor(data["group"]), data["coeffs"])


# -- difference set machinery ----------------------------------------------------


def _check_subgroup(group, indices: Sequence[int]) -> None:
    idx = sorted(int(i) for i in indices)
    if 0 not in idx:
        raise ParameterError("subgroup must contain the identity")
    members = set(idx)
    inv = group.invert_indices(np.array(idx))
    if not set(int(i) for i in inv) == members:
        raise ParameterError("subgroup candidate not closed under inverses")
    for i in idx:
        row = group.op_table_row(i)
        if not set(int(row[j]) for j in idx) <= members:
            raise ParameterError("subgroup candidate not closed under the operation")


def is_difference_set(D: GroupRingElement, v: int, k: int, lam: int) -> bool:
    """D D^{(-1)} = (k - lam) + lam * G, with parameter sanity enforced."""
    if D.group.order != v:
        raise ParameterError(f"group order {D.group.order} != v = {v}")
    if k * (k - 1) != lam * (v - 1):
        raise ParameterError(
            f"inconsistent difference-set parameters ({v},{k},{lam})")
    if not D.is_zero_one():
        raise ParameterError("difference set candidate must be a 0/1 subset")
    if D.coeff_sum() != k:
        return False
    prod = D.convolve(D.power_map(-1))
    expect = np.full(v, lam, dtype=np.int64)
    expect[0] = k
    return bool(np.all(prod.coeffs == expect))


def is_relative_difference_set(D: GroupRingElement, subgroup: Sequence[int],
                               m: int, n: int, k: int, lam: int) -> bool:
    """D D^{(-1)} = k + lam (G - N) relative to the subgroup N."""
    g = D.group
    if m * n != g.order:
        raise ParameterError(f"m*n = {m*n} != group order {g.order}")
    if m < 2:
        raise ParameterError("relative parameters degenerate: m must be >= 2")
    if len(set(int(i) for i in subgroup)) != n:
        raise ParameterError(f"forbidden subgroup has size {len(subgroup)} != n = {n}")
    _check_subgroup(g, subgroup)
    if not D.is_zero_one():
        raise ParameterError("candidate must be a 0/1 subset")
    if D.coeff_sum() != k:
        return False
    prod = D.convolve(D.power_map(-1))
    expect = np.full(g.order, lam, dtype=np.int64)
    expect[np.asarray(sorted(subgroup), dtype=np.int64)] = 0
    expect[0] = k
    return bool(np.all(prod.coeffs == expect))


def ds_quotient(P: GroupRingElement, A: GroupRingElement,
                params: tuple[int, int, int]) -> Optional[GroupRingElement]:
    """Exact quotient P / A when A is a (v,k,lam)-difference set.

    Since A A^{(-1)} = m + lam G with m = k - lam and k^2 = m + lam v, the
    inverse of A in the rational group algebra is
    A^{(-1)} (1 - (lam/k^2) G) / m, which collapses to the integer test:
    k (P * A^{(-1)}) - lam sigma(P) G must be divisible by m k coordinatewise.
    The candidate quotient is re-multiplied against A; only Q with Q A = P
    is returned, otherwise None.
    """
    v, k, lam = params
    if not is_difference_set(A, v, k, lam):
        raise ParameterError(f"A is not a ({v},{k},{lam}) difference set")
    if P.group != A.group:
        raise ParameterError("group mismatch between P and A")
    m = k - lam
    t = k * P.convolve(A.power_map(-1)) - (lam * P.coeff_sum()) * GroupRingElement.all_ones(P.group)
    if not t.scalar_divisible(m * k):
        return None
    Q = t.exact_scalar_div(m * k)
    if Q.convolve(A) != P:
        return None
    return Q
