"""Half-point subsets of F_{q^l} and the machinery that certifies them.

A candidate set D lives in the unit group and is stored as a sorted list of
discrete-log exponents.  The defining identity

    (1 + 2 D^(-1)) (1 + 2 D)  =  |G| + (|G| - 1) G      in Z[(F_{q^l}, +)]

is checked by direct expansion (`additive`), or through three cheaper
equivalent routes that exploit the trace structure of the field:
divisibility of D^(-1) * R by q^((l-1)/2) in the unit group
(`multiplicative`), the same divisibility for X^(-1) * W down in Z_v
(`quotient`), and integrality of the dual construction (`dual`).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Iterable, Optional

import numpy as np

from .errors import (InternalInconsistencyError, ParameterError,
                     PreconditionError, VerificationFailedError)
from .fields import FiniteField, get_field
from .groupring import CyclicGroup, FieldAdditiveGroup, GroupRingElement
from .singer import SingerBundle, build_singer_bundle, singer_bundle

PROVENANCES = ("paley", "adp", "cyclotomic", "langevin", "gmw_lift",
               "union", "search", "manual")
METHODS = ("additive", "multiplicative", "quotient", "dual")


@dataclass(frozen=True)
class SchemeRecord:
    """A subset of the unit group of F_{p^{e l}} plus its certification state."""

    field: FiniteField
    e: int
    l: int
    D: tuple[int, ...]
    X: Optional[tuple[int, ...]]
    provenance: str
    verified_by: frozenset[str]

    def __post_init__(self):
        if self.field.m != self.e * self.l:
            raise ParameterError("field degree does not factor as e * l")
        if self.provenance not in PROVENANCES:
            raise ParameterError(f"unknown provenance {self.provenance!r}")
        bad = self.verified_by - set(METHODS)
        if bad:
            raise ParameterError(f"unknown verification tokens {sorted(bad)}")
        D = np.asarray(self.D, dtype=np.int64)
        if len(D) and (D.min() < 0 or D.max() >= self.n1):
            raise ParameterError("exponent out of range")
        if len(np.unique(D)) != len(D) or not np.all(np.diff(D) > 0):
            raise ParameterError("D must be sorted and duplicate-free")
        if self.X is not None:
            X = np.asarray(self.X, dtype=np.int64)
            if len(X) and (X.min() < 0 or X.max() >= self.v):
                raise ParameterError("X residue out of range")
            if len(np.unique(X)) != len(X):
                raise ParameterError("X must be duplicate-free")

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def q(self) -> int:
        return self.p ** self.e

    @property
    def v(self) -> int:
        return (self.q ** self.l - 1) // (self.q - 1)

    @property
    def n1(self) -> int:
        return self.q ** self.l - 1

    @property
    def tower(self) -> tuple[int, int, int]:
        return (self.p, self.e, self.l)

    def unit_element(self) -> GroupRingElement:
        """D as an element of Z[Z_{q^l - 1}]."""
        return GroupRingElement.from_indices(CyclicGroup(self.n1), self.D)

    def additive_element(self) -> GroupRingElement:
        """D as an element of Z[(F, +)]; exponent i sits at index 1 + i."""
        G = FieldAdditiveGroup(self.field)
        return GroupRingElement.from_indices(
            G, np.asarray(self.D, dtype=np.int64) + 1)

    def to_json(self) -> dict:
        out = {
            "field": {"p": self.p, "e": self.e, "l": self.l,
                      "modulus": list(self.field.modulus)},
            "D": list(self.D),
            "provenance": self.provenance,
            "verified_by": sorted(self.verified_by),
        }
        if self.X is not None:
            out["X"] = list(self.X)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "SchemeRecord":
        fd = data["field"]
        field = FiniteField(fd["p"], fd["e"] * fd["l"],
                            modulus=tuple(fd["modulus"]))
        return cls(field=field, e=fd["e"], l=fd["l"],
                   D=tuple(int(x) for x in data["D"]),
                   X=tuple(int(x) for x in data["X"]) if "X" in data else None,
                   provenance=data["provenance"],
                   verified_by=frozenset(data["verified_by"]))


def _bundle_for(rec: SchemeRecord) -> SingerBundle:
    default = get_field(rec.p, rec.field.m)
    if rec.field == default:
        return singer_bundle(rec.p, rec.e, rec.l)
    return build_singer_bundle(rec.p, rec.e, rec.l, field=rec.field,
                               verify=False)


# -- construction -------------------------------------------------------------


def build_DX(p: int, e: int, l: int, X: Iterable[int],
             field: Optional[FiniteField] = None,
             provenance: str = "manual") -> SchemeRecord:
    """Parity rule: g^i goes in iff (i even) agrees with (i mod v in X)."""
    if field is None:
        field = get_field(p, e * l)
    q = p ** e
    n1 = q ** l - 1
    v = n1 // (q - 1)
    X = tuple(sorted({int(x) for x in X}))
    if X and (X[0] < 0 or X[-1] >= v):
        raise ParameterError(f"X must lie in 0..{v - 1}")
    if l % 2 == 0:
        warnings.warn("even l: the half-size guarantee does not apply",
                      stacklevel=2)
    xind = np.zeros(v, dtype=bool)
    if X:
        xind[list(X)] = True
    i = np.arange(n1, dtype=np.int64)
    member = (i % 2 == 0) == xind[i % v]
    D = tuple(int(t) for t in np.flatnonzero(member))
    return SchemeRecord(field=field, e=e, l=l, D=D, X=X,
                        provenance=provenance, verified_by=frozenset())


def is_half_point(rec: SchemeRecord) -> bool:
    """Union of base-square cosets meeting each unit-coset of F_q in half."""
    v, n1 = rec.v, rec.n1
    full = n1 // (2 * v)  # (q - 1) / 2
    cls = np.bincount(np.asarray(rec.D, dtype=np.int64) % (2 * v),
                      minlength=2 * v)
    if not np.all((cls == 0) | (cls == full)):
        return False
    return bool(np.all(cls[:v] + cls[v:] == full))


def recover_X(rec: SchemeRecord) -> tuple[int, ...]:
    if rec.l % 2 == 0:
        raise PreconditionError("X recovery needs odd l")
    if not is_half_point(rec):
        raise PreconditionError("not a half-point set; X is undefined")
    D = np.asarray(rec.D, dtype=np.int64)
    return tuple(int(t) for t in np.unique(D[D % 2 == 0] % rec.v))


# -- verification routes -------------------------------------------------------


def verify_additive(rec: SchemeRecord) -> bool:
    """Expand the defining identity in the additive group ring."""
    G = FieldAdditiveGroup(rec.field)
    T = GroupRingElement.identity(G) + 2 * rec.additive_element()
    lhs = T.power_map(-1) * T
    order = rec.n1 + 1
    rhs = order * GroupRingElement.identity(G) + \
        (order - 1) * GroupRingElement.all_ones(G)
    return lhs == rhs


def verify_multiplicative(rec: SchemeRecord) -> bool:
    """Divisibility of D^(-1) * R by q^((l-1)/2) in the unit group."""
    if rec.l % 2 == 0:
        raise PreconditionError("route needs odd l")
    if not is_half_point(rec):
        raise PreconditionError("route applies to half-point sets only")
    R = GroupRingElement.from_indices(CyclicGroup(rec.n1), _bundle_for(rec).R)
    prod = rec.unit_element().power_map(-1) * R
    return prod.scalar_divisible(rec.q ** ((rec.l - 1) // 2))


def verify_quotient(p: int, e: int, l: int, X: Iterable[int],
                    field: Optional[FiniteField] = None) -> bool:
    """Divisibility of X^(-1) * W by q^((l-1)/2) down in Z_v."""
    if l % 2 == 0:
        raise PreconditionError("route needs odd l")
    if field is None:
        field = get_field(p, e * l)
    if field == get_field(p, e * l):
        bundle = singer_bundle(p, e, l)
    else:
        bundle = build_singer_bundle(p, e, l, field=field, verify=False)
    v = bundle.v
    X = sorted({int(x) for x in X})
    if X and (X[0] < 0 or X[-1] >= v):
        raise ParameterError(f"X must lie in 0..{v - 1}")
    Xel = GroupRingElement.from_indices(CyclicGroup(v), X)
    prod = Xel.power_map(-1) * bundle.weighing_element()
    return prod.scalar_divisible((p ** e) ** ((l - 1) // 2))


def _dual_coefficients(rec: SchemeRecord) -> tuple[np.ndarray, int, int]:
    Q = rec.q ** ((rec.l - 1) // 2)
    c = (rec.q ** (rec.l - 1) - Q) // 2
    R = GroupRingElement.from_indices(CyclicGroup(rec.n1), _bundle_for(rec).R)
    prod = rec.unit_element().power_map(-1) * R
    return prod.coeffs - c, Q, c


def verify_dual(rec: SchemeRecord) -> bool:
    """True iff the dual construction lands on a genuine 0/1 subset."""
    if rec.l % 2 == 0:
        raise PreconditionError("route needs odd l")
    if not is_half_point(rec):
        raise PreconditionError("route applies to half-point sets only")
    shifted, Q, _ = _dual_coefficients(rec)
    return bool(np.all((shifted == 0) | (shifted == Q)))


def verify_scheme(rec: SchemeRecord, method: str = "additive") -> bool:
    if method == "additive":
        return verify_additive(rec)
    if method == "multiplicative":
        return verify_multiplicative(rec)
    if method == "quotient":
        X = rec.X if rec.X is not None else recover_X(rec)
        return verify_quotient(rec.p, rec.e, rec.l, X, field=rec.field)
    if method == "dual":
        return verify_dual(rec)
    raise ParameterError(f"unknown method {method!r}")


def certify(rec: SchemeRecord, methods=("additive",),
            strict: bool = True) -> SchemeRecord:
    """Run the requested routes and stamp those that pass.

    With strict=True a failing route raises; routes whose preconditions do
    not apply are skipped either way (that is not a failure).
    """
    if methods == "all":
        methods = METHODS
    stamps = set(rec.verified_by)
    for method in methods:
        try:
            ok = verify_scheme(rec, method)
        except PreconditionError:
            continue
        if ok:
            stamps.add(method)
        elif strict:
            raise VerificationFailedError(
                f"{method} verification failed for D of size {len(rec.D)} "
                f"over F_{rec.p}^{rec.field.m}")
    return replace(rec, verified_by=frozenset(stamps))


# -- dual and unit transforms --------------------------------------------------


def dual_scheme(rec: SchemeRecord) -> SchemeRecord:
    """The subset D-hat defined by D^(-1) * R = Q D-hat + c F*."""
    if not rec.verified_by:
        raise PreconditionError("dual of an unverified record is not defined")
    if rec.l % 2 == 0 or not is_half_point(rec):
        raise PreconditionError("dual needs odd l and a half-point set")
    shifted, Q, _ = _dual_coefficients(rec)
    if not np.all((shifted == 0) | (shifted == Q)):
        raise InternalInconsistencyError(
            "verified record produced a non 0/1 dual; verification stamps "
            "and the dual identity disagree")
    D = tuple(int(t) for t in np.flatnonzero(shifted == Q))
    return _with_D(rec, D)


def _with_D(rec: SchemeRecord, D: tuple[int, ...]) -> SchemeRecord:
    new = replace(rec, D=D, X=None, verified_by=frozenset())
    if rec.l % 2 == 1 and is_half_point(new):
        new = replace(new, X=recover_X(new))
    return new


def scale(rec: SchemeRecord, s: int) -> SchemeRecord:
    """Multiply D by the unit g^s (exponent shift)."""
    D = tuple(sorted((i + s) % rec.n1 for i in rec.D))
    return _with_D(rec, D)


def frobenius(rec: SchemeRecord, k: int = 1) -> SchemeRecord:
    t = pow(rec.p, k, rec.n1)
    D = tuple(sorted(i * t % rec.n1 for i in rec.D))
    return _with_D(rec, D)


def negate(rec: SchemeRecord) -> SchemeRecord:
    return scale(rec, rec.n1 // 2)


def complement_units(rec: SchemeRecord) -> SchemeRecord:
    D = tuple(sorted(set(range(rec.n1)) - set(rec.D)))
    return _with_D(rec, D)
