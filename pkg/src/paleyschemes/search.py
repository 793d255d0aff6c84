"""Sweeps over candidate X subsets, shardable and checkpointable.

Three searches are provided.  `search_all_X` tries every subset of Z_v
and is only for tiny v.  `search_galois_invariant` tries the subsets
fixed by i -> p*i, which shrinks the exponent from v to the number of
multiplier orbits and brings degree-five fields into reach.  Both rest
on the same divisibility filter: X passes iff every coefficient of
X^(-1) * W is a multiple of q^((l-1)/2) down in Z_v.

The shared engine walks candidates in binary reflected Gray-code order
and keeps the residue vector r = X^(-1) * W mod q^((l-1)/2) up to date
incrementally.  Each orbit o contributes a fixed vector C_o, and one
Gray step toggles exactly one orbit, so a step costs a single vector
add.  Candidates with r = 0 are re-verified through the additive
identity before being recorded; a disagreement there means the residue
arithmetic is broken and raises instead of being swallowed.  For speed
the low few Gray bits are evaluated against a precomputed table whose
rows follow the same Gray order, so blocks run at numpy speed while
the visit order stays identical to the plain walk.

`search_cyclotomic_unions` is different: it works in the field proper,
testing every union of power-residue classes with the additive
identity directly, so it also covers even extension degrees.

Long runs split into shards, contiguous Gray ranges with the entry
residue vector precomputed.  A shard flushes progress to a JSON-lines
checkpoint file through a temp-file-and-rename write, and resuming
from whatever survived a kill reproduces the uninterrupted output.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import (BudgetExceededError, InternalInconsistencyError,
                     ParameterError, PreconditionError)
from .fields import get_field
from .groupring import CyclicGroup, GroupRingElement
from .schemes import SchemeRecord, build_DX, verify_additive
from .singer import singer_bundle

ENGINE_VERSION = "gray-block/1"
DEFAULT_MAX_V = 16
DEFAULT_MAX_ORBITS = 26
DEFAULT_MAX_CLASSES = 16
DEFAULT_FLUSH_EVERY = 1 << 20
_BLOCK_BITS = 12

KINDS = ("all_X", "galois_orbits", "cyclotomic_unions")


@dataclass(frozen=True)
class Shard:
    """One contiguous block of Gray positions out of a plan of `of`."""

    index: int
    of: int
    start: int
    stop: int
    residue: tuple[int, ...]


@dataclass(frozen=True)
class SearchSpace:
    """A candidate family: one bit per orbit, 2^orbits subsets in all.

    For the two residue-filtered kinds the orbits partition Z_v; for
    cyclotomic unions they are the power-residue classes and partition
    the exponent range of the unit group instead.
    """

    kind: str
    p: int
    e: int
    l: int
    orbits: tuple[tuple[int, ...], ...]
    shard: Optional[Shard] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown search kind {self.kind!r}")
        flat = sorted(x for orbit in self.orbits for x in orbit)
        span = self.v if self.kind != "cyclotomic_unions" else self.n1
        if flat != list(range(span)):
            raise ParameterError("orbits do not partition the index range")
        if self.shard is not None:
            s = self.shard
            if not 0 <= s.start <= s.stop <= self.candidates:
                raise ParameterError("shard range outside the Gray range")

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
    def candidates(self) -> int:
        return 1 << len(self.orbits)


@dataclass(frozen=True)
class SearchResult:
    """Sorted list of hits plus an honesty note about coverage."""

    space: SearchSpace
    found: tuple[tuple[int, ...], ...]
    note: Optional[str]

    @property
    def complete(self) -> bool:
        """Whether the candidate family provably contains every scheme
        the search claims to look for (Galois-invariant ones for the
        orbit kind).  Over base fields other than F_3 a scheme need
        not be a half-point set, so the sweep sees only part of the
        landscape and this is False."""
        return self.note is None

    def to_json(self) -> dict:
        out = {
            "kind": self.space.kind,
            "tower": [self.space.p, self.space.e, self.space.l],
            "orbit_count": len(self.space.orbits),
            "candidates": self.space.candidates,
            "complete": self.complete,
            "found": [list(x) for x in self.found],
        }
        if self.note is not None:
            out["note"] = self.note
        return out


def orbits_under_multiplier(v: int, t: int) -> tuple[tuple[int, ...], ...]:
    """Partition of Z_v into orbits of i -> t*i, ordered by least member."""
    if v < 1:
        raise ParameterError("v must be positive")
    t %= v
    if math.gcd(t, v) != 1:
        raise ParameterError(f"multiplier {t} is not a unit mod {v}")
    seen = np.zeros(v, dtype=bool)
    orbits = []
    for i in range(v):
        if seen[i]:
            continue
        orbit = []
        j = i
        while not seen[j]:
            seen[j] = True
            orbit.append(j)
            j = j * t % v
        orbits.append(tuple(sorted(orbit)))
    return tuple(orbits)


def all_subsets_space(p: int, e: int, l: int, *,
                      max_v: int = DEFAULT_MAX_V) -> SearchSpace:
    """Every subset of Z_v as its own candidate (2^v of them)."""
    _check_tower(p, e, l)
    q = p ** e
    v = (q ** l - 1) // (q - 1)
    if v > max_v:
        raise BudgetExceededError(
            f"2^{v} subsets of Z_{v} exceed the sweep budget (v <= {max_v})",
            spent=v)
    return SearchSpace("all_X", p, e, l, tuple((i,) for i in range(v)))


def galois_space(p: int, e: int, l: int, *,
                 max_orbits: int = DEFAULT_MAX_ORBITS) -> SearchSpace:
    """Subsets of Z_v fixed by i -> p*i, one bit per multiplier orbit."""
    _check_tower(p, e, l)
    q = p ** e
    v = (q ** l - 1) // (q - 1)
    orbits = orbits_under_multiplier(v, p)
    if len(orbits) > max_orbits:
        raise BudgetExceededError(
            f"{len(orbits)} multiplier orbits exceed the sweep budget "
            f"(<= {max_orbits})", spent=len(orbits))
    return SearchSpace("galois_orbits", p, e, l, orbits)


def cyclotomic_space(p: int, m: int, n_classes: int, *,
                     max_classes: int = DEFAULT_MAX_CLASSES) -> SearchSpace:
    """Unions of the n-th power classes C_j = {g^i : i = j mod n} in F_{p^m}."""
    get_field(p, m)
    n1 = p ** m - 1
    if n_classes < 2 or n1 % n_classes != 0:
        raise ParameterError(
            f"class count {n_classes} does not divide {n1}")
    if n_classes % 2 != 0:
        raise PreconditionError(
            "an odd class count cannot make half-size unions")
    if n_classes > max_classes:
        raise BudgetExceededError(
            f"2^{n_classes} unions exceed the sweep budget "
            f"(<= {max_classes} classes)", spent=n_classes)
    classes = tuple(tuple(range(j, n1, n_classes)) for j in range(n_classes))
    return SearchSpace("cyclotomic_unions", p, 1, m, classes)


def _check_tower(p: int, e: int, l: int) -> None:
    if e < 1 or l < 1:
        raise ParameterError("tower exponents must be positive")
    get_field(p, 1)
    if l % 2 == 0:
        raise PreconditionError("the divisibility filter needs odd l")


# -- the incremental residue engine --------------------------------------------


def _gray(n: int) -> int:
    return n ^ (n >> 1)


def _modulus(space: SearchSpace) -> int:
    return space.q ** ((space.l - 1) // 2)


def _contributions(space: SearchSpace) -> np.ndarray:
    """Per-orbit residue vectors: row o is reverse(orbit_o) * W mod q^((l-1)/2).

    Summing the rows of a subset of orbits gives the residue vector of
    their union, because reversal and convolution are additive over
    disjoint unions.
    """
    bundle = singer_bundle(space.p, space.e, space.l)
    W = bundle.weighing_element()
    M = _modulus(space)
    Zv = CyclicGroup(space.v)
    rows = [
        (GroupRingElement.from_indices(Zv, orbit).power_map(-1) * W).coeffs % M
        for orbit in space.orbits
    ]
    return np.array(rows, dtype=np.int64)


def _residue_at(contrib: np.ndarray, M: int, mask: int) -> np.ndarray:
    """Residue vector of the orbit subset encoded by the bits of mask."""
    r = np.zeros(contrib.shape[1], dtype=np.int64)
    o = 0
    while mask:
        if mask & 1:
            r += contrib[o]
        mask >>= 1
        o += 1
    return r % M


def _dtype_for(M: int):
    for dt in (np.uint8, np.uint16, np.uint32):
        if 2 * (M - 1) <= np.iinfo(dt).max:
            return dt
    return np.int64


def _low_tables(contrib: np.ndarray, M: int, B: int, dtype):
    """Residues of the 2^B low-orbit patterns, rows in Gray order.

    The second table is the first with orbit B-1 toggled in every row,
    which is how the low pattern looks whenever the high half of the
    position is odd.
    """
    v = contrib.shape[1]
    L = np.zeros((1, v), dtype=np.int64)
    for j in range(B):
        L = np.concatenate([L, (L[::-1] + contrib[j]) % M])
    if B == 0:
        return L.astype(dtype), L.astype(dtype)
    half = 1 << (B - 1)
    Lodd = np.concatenate([(L[:half] + contrib[B - 1]) % M,
                           (L[half:] - contrib[B - 1]) % M])
    return L.astype(dtype), Lodd.astype(dtype)


def _scan_range(contrib: np.ndarray, M: int, tables, B: int,
                start: int, stop: int) -> list[int]:
    """Gray positions in [start, stop) whose residue vector vanishes."""
    hits: list[int] = []
    if start >= stop:
        return hits
    size = 1 << B
    dtype = tables[0].dtype
    hi = start >> B
    r_high = (_residue_at(contrib, M, (_gray(hi) << B)) % M).astype(dtype)
    g0 = start
    while g0 < stop:
        hi = g0 >> B
        base = hi << B
        g1 = min(stop, base + size)
        R = tables[hi & 1][g0 - base:g1 - base] + r_high
        R[R >= M] -= M
        for z in np.flatnonzero(~R.any(axis=1)):
            hits.append(g0 + int(z))
        if g1 < stop and g1 == base + size:
            diff = _gray(hi) ^ _gray(hi + 1)
            o = B + diff.bit_length() - 1
            step = contrib[o] if _gray(hi + 1) & diff else -contrib[o]
            r_high = ((r_high.astype(np.int64) + step) % M).astype(dtype)
        g0 = g1
    return hits


def _subset_of(space: SearchSpace, position: int) -> tuple[int, ...]:
    """The candidate X at a Gray position: union of the flagged orbits."""
    mask = _gray(position)
    members: list[int] = []
    o = 0
    while mask:
        if mask & 1:
            members.extend(space.orbits[o])
        mask >>= 1
        o += 1
    return tuple(sorted(members))


def _verified_hit(space: SearchSpace, position: int, field) -> tuple[int, ...]:
    X = _subset_of(space, position)
    rec = build_DX(space.p, space.e, space.l, X, field=field,
                   provenance="search")
    if not verify_additive(rec):
        raise InternalInconsistencyError(
            f"the residue filter emitted X of size {len(X)} that fails the "
            "additive identity; the incremental arithmetic is broken")
    return X


# -- shards and checkpoints -----------------------------------------------------


def shard_plan(space: SearchSpace, n_shards: int) -> list[SearchSpace]:
    """Split the Gray range into n contiguous blocks with entry residues.

    Boundaries sit at positions k * 2^orbits / n (integer division), so
    the blocks cover the range exactly once; shard k of a larger plan
    may come out empty when there are more shards than candidates.
    """
    if n_shards < 1:
        raise ParameterError("need at least one shard")
    if space.shard is not None:
        raise ParameterError("the space is already a single shard")
    if space.kind == "cyclotomic_unions":
        raise ParameterError("class-union sweeps are small and not sharded")
    contrib = _contributions(space)
    M = _modulus(space)
    total = space.candidates
    out = []
    for k in range(n_shards):
        lo = k * total // n_shards
        hi = (k + 1) * total // n_shards
        residue = ()
        if lo < hi:
            residue = tuple(int(x) for x in _residue_at(contrib, M, _gray(lo)))
        out.append(replace(space, shard=Shard(k, n_shards, lo, hi, residue)))
    return out


def _atomic_write(path: Path, records: list[dict]) -> None:
    tmp = path.with_suffix(".tmp")
    tmp.write_text("".join(json.dumps(r) + "\n" for r in records))
    os.replace(tmp, path)


def _validate_checkpoint(recd: dict, shard: Shard, contrib: np.ndarray,
                         M: int) -> None:
    if recd.get("engine") != ENGINE_VERSION:
        raise ParameterError(
            f"checkpoint from engine {recd.get('engine')!r} cannot drive "
            f"engine {ENGINE_VERSION!r}")
    if recd.get("shard") != shard.index:
        raise ParameterError("checkpoint shard id does not match the plan")
    pos = recd.get("gray_pos")
    if not isinstance(pos, int) or not shard.start < pos <= shard.stop:
        raise ParameterError("checkpoint position lies outside the shard")
    expect = _residue_at(contrib, M, _gray(pos - 1))
    if [int(x) for x in expect] != list(recd.get("residue", [])):
        raise InternalInconsistencyError(
            "checkpoint residue snapshot does not match its position; the "
            "file was not written by a run over this space")


def _run_shard(sub: SearchSpace, contrib: np.ndarray, M: int, tables,
               B: int, field, dir_path: Optional[Path],
               flush_every: int) -> list[tuple[int, ...]]:
    shard = sub.shard
    path = dir_path / f"shard-{shard.index:04d}.jsonl" if dir_path else None
    records: list[dict] = []
    found: list[tuple[int, ...]] = []
    pos = shard.start
    if path is not None and path.exists():
        lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
        records = [json.loads(ln) for ln in lines]
        for recd in records:
            _validate_checkpoint(recd, shard, contrib, M)
            found.extend(tuple(int(x) for x in X) for X in recd["found"])
            pos = recd["gray_pos"]
    elif shard.residue and pos < shard.stop:
        entry = _residue_at(contrib, M, _gray(pos))
        if tuple(int(x) for x in entry) != shard.residue:
            raise InternalInconsistencyError(
                "shard entry residue does not match the plan")
    while pos < shard.stop:
        upto = min(shard.stop, (pos // flush_every + 1) * flush_every)
        new = [_verified_hit(sub, g, field)
               for g in _scan_range(contrib, M, tables, B, pos, upto)]
        found.extend(new)
        pos = upto
        if path is not None:
            records.append({
                "shard": shard.index,
                "gray_pos": pos,
                "found": [list(x) for x in new],
                "engine": ENGINE_VERSION,
                "residue": [int(x) for x in _residue_at(contrib, M,
                                                        _gray(pos - 1))],
            })
            _atomic_write(path, records)
    return found


def _coverage_note(space: SearchSpace) -> Optional[str]:
    if space.kind == "cyclotomic_unions":
        return ("only unions of the chosen power-residue classes are "
                "enumerated; schemes outside that lattice are not seen")
    if space.q != 3:
        return ("candidates are restricted to half-point sets D(X); over "
                "base fields other than F_3 skewness does not force that "
                "shape, so invariant schemes outside it are not seen")
    return None


def _run_residue_search(space: SearchSpace, *, n_shards: int = 1,
                        checkpoint_dir=None, threads: int = 1,
                        flush_every: int = DEFAULT_FLUSH_EVERY,
                        block_bits: Optional[int] = None) -> SearchResult:
    if flush_every < 1:
        raise ParameterError("flush interval must be positive")
    contrib = _contributions(space)
    M = _modulus(space)
    B = _BLOCK_BITS if block_bits is None else block_bits
    B = max(0, min(B, len(space.orbits)))
    tables = _low_tables(contrib, M, B, _dtype_for(M))
    field = get_field(space.p, space.e * space.l)
    dir_path = None
    if checkpoint_dir is not None:
        dir_path = Path(checkpoint_dir)
        dir_path.mkdir(parents=True, exist_ok=True)
    shards = shard_plan(space, n_shards)

    def work(sub):
        return _run_shard(sub, contrib, M, tables, B, field, dir_path,
                          flush_every)

    if threads > 1 and len(shards) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_shard = list(pool.map(work, shards))
    else:
        per_shard = [work(sub) for sub in shards]
    found = sorted(X for part in per_shard for X in part)
    return SearchResult(space=space, found=tuple(found),
                        note=_coverage_note(space))


# -- public sweeps --------------------------------------------------------------


def search_all_X(p: int, e: int, l: int, *, max_v: int = DEFAULT_MAX_V,
                 block_bits: Optional[int] = None) -> SearchResult:
    """Complete sweep of every X in Z_v; sorted list of the valid ones."""
    space = all_subsets_space(p, e, l, max_v=max_v)
    return _run_residue_search(space, block_bits=block_bits)


def search_galois_invariant(p: int, e: int, l: int, *, n_shards: int = 1,
                            checkpoint_dir=None, threads: int = 1,
                            flush_every: int = DEFAULT_FLUSH_EVERY,
                            max_orbits: int = DEFAULT_MAX_ORBITS,
                            block_bits: Optional[int] = None) -> SearchResult:
    """Complete sweep of the X fixed by i -> p*i, shardable and resumable.

    With a checkpoint directory the run can be killed and restarted; a
    restart picks up each shard at its last flushed position and the
    final output is identical to an uninterrupted run.
    """
    space = galois_space(p, e, l, max_orbits=max_orbits)
    return _run_residue_search(space, n_shards=n_shards,
                               checkpoint_dir=checkpoint_dir, threads=threads,
                               flush_every=flush_every, block_bits=block_bits)


def search_cyclotomic_unions(p: int, m: int, n_classes: int, *,
                             max_classes: int = DEFAULT_MAX_CLASSES
                             ) -> SearchResult:
    """Test every union of power-residue classes with the additive identity.

    Works for any extension degree, even ones included, because it never
    leaves the field; the price is that only 2^n_classes candidates are
    seen.  Found entries are the unions' exponent sets.
    """
    space = cyclotomic_space(p, m, n_classes, max_classes=max_classes)
    field = get_field(p, m)
    found = []
    for position in range(space.candidates):
        D = _subset_of(space, position)
        rec = SchemeRecord(field=field, e=1, l=m, D=D, X=None,
                           provenance="search", verified_by=frozenset())
        if verify_additive(rec):
            found.append(D)
    return SearchResult(space=space, found=tuple(sorted(found)),
                        note=_coverage_note(space))
