"""Recursive driver producing exact joint cumulants of T_k and R_k statistics.

Every quantity lives in the {m, alpha} context.  Joint cumulants are indexed by
``CumulantKey(kind, k, l)`` meaning kappa_l(X_k, T, ..., T) with ``l - 1``
trailing copies of T = T_1.  The recursion only ever asks for keys of lower
total order, so a plain memo dictionary is enough to make it efficient.
"""

from __future__ import annotations

import enum
import json
import logging
import os
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from pathlib import Path
from typing import NamedTuple

from . import emit as _emit
from .combinat import set_partitions
from .exactalg import T_CONTEXT, RationalFunction
from .symexpr import Base, InvariantError, SymExpr, ddalpha, shift_m

log = logging.getLogger(__name__)

CACHE_SCHEMA = 1


class StatKind(enum.Enum):
    TK = "T"  # sum_i x_i^k ln x_i
    RK = "R"  # sum_i x_i^k


class CumulantKey(NamedTuple):
    kind: StatKind
    k: int
    l: int

    def validate(self) -> "CumulantKey":
        if not isinstance(self.kind, StatKind):
            raise ValueError(f"bad statistic kind {self.kind!r}")
        if self.k < 0 or self.l < 1:
            raise ValueError(f"invalid cumulant key {self}")
        return self

    @property
    def filename(self) -> str:
        return f"{self.kind.value}_{self.k}_{self.l}.json"

    def __str__(self) -> str:
        head = f"{self.kind.value}_{self.k}"
        return f"kappa_{self.l}({head}{', T' * (self.l - 1)})"


TK, RK = StatKind.TK, StatKind.RK


@lru_cache(maxsize=None)
def _block_shapes(s: int) -> tuple[tuple[int, tuple[int, ...], int], ...]:
    """Partitions of {1..s} grouped by (size of the block holding 1, sizes of the others)."""
    counts: Counter = Counter()
    for p in set_partitions(s):
        first = len(p[0])
        rest = tuple(sorted((len(b) for b in p[1:]), reverse=True))
        counts[(first, rest)] += 1
    return tuple((first, rest, c) for (first, rest), c in sorted(counts.items()))


class DiskCache:
    """One hash-verified JSON file per key."""

    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)

    def _path(self, key: CumulantKey) -> Path:
        return self.directory / key.filename

    def load(self, key: CumulantKey) -> SymExpr | None:
        path = self._path(key)
        try:
            payload = json.loads(path.read_text())
        except FileNotFoundError:
            return None
        except (OSError, ValueError) as exc:
            log.warning("unreadable cache entry %s: %s", path, exc)
            return None
        try:
            if payload.get("cache_schema") != CACHE_SCHEMA:
                raise ValueError("cache schema mismatch")
            expr = _emit.from_json(payload["expr"])
            if _emit.content_hash(expr) != payload.get("sha256"):
                raise ValueError("content hash mismatch")
        except (KeyError, ValueError, TypeError) as exc:
            log.warning("discarding cache entry %s: %s", path, exc)
            return None
        return expr

    def store(self, key: CumulantKey, expr: SymExpr) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        payload = {
            "cache_schema": CACHE_SCHEMA,
            "key": {"kind": key.kind.value, "k": key.k, "l": key.l},
            "expr": _emit.to_json(expr),
            "sha256": _emit.content_hash(expr),
        }
        tmp = self._path(key).with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, sort_keys=True, separators=(",", ":")))
        os.replace(tmp, self._path(key))

    def clear(self) -> int:
        n = 0
        if self.directory.is_dir():
            for p in self.directory.glob("*_*_*.json"):
                p.unlink()
                n += 1
        return n

    def entries(self) -> list[str]:
        if not self.directory.is_dir():
            return []
        return sorted(p.name for p in self.directory.glob("*_*_*.json"))


class CumulantEngine:
    """Memoized evaluation of joint cumulants kappa_l(X_k, T, ..., T)."""

    max_depth = 500

    def __init__(self, cache_dir: str | os.PathLike | None = None):
        self.store: dict[CumulantKey, SymExpr] = {}
        self.disk = DiskCache(cache_dir) if cache_dir is not None else None
        self._plus: dict[CumulantKey, SymExpr] = {}
        self._minus: dict[CumulantKey, SymExpr] = {}
        self._active: list[CumulantKey] = []
        self._mean_R_alt: dict[int, SymExpr] = {}
        self.ctx = T_CONTEXT
        self.m = self.ctx.gen("m")
        self.alpha = self.ctx.gen("alpha")

    # -- small helpers ----------------------------------------------------
    def _const(self, c) -> SymExpr:
        return SymExpr.rational(c, self.ctx)

    def _poly(self, p) -> SymExpr:
        return SymExpr.rational(RationalFunction(p))

    def kappa(self, kind: StatKind, k: int, l: int = 1) -> SymExpr:
        return self.joint_cumulant(CumulantKey(kind, k, l))

    def plus_diff(self, key: CumulantKey) -> SymExpr:
        """kappa^+ - kappa for the given key."""
        hit = self._plus.get(key)
        if hit is None:
            e = self.joint_cumulant(key)
            hit = shift_m(e, 1) - e
            self._plus[key] = hit
        return hit

    def minus_diff(self, key: CumulantKey) -> SymExpr:
        """kappa^- - kappa for the given key."""
        hit = self._minus.get(key)
        if hit is None:
            e = self.joint_cumulant(key)
            hit = shift_m(e, -1) - e
            self._minus[key] = hit
        return hit

    # -- means ------------------------------------------------------------
    def mean_R(self, k: int) -> SymExpr:
        return self.kappa(RK, k)

    def mean_T(self, k: int) -> SymExpr:
        return self.kappa(TK, k)

    def _mean_R_compute(self, k: int) -> SymExpr:
        if k == 0:
            return self._poly(self.m)
        prev = self.kappa(RK, k - 1)
        key = CumulantKey(RK, k - 1, 1)
        spread = self.plus_diff(key) - self.minus_diff(key)
        out = prev * ((k - 1) * (2 * self.m + self.alpha)) + spread * (self.m * (self.m + self.alpha))
        return out.scale(Fraction(1, k + 1))

    def _mean_T_compute(self, k: int) -> SymExpr:
        if k == 0:
            return (SymExpr.psi(0, Base.M_PLUS_ALPHA).scale(self.m + self.alpha)
                    - SymExpr.psi(0, Base.ALPHA).scale(self.alpha) - self._poly(self.m))
        two_m_a = 2 * self.m + self.alpha
        prev = self.kappa(TK, k - 1)
        key = CumulantKey(TK, k - 1, 1)
        spread = self.plus_diff(key) - self.minus_diff(key)
        out = (prev * ((k - 1) * two_m_a) + spread * (self.m * (self.m + self.alpha))
               - self.kappa(RK, k) + self.kappa(RK, k - 1) * two_m_a)
        return out.scale(Fraction(1, k + 1))

    def mean_R_alt(self, k: int) -> SymExpr:
        """kappa(R_k) from the three-term recurrence; an independent check on mean_R."""
        if k < 0:
            raise ValueError("k must be non-negative")
        m, a = self.m, self.alpha
        vals = self._mean_R_alt
        if not vals:
            vals[0] = self._poly(m)
            vals[1] = self._poly(m * (m + a))
        for j in range(len(vals), k + 1):
            nxt = vals[j - 1] * ((2 * j - 1) * (2 * m + a)) + vals[j - 2] * ((j - 2) * ((j - 1) ** 2 - a * a))
            vals[j] = nxt.scale(Fraction(1, j + 1))
        return vals[k]

    # -- decoupled integrals ---------------------------------------------
    def _block_key(self, kind: StatKind, r: int, size: int, holds_first: bool) -> CumulantKey:
        if holds_first:
            return CumulantKey(kind, r, size)
        return CumulantKey(TK, 1, size)

    def _partition_sum(self, kind: StatKind, r: int, s: int, diff) -> SymExpr:
        total = SymExpr.zero(self.ctx)
        for first, rest, count in _block_shapes(s):
            term = diff(self._block_key(kind, r, first, True))
            for size in rest:
                if term.is_zero():
                    break
                term = term * diff(self._block_key(kind, r, size, False))
            if not term.is_zero():
                total = total + term.scale(count)
        return total

    def H_integral(self, kind: StatKind, r: int, s: int) -> SymExpr:
        """H_s(X_r, T, ..., T): partition sum of products of kappa^+ - kappa."""
        return self._partition_sum(kind, r, s, self.plus_diff)

    def h_integral(self, kind: StatKind, r: int, s: int) -> SymExpr:
        """h_s(X_r, T, ..., T): minus the partition sum of products of kappa^- - kappa."""
        return -self._partition_sum(kind, r, s, self.minus_diff)

    def D_integral(self, kind: StatKind, k: int, l: int) -> SymExpr:
        total = SymExpr.zero(self.ctx)
        for i in range(l):
            w = factorial(l - 1) // factorial(l - 1 - i)
            j = l - i
            weight = k + l - 1 - i
            if weight:
                total = total + self.kappa(kind, k, j).scale(w * weight)
            if kind is TK:
                total = total + self.kappa(RK, k, j).scale(w)
        return total

    # -- decoupled terms --------------------------------------------------
    def delta_T(self, l: int, k: int) -> SymExpr:
        if l < 2 or k < 1:
            raise ValueError(f"delta_T needs l >= 2 and k >= 1, got l={l}, k={k}")
        kR = self.kappa(RK, 1)
        total = SymExpr.zero(self.ctx)
        for s in range(1, l):
            coef = comb(l - 2, s - 1)
            H = SymExpr.zero(self.ctx)
            D = SymExpr.zero(self.ctx)
            for r in range(k):
                H = H + self.H_integral(TK, r, s) * self.h_integral(TK, k - r - 1, l - s)
                D = D + self.D_integral(TK, r, s) * self.D_integral(TK, k - r - 1, l - s)
            total = total + (kR * H - D).scale(coef)
        return total

    def delta_R(self, l: int, k: int) -> SymExpr:
        if l < 2 or k < 2:
            raise ValueError(f"delta_R needs l >= 2 and k >= 2, got l={l}, k={k}")
        kR = self.kappa(RK, 1)
        total = SymExpr.zero(self.ctx)
        for s in range(1, l):
            coef = comb(l - 2, s - 1)
            H = SymExpr.zero(self.ctx)
            D = SymExpr.zero(self.ctx)
            for r in range(k):
                q = k - r - 1
                H = (H + self.H_integral(RK, r, s) * self.h_integral(TK, q, l - s)
                     + self.h_integral(RK, r, s) * self.H_integral(TK, q, l - s))
                D = D + self.D_integral(RK, r, s) * self.D_integral(TK, q, l - s)
            total = total + (kR * H - D.scale(2)).scale(coef)
        return total

    # -- the driver -------------------------------------------------------
    def joint_cumulant(self, key: CumulantKey) -> SymExpr:
        hit = self.store.get(key)
        if hit is not None:
            return hit
        key = CumulantKey(*key).validate()
        if self.disk is not None:
            loaded = self.disk.load(key)
            if loaded is not None:
                self.store[key] = loaded
                return loaded
        if key in self._active:
            raise InvariantError(f"cyclic dependency while resolving {key}")
        if len(self._active) >= self.max_depth:
            raise InvariantError(f"recursion depth exceeded at {key}")
        self._active.append(key)
        try:
            value = self._resolve(key)
        finally:
            self._active.pop()
        if not value.is_canonical() or value.context != self.ctx:
            raise InvariantError(f"{key} is not a canonical {{m, alpha}} expression")
        self.store[key] = value
        if self.disk is not None:
            self.disk.store(key, value)
        return value

    def _resolve(self, key: CumulantKey) -> SymExpr:
        kind, k, l = key
        if l == 1:
            return self._mean_T_compute(k) if kind is TK else self._mean_R_compute(k)
        if kind is TK:
            if k == 0:
                # derivative relation for T_0 = sum ln x_i
                return ddalpha(self.kappa(TK, 1, l - 1))
            return self.delta_T(l, k) + ddalpha(self.kappa(TK, k + 1, l - 1))
        if k == 0:
            return SymExpr.zero(self.ctx)
        if k == 1:
            return self.D_integral(TK, 1, l - 1)
        return self.delta_R(l, k) + ddalpha(self.kappa(RK, k + 1, l - 1)) - self.D_integral(TK, k, l - 1)

    def cumulant_T(self, l: int) -> SymExpr:
        """kappa_l(T), scheduled order by order from the mean of T_l."""
        if l < 1:
            raise ValueError("order must be positive")
        for L in range(2, l + 1):
            self.joint_cumulant(CumulantKey(TK, l - L + 1, L))
        out = self.joint_cumulant(CumulantKey(TK, 1, l))
        check_final_form(out, f"kappa_{l}(T)")
        return out


def check_final_form(e: SymExpr, label: str = "expression") -> None:
    """Polynomial coefficients and psi(m + alpha) factors only."""
    bad_base = e.bases() - {Base.M_PLUS_ALPHA}
    if bad_base:
        raise InvariantError(f"{label} carries unexpected bases {sorted(b.value for b in bad_base)}")
    for mono, c in e.items():
        if not c.is_polynomial():
            raise InvariantError(f"{label} has a non-polynomial coefficient {c}")
