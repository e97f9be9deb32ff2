"""Prime-pair search for fields with 2-class group (2, 2^ell), plus census.

Targets are F(n) = 2 * (3 (2n+1)^2)^(2^(ell-1)); every split
F(n) = p1 + p2 with p1 = 11, p2 = 7 mod 24 gives a candidate d = p1 p2.
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .arith import MAX_INT, PrimeTable, is_prime, sieve_primes
from .errors import CapacityError, CheckpointError, InvariantViolation, PreconditionError
from .genus import verify_proposition_alg
from .quadforms import class_group_profile

log = logging.getLogger(__name__)

MOD = 24
S1, S2 = 11, 7
SMALLEST_PRIME = 7
JSON_SAFE = 2**53


def F(ell: int, n: int) -> int:
    return 2 * (3 * (2 * n + 1) ** 2) ** (2 ** (ell - 1))


@dataclass(frozen=True)
class PrimePairWitness:
    ell: int
    m_param: int
    n_index: int
    p1: int
    p2: int
    d: int
    h_target: int

    @property
    def w(self) -> int:
        return 3 * self.m_param**2

    @property
    def x(self) -> int:
        return (self.p1 - self.p2) // 2

    @classmethod
    def build(cls, ell: int, n_index: int, p1: int, p2: int) -> "PrimePairWitness":
        wit = cls(ell=ell, m_param=2 * n_index + 1, n_index=n_index,
                  p1=p1, p2=p2, d=p1 * p2, h_target=p1 + p2)
        bad = wit.violations()
        if bad:
            raise PreconditionError(bad)
        return wit

    def violations(self) -> list[str]:
        bad = []
        if self.ell < 2:
            bad.append("ell >= 2")
        if self.m_param % 2 == 0:
            bad.append("m_param odd")
        if not is_prime(self.p1):
            bad.append("p1 prime")
        if not is_prime(self.p2):
            bad.append("p2 prime")
        if self.p1 % MOD != S1:
            bad.append("p1 = 11 mod 24")
        if self.p2 % MOD != S2:
            bad.append("p2 = 7 mod 24")
        if min(self.p1, self.p2) < 5:
            bad.append("p1, p2 >= 5")
        if self.d != self.p1 * self.p2:
            bad.append("d = p1*p2")
        if self.h_target != self.p1 + self.p2:
            bad.append("h_target = p1 + p2")
        top = self.w ** (2 ** (self.ell - 1)) if self.ell >= 1 else 0
        if self.p1 + self.p2 != 2 * top:
            bad.append("p1 + p2 = 2*w^(2^(ell-1))")
        x = abs(self.x)
        if self.x % 2 or not (0 < x <= top - 4):
            bad.append("x even, 0 < |x| <= w^(2^(ell-1)) - 4")
        return bad

    def to_json(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            out[k] = str(v) if abs(v) > JSON_SAFE else v
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "PrimePairWitness":
        return cls(**{k: int(obj[k]) for k in cls.__dataclass_fields__})


def target_values(ell: int, n_range) -> list[tuple[int, int]]:
    if ell < 2:
        raise ValueError("ell must be at least 2")
    out = []
    for n in n_range:
        value = F(ell, n)
        if value >= MAX_INT:
            raise CapacityError(f"F({n}) = {value} exceeds 2^63")
        if value % 24 != 18:
            raise InvariantViolation(f"F({n}) = {value} is not 18 mod 24")
        out.append((n, value))
    return out


def find_pairs(target: int, table: PrimeTable, d_max: int | None = None) -> list[tuple[int, int]]:
    """All (p1, p2) with p1 = 11, p2 = 7 mod 24, p1 + p2 = target, optionally p1 p2 <= d_max."""
    if table.limit < target - SMALLEST_PRIME:
        raise ValueError(f"prime table up to {table.limit} cannot cover target {target}")
    if target % MOD != (S1 + S2) % MOD:
        return []
    cls = table.primes[(table.primes % MOD == S1) & (table.primes < target - 4)]
    comp = target - cls
    ok = table.mask[comp] & (comp >= 5)
    if d_max is not None:
        # p1 * p2 <= d_max, done in Python ints to avoid int64 overflow
        ok &= np.array([int(a) * int(b) <= d_max for a, b in zip(cls, comp)], dtype=bool)
    return [(int(a), int(b)) for a, b in zip(cls[ok], comp[ok])]


@dataclass
class SearchPlan:
    ell: int
    x_max: int
    n_max: int
    f_max: int

    @property
    def cap_rule(self) -> str:
        return f"iterate n while {SMALLEST_PRIME}*(F(n)-{SMALLEST_PRIME}) <= X_max"


def plan_search(ell: int, x_max: int) -> SearchPlan:
    """Largest n whose target can still produce some d <= x_max."""
    if ell < 2:
        raise ValueError("ell must be at least 2 (use construct22 for ell = 1)")
    n = -1
    while SMALLEST_PRIME * (F(ell, n + 1) - SMALLEST_PRIME) <= x_max:
        n += 1
        if F(ell, n) >= MAX_INT:
            raise CapacityError(f"F({n}) exceeds 2^63")
    return SearchPlan(ell=ell, x_max=x_max, n_max=n, f_max=F(ell, n) if n >= 0 else 0)


def _chain(prev: str, d: int) -> str:
    return hashlib.sha256(f"{prev}:{d}".encode()).hexdigest()


def chain_of(ds) -> str:
    h = ""
    for d in ds:
        h = _chain(h, d)
    return h


def _digest(state: dict) -> str:
    body = {k: v for k, v in state.items() if k != "digest"}
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()


def write_checkpoint(path, state: dict) -> None:
    state = dict(state, digest=_digest(state))
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(json.dumps(state, sort_keys=True))
    os.replace(tmp, path)


def load_checkpoint(path, ell: int, x_max: int) -> dict:
    try:
        state = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    required = {"ell", "x_max", "last_n_completed", "emitted_count", "chain", "digest"}
    if not isinstance(state, dict) or not required <= state.keys():
        raise CheckpointError(f"checkpoint {path} is missing fields")
    if state["digest"] != _digest(state):
        raise CheckpointError(f"checkpoint {path} failed its digest check")
    if state["ell"] != ell or state["x_max"] != x_max:
        raise CheckpointError(
            f"checkpoint is for ell={state['ell']}, x_max={state['x_max']}, "
            f"not ell={ell}, x_max={x_max}"
        )
    return state


def _scan(ell: int, n: int, table: PrimeTable, x_max: int) -> list[PrimePairWitness]:
    target = F(ell, n)
    return [PrimePairWitness.build(ell, n, p1, p2) for p1, p2 in find_pairs(target, table, x_max)]


def run_search(ell: int, x_max: int, checkpoint=None, resume: bool = False,
               workers: int = 1, table: PrimeTable | None = None):
    """Yield witnesses with d <= x_max in order of n, then p1.

    With ``checkpoint`` set, state is written atomically after every
    completed n. ``resume`` continues after the recorded n; a bad
    checkpoint raises :class:`CheckpointError`.
    """
    plan = plan_search(ell, x_max)
    start, emitted, chain = 0, 0, ""
    if resume:
        if checkpoint is None:
            raise CheckpointError("resume requested without a checkpoint path")
        state = load_checkpoint(checkpoint, ell, x_max)
        start = state["last_n_completed"] + 1
        emitted, chain = state["emitted_count"], state["chain"]
    if plan.n_max < start:
        return
    if table is None or table.limit < plan.f_max:
        table = sieve_primes(max(plan.f_max, 2), MOD)
    log.info("search ell=%d x_max=%d n<=%d (%s)", ell, x_max, plan.n_max, plan.cap_rule)
    ns = range(start, plan.n_max + 1)
    if workers > 1:
        pool = ThreadPoolExecutor(max_workers=workers)
        batches = pool.map(lambda n: _scan(ell, n, table, x_max), ns)
    else:
        pool = None
        batches = (_scan(ell, n, table, x_max) for n in ns)
    try:
        for n, batch in zip(ns, batches):
            for wit in batch:
                yield wit
                chain = _chain(chain, wit.d)
                emitted += 1
            # only after the consumer has taken the whole batch
            if checkpoint is not None:
                write_checkpoint(checkpoint, {
                    "version": __version__, "ell": ell, "x_max": x_max,
                    "last_n_completed": n, "emitted_count": emitted, "chain": chain,
                })
    finally:
        if pool is not None:
            pool.shutdown(wait=True)


@dataclass
class CensusRecord:
    X: int
    ell: int
    count: int
    ratio: float

    def to_json(self) -> dict:
        return asdict(self)


def census_exponent(ell: int) -> float:
    return 0.5 + 1.0 / 2 ** (ell + 1)


def census_ratio(count: int, X: int, ell: int) -> float:
    return count * math.log(X) ** 2 / X ** census_exponent(ell)


def certify(witnesses, check=True) -> dict[int, object]:
    """Map d -> passing report; duplicate d values keep the first witness."""
    out = {}
    for wit in witnesses:
        if wit.d in out:
            log.info("duplicate d=%d from %s ignored", wit.d, wit)
            continue
        report = verify_proposition_alg(wit)
        if check and not report.passed:
            raise InvariantViolation(f"witness {wit} failed certification: {report.to_json()}")
        out[wit.d] = report
    return out


def census(ell: int, X_grid, witnesses=None) -> list[CensusRecord]:
    grid = sorted(X_grid)
    if witnesses is None:
        witnesses = list(run_search(ell, grid[-1]))
    certified = certify(w for w in witnesses if w.ell == ell)
    ds = sorted(certified)
    records = []
    for X in grid:
        count = int(np.searchsorted(np.array(ds, dtype=np.int64), X, side="right")) if ds else 0
        records.append(CensusRecord(X=X, ell=ell, count=count,
                                    ratio=census_ratio(count, X, ell) if X > 1 else 0.0))
    return records


def shape_ell(p1: int, p2: int, ell_max: int = 6) -> int | None:
    """ell >= 2 with (p1 + p2)/2 = w^(2^(ell-1)), w = 3 m^2, m odd; else None."""
    total = p1 + p2
    if total % 2:
        return None
    half = total // 2
    for ell in range(2, ell_max + 1):
        k = 2 ** (ell - 1)
        w = round(half ** (1.0 / k))
        for cand in (w - 1, w, w + 1):
            if cand > 0 and cand**k == half and cand % 3 == 0:
                m2 = cand // 3
                m = math.isqrt(m2)
                if m * m == m2 and m % 2:
                    return ell
    return None


def exhaustive_crosscheck(x_small: int) -> dict:
    """Compare the search against brute force over all d = p1 p2 <= x_small."""
    if x_small > 10**5:
        raise CapacityError("exhaustive cross-check is limited to X <= 10^5")
    table = sieve_primes(max(x_small, 11), MOD)
    p1s = [int(p) for p in table.in_class(S1)]
    p2s = [int(p) for p in table.in_class(S2)]
    typed: dict[int, list[int]] = {}
    shaped: dict[int, set[int]] = {}
    examined = 0
    for p1 in p1s:
        for p2 in p2s:
            if p1 * p2 > x_small:
                break
            examined += 1
            d = p1 * p2
            ttype = class_group_profile(-4 * d, census=False).two_sylow_type
            if len(ttype) == 2 and ttype[0] == 2 and ttype[1] >= 4:
                typed.setdefault(ttype[1].bit_length() - 1, []).append(d)
            ell = shape_ell(p1, p2)
            if ell is not None:
                if ttype != [2, 2**ell]:
                    raise InvariantViolation(f"d={d} has shape ell={ell} but type {ttype}")
                shaped.setdefault(ell, set()).add(d)

    searched: dict[int, set[int]] = {}
    mismatches = []
    for ell in sorted(set(shaped) | {2, 3}):
        try:
            found = {w.d for w in run_search(ell, x_small)}
        except ValueError:
            found = set()
        searched[ell] = found
        expected = shaped.get(ell, set())
        if found != expected:
            mismatches.append({"ell": ell, "missing": sorted(expected - found),
                               "extra": sorted(found - expected)})
    report = {
        "x_small": x_small,
        "pairs_examined": examined,
        "typed": {ell: len(v) for ell, v in sorted(typed.items())},
        "shaped": {ell: sorted(v) for ell, v in sorted(shaped.items())},
        "searched": {ell: sorted(v) for ell, v in sorted(searched.items())},
        "typed_without_shape": {
            ell: len(set(v) - shaped.get(ell, set())) for ell, v in sorted(typed.items())
        },
        "mismatches": mismatches,
    }
    if mismatches:
        raise InvariantViolation(f"search and exhaustive enumeration disagree: {mismatches}")
    return report
