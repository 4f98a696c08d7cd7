"""Synthesis and validation of a compatible parameter tuple.

A parameter set fixes: a squarefree modulus m = p_1 ... p_r, an output
characteristic p coprime to m, the combined modulus M = m*p, the
extension field F_{p^tau} with m | p^tau - 1, the order-m subgroup H
with its canonical root of unity, and the canonical residue sets of m
and M.  Everything downstream (matching families, interpolation
schemes, key generation) consumes this single object, and its JSON
serialization is byte-reproducible.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field as dc_field

from .errors import ParameterError
from .field import Field, FieldElement, is_prime

MULTIPLICITY = 2  # derivative orders used everywhere are k in {0, 1}


def canonical_set(modulus: int, prime_factors) -> list[int]:
    """Residues s mod `modulus` with s mod q in {0, 1} for every factor q.

    `modulus` must be exactly the product of the given distinct primes.
    """
    factors = list(prime_factors)
    if len(set(factors)) != len(factors):
        raise ParameterError(f"repeated prime factors in {factors}")
    prod = 1
    for q in factors:
        if not is_prime(q):
            raise ParameterError(f"factor {q} is not prime")
        prod *= q
    if prod != modulus:
        raise ParameterError(
            f"modulus {modulus} is not the product of {factors}")
    return sorted(s for s in range(modulus)
                  if all(s % q in (0, 1) for q in factors))


def sparsity_target(r: int) -> int:
    """Published minimal term count of a canonical-set decoding polynomial
    for a squarefree modulus with r prime factors.

    Advisory only: the realized interpolation-set size is whatever the
    solver certifies over the concrete field (it can be larger when the
    chosen characteristic does not admit the minimal sparse scheme).
    """
    if r < 1:
        raise ParameterError(f"r={r} must be >= 1")
    if r == 1:
        return 2
    if r <= 103:
        if r % 2 == 0:
            return 3 ** (r // 2)
        return 8 * 3 ** ((r - 3) // 2)
    # (3/4)^51 * 2^r, exact for r >= 104 since r - 102 >= 2
    return 3 ** 51 * 2 ** (r - 102)


@dataclass(frozen=True)
class DpfParams:
    """Compatible parameter tuple; immutable and freely shareable."""

    primes: tuple[int, ...]
    m: int
    p: int
    M: int
    tau: int
    field: Field
    gamma: FieldElement
    H: tuple[FieldElement, ...]     # order-m subgroup in discrete-log order
    S_m: tuple[int, ...]
    S_M: tuple[int, ...]
    e: int = MULTIPLICITY
    n_target: int = dc_field(default=0)

    @property
    def r(self) -> int:
        return len(self.primes)

    def require_subgroup(self, a: FieldElement) -> None:
        if not self.field.in_subgroup(a, self.m):
            raise ParameterError(
                f"element {a.as_string()} is not an m-th root of unity")


def _multiplicative_order(p: int, m: int) -> int:
    order = 1
    acc = p % m
    while acc != 1:
        acc = acc * p % m
        order += 1
        if order > m:
            raise AssertionError("order search overran the modulus")
    return order


def build_params(primes, p: int, tau_hint: int = 1) -> DpfParams:
    """Derive the full parameter tuple from the prime factorization of m
    and the output characteristic p.

    tau is the least multiple of ord_m(p) that is >= tau_hint, i.e. the
    minimal valid extension degree honoring the hint.
    """
    primes = tuple(sorted(int(q) for q in primes))
    if len(set(primes)) != len(primes):
        raise ParameterError(f"primes {list(primes)} are not distinct")
    for q in primes:
        if not is_prime(q):
            raise ParameterError(f"{q} is not prime")
    if not is_prime(p):
        raise ParameterError(f"p={p} is not prime")
    if p in primes:
        raise ParameterError(f"p={p} must be coprime to m (it divides m)")
    if tau_hint < 1:
        raise ParameterError(f"tau_hint={tau_hint} must be >= 1")

    m = 1
    for q in primes:
        m *= q
    M = m * p

    d = _multiplicative_order(p, m)
    tau = d * ((tau_hint + d - 1) // d)

    fld = Field(p, tau)
    gamma = fld.root_of_unity(m)
    H = tuple(fld.subgroup(gamma, m))
    S_m = tuple(canonical_set(m, primes))
    S_M = tuple(canonical_set(M, primes + (p,)))
    # CRT counting: two admissible residues per prime factor.
    assert len(S_m) == 2 ** len(primes)
    assert len(S_M) == 2 ** (len(primes) + 1)
    # The multiplicity-2 derivative agreement at subgroup points needs the
    # field characteristic to be at least the multiplicity; p >= 2 always.
    assert p >= MULTIPLICITY

    return DpfParams(
        primes=primes, m=m, p=p, M=M, tau=tau, field=fld, gamma=gamma,
        H=H, S_m=S_m, S_M=S_M, e=MULTIPLICITY,
        n_target=sparsity_target(len(primes)),
    )


@dataclass(frozen=True)
class LiftWitness:
    s: int
    s_mod_m: int
    s_mod_p: int
    ok: bool


@dataclass(frozen=True)
class LiftConditionReport:
    ok: bool
    witnesses: tuple[LiftWitness, ...]


def check_lift_condition(params: DpfParams) -> LiftConditionReport:
    """Check that every s in S_M decomposes (via CRT) into a residue of
    S_m and a residue below the multiplicity.

    Always holds for canonical sets with multiplicity 2; the per-element
    witness list guards against future non-canonical set choices.
    Failures are reported, never raised.
    """
    s_m = set(params.S_m)
    witnesses = []
    for s in params.S_M:
        a, b = s % params.m, s % params.p
        witnesses.append(LiftWitness(s, a, b, a in s_m and b < params.e))
    return LiftConditionReport(all(w.ok for w in witnesses), tuple(witnesses))


# ---------------------------------------------------------------------------
# Persistence: canonical JSON, the single source of truth for the CLI chain.
# ---------------------------------------------------------------------------

def canonical_json_bytes(obj) -> bytes:
    """Sorted-key, minimal-separator JSON with trailing newline."""
    return (json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n").encode()


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def params_to_json(params: DpfParams) -> bytes:
    obj = {
        "primes": list(params.primes),
        "m": params.m,
        "p": params.p,
        "M": params.M,
        "tau": params.tau,
        "zeta": list(params.field.zeta),
        "gamma": params.gamma.as_string(),
        "H": [b.as_string() for b in params.H],
        "S_m": list(params.S_m),
        "S_M": list(params.S_M),
        "e": params.e,
        "n_target": params.n_target,
    }
    return canonical_json_bytes(obj)


def params_from_json(data: bytes) -> DpfParams:
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"params file is not valid JSON: {exc}") from exc
    try:
        fld = Field(obj["p"], obj["tau"], tuple(obj["zeta"]))
        gamma = fld.parse_element(obj["gamma"])
        H = tuple(fld.parse_element(s) for s in obj["H"])
        params = DpfParams(
            primes=tuple(obj["primes"]), m=obj["m"], p=obj["p"], M=obj["M"],
            tau=obj["tau"], field=fld, gamma=gamma, H=H,
            S_m=tuple(obj["S_m"]), S_M=tuple(obj["S_M"]),
            e=obj["e"], n_target=obj["n_target"],
        )
    except KeyError as exc:
        raise ParameterError(f"params file missing key: {exc}") from exc
    _validate_loaded_params(params)
    return params


def _validate_loaded_params(params: DpfParams) -> None:
    m = 1
    for q in params.primes:
        m *= q
    if m != params.m or params.m * params.p != params.M:
        raise ParameterError("params file moduli are inconsistent")
    if params.field.group_order % params.m != 0:
        raise ParameterError("m does not divide the field group order")
    if params.field.element_order(params.gamma) != params.m:
        raise ParameterError("gamma does not have order m")
    if list(params.H) != params.field.subgroup(params.gamma, params.m):
        raise ParameterError("H is not the subgroup generated by gamma")
    if list(params.S_m) != canonical_set(params.m, params.primes):
        raise ParameterError("S_m is not the canonical set of m")
    if list(params.S_M) != canonical_set(params.M, params.primes + (params.p,)):
        raise ParameterError("S_M is not the canonical set of M")
    if params.e != MULTIPLICITY:
        raise ParameterError(f"unsupported multiplicity e={params.e}")
