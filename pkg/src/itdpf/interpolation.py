"""Zero-interpolation schemes over the order-m subgroup.

A scheme is a point set B inside the subgroup together with recovery
coefficients a[l][k] (k in {0, 1}) such that for every exponent s in
the canonical set of M,

    sum_l sum_k a[l][k] * Hasse_k(Z^s)(b_l)  =  1 if s == 0 else 0.

It is found in two stages: a canonical search for the smallest B that
interpolates the constant term from plain evaluations over the
canonical set of m (multiplicity 1), then a lift that adds first
derivatives to cover the canonical set of M (multiplicity 2).  The lift
is guaranteed solvable for any certified multiplicity-1 set, so an
inconsistent lift system aborts loudly.

Exponent conventions: a subgroup element b satisfies b^m = 1, so
exponents reduce mod m; the scalar factor produced by differentiation
lives in the field and reduces mod p.  Both reductions are well defined
because m and p divide M.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass

from .errors import LiftInconsistentError, ParameterError
from .field import Field, FieldElement
from .linalg import solve_linear_system
from .params import DpfParams, canonical_json_bytes


def hasse_monomial(params: DpfParams, s: int, k: int, b: FieldElement) -> FieldElement:
    """k-th Hasse derivative of Z^s evaluated at a subgroup element b.

    Order 0 is the plain power; order 1 is the formal derivative
    s * Z^(s-1) with the scalar s reduced mod p and the exponent mod m.
    Orders beyond 1 are not supported (multiplicity is fixed at 2).
    """
    fld = params.field
    if k == 0:
        return fld.pow(b, s % params.m)
    if k == 1:
        scalar = s % params.p
        if scalar == 0:
            return fld.zero
        return fld.const(scalar) * fld.pow(b, (s - 1) % params.m)
    raise ParameterError(f"unsupported derivative order k={k} (multiplicity 2)")


@dataclass(frozen=True)
class InterpolationScheme:
    points: tuple[FieldElement, ...]              # B, in canonical order
    point_logs: tuple[int, ...]                   # discrete logs of B
    coeffs: tuple[tuple[FieldElement, FieldElement], ...]  # a[l] = (a_l0, a_l1)
    base_coeffs: tuple[FieldElement, ...]         # multiplicity-1 diagnostics

    @property
    def n(self) -> int:
        return len(self.points)


def find_interpolation_set(
    field: Field,
    H: tuple[FieldElement, ...],
    exponents,
    n_start: int,
) -> tuple[tuple[int, ...], tuple[FieldElement, ...]]:
    """Smallest multiplicity-1 interpolating subset of H for `exponents`.

    For n = n_start, n_start + 1, ... the n-subsets of H are enumerated
    in discrete-log-lexicographic order and the first subset whose
    linear system  sum_l a_l * b_l^s = [s == 0]  is consistent wins, so
    the result is fully deterministic.  Escalation terminates because
    the full subgroup always interpolates (the |exponents| x m system
    has full row rank by distinctness of the characters Z^s on H).
    """
    m = len(H)
    exponents = sorted(set(int(s) for s in exponents))
    if n_start < 1:
        raise ParameterError(f"n_start={n_start} must be >= 1")
    rhs = [field.one if s == 0 else field.zero for s in exponents]
    # b_l = gamma^d, so b_l^s is just the subgroup element at index d*s.
    power_row = {s: [H[(d * s) % m] for d in range(m)] for s in exponents}
    for n in range(n_start, m + 1):
        for combo in itertools.combinations(range(m), n):
            rows = [[power_row[s][d] for d in combo] for s in exponents]
            solution = solve_linear_system(field, rows, rhs)
            if solution is not None:
                return tuple(combo), tuple(solution)
    raise AssertionError("unreachable: the full subgroup interpolates")


def find_mult1_scheme(params: DpfParams, n_start: int | None = None):
    """Multiplicity-1 set and coefficients for the canonical set of m."""
    if n_start is None:
        n_start = params.n_target
    return find_interpolation_set(params.field, params.H, params.S_m, n_start)


def lift_to_mult2(
    params: DpfParams, point_logs
) -> tuple[tuple[FieldElement, FieldElement], ...]:
    """Solve for the multiplicity-2 coefficients over the canonical set of M.

    Unknowns are ordered (l, k) with the point index l major, and free
    variables are zeroed, which pins a unique canonical matrix.  The
    system is solvable whenever the points form a certified
    multiplicity-1 set for the canonical set of m; an inconsistency is
    therefore a parameter or implementation bug.
    """
    fld = params.field
    points = [params.H[d] for d in point_logs]
    rows = []
    rhs = []
    for s in params.S_M:
        row = []
        for b in points:
            row.append(hasse_monomial(params, s, 0, b))
            row.append(hasse_monomial(params, s, 1, b))
        rows.append(row)
        rhs.append(fld.one if s == 0 else fld.zero)
    solution = solve_linear_system(fld, rows, rhs)
    if solution is None:
        raise LiftInconsistentError(
            f"multiplicity-2 lift inconsistent for points {list(point_logs)}; "
            "this contradicts the lift guarantee and signals a bug")
    return tuple(
        (solution[2 * i], solution[2 * i + 1]) for i in range(len(points))
    )


def build_scheme(params: DpfParams, n_start: int | None = None) -> InterpolationScheme:
    """Run the full pipeline: multiplicity-1 search, lift, certification."""
    point_logs, base_coeffs = find_mult1_scheme(params, n_start)
    coeffs = lift_to_mult2(params, point_logs)
    scheme = InterpolationScheme(
        points=tuple(params.H[d] for d in point_logs),
        point_logs=tuple(point_logs),
        coeffs=coeffs,
        base_coeffs=base_coeffs,
    )
    cert = verify_scheme(params, scheme)
    if not cert.ok:
        raise LiftInconsistentError(
            f"freshly built scheme failed verification at s={cert.failed_exponents}")
    return scheme


# ---------------------------------------------------------------------------
# Independent certification.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchemeCertificate:
    ok: bool
    failed_exponents: tuple[int, ...]
    random_cases: int
    random_failures: int


def _pow_by_iteration(field: Field, b: FieldElement, e: int) -> FieldElement:
    """Plain repeated multiplication; deliberately avoids Field.pow so the
    certificate exercises an arithmetic path disjoint from the solver."""
    acc = field.one
    for _ in range(e):
        acc = acc * b
    return acc


def verify_scheme(
    params: DpfParams,
    scheme: InterpolationScheme,
    seed: int = 0,
    random_polynomials: int = 100,
) -> SchemeCertificate:
    """Re-check the multiplicity-2 identity from scratch.

    Every monomial constraint is recomputed by iterated multiplication
    (not the solver's matrices, not table powering), then the linear map
    is spot-checked on random polynomials supported on the canonical set
    of M: applying the recovery coefficients to their evaluations and
    first derivatives must return the constant term exactly.
    """
    fld = params.field
    failed = []
    for s in params.S_M:
        total = fld.zero
        for (a0, a1), b in zip(scheme.coeffs, scheme.points):
            value = _pow_by_iteration(fld, b, s % params.m)
            total = total + a0 * value
            scalar = s % params.p
            if scalar:
                deriv = fld.const(scalar) * _pow_by_iteration(fld, b, (s - 1) % params.m)
                total = total + a1 * deriv
        expected = fld.one if s == 0 else fld.zero
        if total != expected:
            failed.append(s)

    rng = random.Random(seed)
    random_failures = 0
    for _ in range(random_polynomials):
        coeffs_by_s = {s: fld.random_element(rng) for s in params.S_M}
        recovered = fld.zero
        for (a0, a1), b in zip(scheme.coeffs, scheme.points):
            value = fld.zero
            deriv = fld.zero
            for s, c in coeffs_by_s.items():
                value = value + c * hasse_monomial(params, s, 0, b)
                deriv = deriv + c * hasse_monomial(params, s, 1, b)
            recovered = recovered + a0 * value + a1 * deriv
        if recovered != coeffs_by_s[0]:
            random_failures += 1

    return SchemeCertificate(
        ok=not failed and random_failures == 0,
        failed_exponents=tuple(failed),
        random_cases=random_polynomials,
        random_failures=random_failures,
    )


# ---------------------------------------------------------------------------
# Persistence.
# ---------------------------------------------------------------------------

def scheme_to_json(scheme: InterpolationScheme) -> bytes:
    obj = {
        "B": [b.as_string() for b in scheme.points],
        "B_logs": list(scheme.point_logs),
        "n": scheme.n,
        "A": [[a0.as_string(), a1.as_string()] for a0, a1 in scheme.coeffs],
        "mult1": [a.as_string() for a in scheme.base_coeffs],
    }
    return canonical_json_bytes(obj)


def scheme_from_json(params: DpfParams, data: bytes) -> InterpolationScheme:
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"scheme file is not valid JSON: {exc}") from exc
    fld = params.field
    try:
        points = tuple(fld.parse_element(s) for s in obj["B"])
        point_logs = tuple(int(d) for d in obj["B_logs"])
        coeffs = tuple(
            (fld.parse_element(r[0]), fld.parse_element(r[1])) for r in obj["A"])
        base = tuple(fld.parse_element(s) for s in obj["mult1"])
        n = int(obj["n"])
    except KeyError as exc:
        raise ParameterError(f"scheme file missing key: {exc}") from exc
    if not (len(points) == len(point_logs) == len(coeffs) == n):
        raise ParameterError("scheme file is internally inconsistent")
    for b, d in zip(points, point_logs):
        if not 0 <= d < params.m or params.H[d] != b:
            raise ParameterError("scheme points do not match the subgroup")
    scheme = InterpolationScheme(points, point_logs, coeffs, base)
    return scheme
