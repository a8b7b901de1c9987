"""Twisted connections on free modules and their truncated de Rham complexes.

A rank-r module M = A^r with basis e_1..e_r carries, for every variable i, a
matrix N_i with d_i(e_j) = sum_k (N_i)_{kj} e_k.  A general element is moved by
the twisted Leibniz rule d_i(a e_j) = d_i(a) e_j + sigma_i(a) d_i(e_j).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import NonIntegrableError
from .linalg import rank
from .poly import Poly, exponents_up_to, format_poly
from .twist import TwistSpec, sigma_apply, twisted_partial

Vector = Tuple[Poly, ...]


class ConnectionModule:
    """Free module of rank r with per-variable action matrices."""

    def __init__(self, spec: TwistSpec, rank: int, matrices: Sequence[Sequence[Sequence[object]]] | None = None):
        if rank < 0:
            raise ValueError("rank must be >= 0")
        self.spec = spec
        self.rank = rank
        d = spec.d
        if matrices is None:
            matrices = [[[0] * rank for _ in range(rank)] for _ in range(d)]
        if len(matrices) != d:
            raise ValueError(f"need one matrix per variable ({d}), got {len(matrices)}")
        mats = []
        for m in matrices:
            if len(m) != rank or any(len(row) != rank for row in m):
                raise ValueError(f"matrices must be {rank}x{rank}")
            mats.append(tuple(tuple(c if isinstance(c, Poly) else Poly.const(c, d) for c in row) for row in m))
        self.matrices: Tuple[Tuple[Tuple[Poly, ...], ...], ...] = tuple(mats)
        self.integrable = False

    @classmethod
    def trivial(cls, spec: TwistSpec, rank: int = 1) -> "ConnectionModule":
        return cls(spec, rank)

    def matrix(self, i: int):
        return self.matrices[i - 1]

    def max_matrix_degree(self) -> int:
        return max((c.degree() for m in self.matrices for row in m for c in row), default=-1)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "matrices": [[[format_poly(c) for c in row] for row in m] for m in self.matrices],
        }


def module_apply(mod: ConnectionModule, i: int, v: Sequence[Poly]) -> Vector:
    """d_i applied to sum_j v_j e_j; component k is d_i(v_k) + sum_j (N_i)_{kj} sigma_i(v_j)."""
    if len(v) != mod.rank:
        raise ValueError(f"vector of length {len(v)} for a rank {mod.rank} module")
    spec = mod.spec
    spec._check_index(i)
    N = mod.matrix(i)
    sig = [sigma_apply(a, i, spec) for a in v]
    out = []
    for k in range(mod.rank):
        comp = twisted_partial(v[k], i, spec)
        for j in range(mod.rank):
            if not N[k][j].is_zero() and not sig[j].is_zero():
                comp = comp + N[k][j] * sig[j]
        out.append(comp)
    return tuple(out)


@dataclass
class IntegrabilityResult:
    ok: bool
    bound: int
    witness: Optional[Tuple[int, int, Tuple[int, ...], int]] = None

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"integrable_up_to_degree": self.bound, "holds": self.ok,
                "witness": list(self.witness[:2]) + [list(self.witness[2]), self.witness[3]]
                if self.witness else None}


def integrability_check(mod: ConnectionModule, bound: int) -> IntegrabilityResult:
    """Check d_i d_j = d_j d_i on m e_l for monomials m of degree <= bound."""
    spec = mod.spec
    d = spec.d
    zero = Poly.zero(d)
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            for e in exponents_up_to(d, bound):
                m = Poly.monomial(e)
                for l in range(mod.rank):
                    v = tuple(m if t == l else zero for t in range(mod.rank))
                    a = module_apply(mod, i, module_apply(mod, j, v))
                    b = module_apply(mod, j, module_apply(mod, i, v))
                    if a != b:
                        return IntegrabilityResult(False, bound, (i, j, e, l + 1))
    mod.integrable = True
    return IntegrabilityResult(True, bound)


def rank_one_integrability(mod: ConnectionModule) -> bool:
    """Closed form for rank one: d_i(N_j) + sigma_i(N_j) N_i = d_j(N_i) + sigma_j(N_i) N_j."""
    if mod.rank != 1:
        raise ValueError("closed form applies to rank one only")
    spec = mod.spec
    n = [mod.matrix(i)[0][0] for i in range(1, spec.d + 1)]
    for i in range(1, spec.d + 1):
        for j in range(i + 1, spec.d + 1):
            lhs = twisted_partial(n[j - 1], i, spec) + sigma_apply(n[j - 1], i, spec) * n[i - 1]
            rhs = twisted_partial(n[i - 1], j, spec) + sigma_apply(n[i - 1], j, spec) * n[j - 1]
            if lhs != rhs:
                return False
    return True


def derivation_action_matrices(mod: ConnectionModule):
    """Read the matrices back from the derivation action on the basis vectors."""
    d = mod.spec.d
    zero = Poly.zero(d)
    one = Poly.one(d)
    out = []
    for i in range(1, d + 1):
        cols = [module_apply(mod, i, tuple(one if t == j else zero for t in range(mod.rank)))
                for j in range(mod.rank)]
        out.append([[cols[j][k] for j in range(mod.rank)] for k in range(mod.rank)])
    return out


# de Rham complex --------------------------------------------------------------

def _wedge_sign(i: int, S: Tuple[int, ...]) -> int:
    return -1 if sum(1 for j in S if j < i) % 2 else 1


def _degree_cap(mod: ConnectionModule, D: int, n: int) -> Tuple[int, bool]:
    """Coefficient degree bound for the n-th term, and whether the truncation is a subcomplex."""
    spec = mod.spec
    if any(spec.image_degree(i) > 1 for i in range(1, spec.d + 1)):
        return D, False
    delta = max(-1, mod.max_matrix_degree())
    return D + n * delta, True


@dataclass
class DeRhamRow:
    degree: int
    dimension: int
    kernel_rank: int
    image_rank: int
    cohomology: int

    def to_json(self) -> dict:
        return {"n": self.degree, "dim": self.dimension, "kernel_rank": self.kernel_rank,
                "image_rank": self.image_rank, "cohomology_rank": self.cohomology}


@dataclass
class DeRhamResult:
    truncation: int
    rows: List[DeRhamRow]
    subcomplex: bool
    nabla_squared_zero: bool
    notes: List[str] = field(default_factory=list)

    @property
    def dims(self) -> List[Tuple[int, int]]:
        """(kernel rank, image rank) per complex degree."""
        return [(r.kernel_rank, r.image_rank) for r in self.rows]

    @property
    def cohomology(self) -> List[int]:
        return [r.cohomology for r in self.rows]

    def to_json(self) -> dict:
        return {
            "truncation": self.truncation,
            "subcomplex": self.subcomplex,
            "nabla_squared_zero": self.nabla_squared_zero,
            "rows": [r.to_json() for r in self.rows],
            "notes": list(self.notes),
        }


def _nabla(mod: ConnectionModule, n: int, key) -> Dict:
    """nabla_n(m e_l (x) e_S) as a sparse vector {(l, S, exponent): value}."""
    l, S, e = key
    spec = mod.spec
    d = spec.d
    zero = Poly.zero(d)
    m = Poly.monomial(e)
    v = tuple(m if t == l else zero for t in range(mod.rank))
    sign_n = -1 if n % 2 else 1
    out: Dict = {}
    for i in range(1, d + 1):
        if i in S:
            continue
        T = tuple(sorted(S + (i,)))
        s = sign_n * _wedge_sign(i, S)
        for k, comp in enumerate(module_apply(mod, i, v)):
            for ee, c in comp.terms.items():
                kk = (k, T, ee)
                val = out.get(kk, Fraction(0)) + s * c
                if val:
                    out[kk] = val
                else:
                    out.pop(kk, None)
    return out


def _apply_linear(mod: ConnectionModule, n: int, vec: Dict) -> Dict:
    out: Dict = {}
    for key, c in vec.items():
        for kk, v in _nabla(mod, n, key).items():
            val = out.get(kk, Fraction(0)) + c * v
            if val:
                out[kk] = val
            else:
                out.pop(kk, None)
    return out


def de_rham_dims(mod: ConnectionModule, D: int, check_integrable: bool = True) -> DeRhamResult:
    """Exact ranks of the de Rham complex truncated at coefficient degree D.

    For twists of degree one the n-th term keeps coefficients of degree at
    most D + n*delta, delta = max(-1, max deg N_i), so the truncation is a
    subcomplex and the ranks give its cohomology.  Higher degree twists leave
    the codomain untruncated and the result is flagged ``subcomplex=False``.
    """
    spec = mod.spec
    d = spec.d
    if check_integrable:
        res = integrability_check(mod, D)
        if not res.ok:
            raise NonIntegrableError(f"connection is not integrable: witness {res.witness}")
    subsets = [[tuple(S) for S in itertools.combinations(range(1, d + 1), n)] for n in range(d + 1)]
    bases = []
    subcomplex = True
    for n in range(d + 1):
        cap, sub = _degree_cap(mod, D, n)
        subcomplex = subcomplex and sub
        monos = exponents_up_to(d, cap) if cap >= 0 else []
        bases.append([(l, S, e) for S in subsets[n] for l in range(mod.rank) for e in monos])
    images = []
    for n in range(d + 1):
        if n == d:
            images.append([])
            continue
        images.append([_nabla(mod, n, key) for key in bases[n]])
    ranks = [rank(cols) if cols else 0 for cols in images]
    ok = True
    for n in range(d - 1):
        for col in images[n]:
            if _apply_linear(mod, n + 1, col):
                ok = False
                break
    rows = []
    for n in range(d + 1):
        dim = len(bases[n])
        ker = dim - ranks[n]
        prev = ranks[n - 1] if n > 0 else 0
        rows.append(DeRhamRow(n, dim, ker, ranks[n], ker - prev))
    notes = [f"ranks at truncation D={D}"]
    if not subcomplex:
        notes.append("twist raises degrees: truncation is not a subcomplex, cohomology ranks are indicative only")
    return DeRhamResult(D, rows, subcomplex, ok, notes)
