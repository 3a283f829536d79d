"""Exact product-operator algebra for spin-1/2 chains.

Operators are represented as sums of scaled Pauli strings built from the
single-spin operators Ix, Iy, Iz (eigenvalues +/-1/2) with identity at
unlisted sites.  The normalized inner product <A, B> = Tr(A^dag B) / 2^(n-2)
makes every operator of the form 2^(q-1) * (product of q single-spin
operators) a unit vector, so expectation-value coordinates of the reduced
dynamics coincide with overlap coordinates of the simulator.

All values are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

AXES = ("x", "y", "z")

_PAULI = {
    "1": np.eye(2, dtype=complex),
    "x": np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex),
    "y": np.array([[0.0, -0.5j], [0.5j, 0.0]], dtype=complex),
    "z": np.array([[0.5, 0.0], [0.0, -0.5]], dtype=complex),
}

# single-site products: (a, b) -> (scalar, label) with I_a I_b = scalar * I_label
_PRODUCT = {
    ("x", "x"): (0.25, "1"),
    ("y", "y"): (0.25, "1"),
    ("z", "z"): (0.25, "1"),
    ("x", "y"): (0.5j, "z"),
    ("y", "x"): (-0.5j, "z"),
    ("y", "z"): (0.5j, "x"),
    ("z", "y"): (-0.5j, "x"),
    ("z", "x"): (0.5j, "y"),
    ("x", "z"): (-0.5j, "y"),
}

_COEFF_TOL = 1e-15


@dataclass(frozen=True)
class ChainSpec:
    """Linear chain of n spin-1/2 sites with equal nearest-neighbour coupling J (Hz).

    The natural unit of time everywhere in this package is 1/(pi J); the
    conversion to seconds happens only at the CLI boundary.
    """

    n: int
    coupling: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"chain needs at least 2 sites, got n={self.n}")
        if self.coupling <= 0:
            raise ValueError(f"coupling must be positive, got {self.coupling}")

    @property
    def dim(self) -> int:
        return 2**self.n

    def seconds(self, duration: float) -> float:
        """Convert a duration in units of 1/(pi J) to seconds."""
        return duration / (np.pi * self.coupling)


@dataclass(frozen=True)
class PauliTerm:
    """A scaled product of single-spin operators, identity at unlisted sites.

    ``sites`` maps 1-based site index to an axis label; the stored coefficient
    is the full prefactor (e.g. the term written ``2*I1y*I2z`` has coefficient
    2 and sites ((1, 'y'), (2, 'z'))).
    """

    coefficient: complex
    sites: tuple[tuple[int, str], ...]

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(sorted(self.sites)))
        seen = set()
        for site, axis in self.sites:
            if axis not in AXES:
                raise ValueError(f"unknown axis {axis!r}")
            if site < 1:
                raise ValueError(f"site indices are 1-based, got {site}")
            if site in seen:
                raise ValueError(f"site {site} repeated in term")
            seen.add(site)

    @property
    def weight(self) -> int:
        """Number of non-identity sites."""
        return len(self.sites)

    def max_site(self) -> int:
        return max((s for s, _ in self.sites), default=1)


def term(coefficient, *factors) -> PauliTerm:
    """Build a PauliTerm from factors like (1, 'x'), (2, 'z')."""
    return PauliTerm(complex(coefficient), tuple(factors))


@dataclass(frozen=True)
class OperatorSum:
    """Canonical sum of PauliTerms: sorted site tuples, merged duplicates, zeros dropped."""

    terms: tuple[PauliTerm, ...] = field(default_factory=tuple)

    @staticmethod
    def of(*terms_: PauliTerm) -> "OperatorSum":
        return OperatorSum(tuple(terms_)).canonical()

    def canonical(self) -> "OperatorSum":
        merged: dict[tuple, complex] = {}
        for t in self.terms:
            merged[t.sites] = merged.get(t.sites, 0.0) + t.coefficient
        kept = [
            PauliTerm(c, s)
            for s, c in sorted(merged.items())
            if abs(c) > _COEFF_TOL
        ]
        return OperatorSum(tuple(kept))

    def __add__(self, other: "OperatorSum") -> "OperatorSum":
        return OperatorSum(self.terms + other.terms).canonical()

    def __sub__(self, other: "OperatorSum") -> "OperatorSum":
        return self + (-1.0) * other

    def __rmul__(self, scalar) -> "OperatorSum":
        return OperatorSum(
            tuple(PauliTerm(scalar * t.coefficient, t.sites) for t in self.terms)
        ).canonical()

    def __matmul__(self, other: "OperatorSum") -> "OperatorSum":
        out = []
        for a in self.terms:
            for b in other.terms:
                out.append(_term_product(a, b))
        return OperatorSum(tuple(out)).canonical()

    def max_site(self) -> int:
        return max((t.max_site() for t in self.terms), default=1)

    def is_zero(self) -> bool:
        return not self.terms

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(t.coefficient.imag) <= tol for t in self.terms)

    def __str__(self) -> str:
        return format_operator(self)


def _term_product(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    sites_a = dict(a.sites)
    sites_b = dict(b.sites)
    coeff = a.coefficient * b.coefficient
    out = {}
    for site in sites_a.keys() | sites_b.keys():
        la, lb = sites_a.get(site, "1"), sites_b.get(site, "1")
        if la == "1":
            label = lb
        elif lb == "1":
            label = la
        else:
            scalar, label = _PRODUCT[(la, lb)]
            coeff *= scalar
        if label != "1":
            out[site] = label
    return PauliTerm(coeff, tuple(out.items()))


def commutator(a: OperatorSum, b: OperatorSum) -> OperatorSum:
    """[A, B] in canonical form; coefficients may be imaginary."""
    return (a @ b) + (-1.0) * (b @ a)


def matrix_of(op: OperatorSum | PauliTerm, chain: ChainSpec) -> np.ndarray:
    """Dense 2^n x 2^n matrix realization, Kronecker products with identity fill.

    Raises ValueError if the operator touches a site beyond the chain or the
    chain is too large to realize densely.
    """
    if isinstance(op, PauliTerm):
        op = OperatorSum((op,))
    if chain.n > 12:
        raise ValueError(f"dense realization limited to n <= 12, got n={chain.n}")
    if op.max_site() > chain.n:
        raise ValueError(
            f"operator touches site {op.max_site()} but chain has n={chain.n}"
        )
    M = np.zeros((chain.dim, chain.dim), dtype=complex)
    for t in op.terms:
        labels = dict(t.sites)
        factors = [_PAULI[labels.get(s, "1")] for s in range(1, chain.n + 1)]
        M += t.coefficient * reduce(np.kron, factors)
    return M


def inner_product(a: OperatorSum, b: OperatorSum, chain: ChainSpec) -> complex:
    """Normalized overlap Tr(A^dag B) / 2^(n-2), computed term-algebraically.

    Pauli strings on distinct site-label sets are orthogonal; matching strings
    of weight q contribute conj(c_a) c_b 2^(2-2q).
    """
    for op in (a, b):
        if op.max_site() > chain.n:
            raise ValueError("operator does not fit on the chain")
    bmap = {t.sites: t.coefficient for t in b.canonical().terms}
    acc = 0.0 + 0.0j
    for t in a.canonical().terms:
        cb = bmap.get(t.sites)
        if cb is not None:
            acc += np.conj(t.coefficient) * cb * 2.0 ** (2 - 2 * t.weight)
    return acc.real if abs(acc.imag) < 1e-14 else acc


def norm(op: OperatorSum, chain: ChainSpec) -> float:
    return float(np.sqrt(abs(inner_product(op, op, chain))))


# ---------------------------------------------------------------------------
# named operators of the transfer problem
# ---------------------------------------------------------------------------


def single_spin(site: int, axis: str) -> OperatorSum:
    return OperatorSum.of(term(1.0, (site, axis)))


def product_term(*site_axes: tuple[int, str]) -> OperatorSum:
    """Unit-norm product operator 2^(q-1) I .. I for the given site/axis pairs."""
    q = len(site_axes)
    return OperatorSum.of(term(2.0 ** (q - 1), *site_axes))


def transfer_basis(n: int) -> list[OperatorSum]:
    """The 2n-2 orthonormal operators whose expectation values track the
    transfer of x-coherence on spin 1 into n-spin order.

    Odd positions hold 2^(k-1) I1y..I(k-1)y Ikx, even positions
    2^k I1y..Iky I(k+1)z.
    """
    ops = []
    for k in range(1, n):
        ys = [(m, "y") for m in range(1, k)]
        ops.append(product_term(*ys, (k, "x")))
        ops.append(product_term(*ys, (k, "y"), (k + 1, "z")))
    return ops


def multiple_spin_order(n: int) -> OperatorSum:
    """The n-spin order 2^(n-1) (prod_{m<n} Imy) Inz created by the cascade."""
    return product_term(*[(m, "y") for m in range(1, n)], (n, "z"))


def soliton_family(k: int) -> list[OperatorSum]:
    """The eight unit-norm operators involved in advancing spin order one site.

    Returns [L1, L2, L3, L4, D1, D2, D3, D4] anchored at site k: the L-group
    spans sites k..k+3, the D-group (the half-advanced images) k..k+4.
    """
    L1 = product_term((k, "z"), (k + 1, "y"), (k + 2, "x"))
    L2 = product_term((k, "z"), (k + 1, "y"), (k + 2, "y"), (k + 3, "z"))
    L3 = product_term((k + 1, "x"), (k + 2, "x"))
    L4 = product_term((k + 1, "x"), (k + 2, "y"), (k + 3, "z"))
    D1 = product_term((k, "z"), (k + 1, "y"), (k + 2, "y"), (k + 3, "x"))
    D2 = product_term((k, "z"), (k + 1, "y"), (k + 2, "y"), (k + 3, "y"), (k + 4, "z"))
    D3 = product_term((k + 1, "x"), (k + 2, "y"), (k + 3, "x"))
    D4 = product_term((k + 1, "x"), (k + 2, "y"), (k + 3, "y"), (k + 4, "z"))
    return [L1, L2, L3, L4, D1, D2, D3, D4]


def soliton_operator(k: int) -> OperatorSum:
    """The four-term soliton encoding anchored at site k.

    The relative phases (+, +, -, -) are the ones under which the operator
    advances one site per shaped-pulse interval; simulation fixes this
    convention, see tests.
    """
    L1, L2, L3, L4, _, _, _, _ = soliton_family(k)
    return 0.5 * (L1 + L2) - 0.5 * (L3 + L4)


def soliton_midstep(k: int) -> OperatorSum:
    """Image of soliton_operator(k) after the outer half of one advance step."""
    _, _, _, _, D1, D2, D3, D4 = soliton_family(k)
    return 0.5 * (D1 + D2) - 0.5 * (D3 + D4)


def decompose_matrix(M: np.ndarray, chain: ChainSpec, cutoff: float = 1e-9) -> OperatorSum:
    """Expand a dense matrix in the scaled Pauli-string basis.

    Inverse of matrix_of for any matrix; cost O(n 4^n), practical to n ~ 10.
    """
    n = chain.n
    if M.shape != (2**n, 2**n):
        raise ValueError("matrix does not match chain dimension")
    # successive single-site Pauli transforms: after processing a site, an
    # axis of length 4 indexes its (1, x, y, z) component, normalized so the
    # full Pauli-product prefactors come out directly.
    inv = np.stack([2.0 * _PAULI[a].conj() for a in ("1", "x", "y", "z")])
    inv[0] = 0.5 * np.eye(2)
    coeffs = M.reshape(1, 2**n, 2**n)
    for _ in range(n):
        m, d, _ = coeffs.shape
        half = d // 2
        blk = coeffs.reshape(m, 2, half, 2, half)
        coeffs = np.einsum("aij,mihjk->mahk", inv, blk).reshape(m * 4, half, half)
    flat = coeffs.reshape(4**n)
    terms = []
    for idx in np.nonzero(np.abs(flat) > cutoff)[0]:
        digits = []
        rem = int(idx)
        for _ in range(n):
            digits.append(rem % 4)
            rem //= 4
        digits.reverse()  # site 1 is the most-significant digit
        sites = tuple(
            (s + 1, ("1", "x", "y", "z")[d]) for s, d in enumerate(digits) if d != 0
        )
        terms.append(PauliTerm(complex(flat[idx]), sites))
    return OperatorSum(tuple(terms)).canonical()


# ---------------------------------------------------------------------------
# text notation: "2*I1y*I2z", "0.5*(4*I1z*I2y*I3x + ...)"
# ---------------------------------------------------------------------------


def format_operator(op: OperatorSum) -> str:
    if not op.terms:
        return "0"
    parts = []
    for t in op.terms:
        factors = [_format_coeff(t.coefficient)] if t.coefficient != 1 or not t.sites else []
        factors += [f"I{s}{a}" for s, a in t.sites]
        if not factors:
            factors = ["1"]
        parts.append("*".join(factors))
    return " + ".join(parts).replace("+ -", "- ")


def _format_coeff(c: complex) -> str:
    if abs(c.imag) < _COEFF_TOL:
        r = c.real
        return repr(int(r)) if r == int(r) else repr(r)
    if abs(c.real) < _COEFF_TOL:
        im = c.imag
        base = repr(int(im)) if im == int(im) else repr(im)
        return f"{base}j"
    return repr(c)


class _Parser:
    """Recursive-descent parser for the operator text notation."""

    def __init__(self, text: str):
        self.tokens = self._tokenize(text)
        self.pos = 0

    @staticmethod
    def _tokenize(text: str):
        tokens = []
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch in "+-*()":
                tokens.append(ch)
                i += 1
            elif ch == "I" and i + 1 < len(text) and text[i + 1].isdigit():
                j = i + 1
                while j < len(text) and text[j].isdigit():
                    j += 1
                if j >= len(text) or text[j] not in "xyz":
                    raise ValueError(f"bad operator factor near {text[i:j+1]!r}")
                tokens.append(("op", int(text[i + 1 : j]), text[j]))
                i = j + 1
            else:
                j = i
                while j < len(text) and (text[j].isdigit() or text[j] in ".ej"):
                    j += 1
                if j == i:
                    raise ValueError(f"unexpected character {ch!r} in operator text")
                lit = text[i:j]
                tokens.append(("num", complex(lit) if lit.endswith("j") else float(lit)))
                i = j
        return tokens

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def parse(self) -> OperatorSum:
        result = self.expr()
        if self.peek() is not None:
            raise ValueError("trailing tokens in operator text")
        return result

    def expr(self) -> OperatorSum:
        sign = 1.0
        tok = self.peek()
        if tok in ("+", "-"):
            self.take()
            sign = -1.0 if tok == "-" else 1.0
        acc = sign * self.product()
        while self.peek() in ("+", "-"):
            sign = -1.0 if self.take() == "-" else 1.0
            acc = acc + sign * self.product()
        return acc

    def product(self) -> OperatorSum:
        acc = self.factor()
        while self.peek() == "*":
            self.take()
            acc = _scalar_or_matmul(acc, self.factor())
        return acc

    def factor(self) -> OperatorSum:
        tok = self.take()
        if tok == "(":
            inner = self.expr()
            if self.take() != ")":
                raise ValueError("unbalanced parenthesis in operator text")
            return inner
        if isinstance(tok, tuple) and tok[0] == "num":
            return OperatorSum.of(PauliTerm(complex(tok[1]), ()))
        if isinstance(tok, tuple) and tok[0] == "op":
            return single_spin(tok[1], tok[2])
        raise ValueError(f"unexpected token {tok!r} in operator text")


def _scalar_or_matmul(a: OperatorSum, b: OperatorSum) -> OperatorSum:
    # products in the text notation are always commuting factors (a scalar
    # times disjoint single-site operators), so plain operator product works
    return a @ b


def parse_operator(text: str) -> OperatorSum:
    """Parse the text notation; round-trips with format_operator."""
    return _Parser(text).parse()
