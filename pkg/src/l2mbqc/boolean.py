"""Boolean functions on n bits and the classical analyses performed on them.

Truth tables are packed lists of bits indexed by the integer whose binary
expansion is the input string with x_1 as the least significant bit.  That
convention is fixed repo-wide: bit i of a mask corresponds to input variable
x_{i+1}.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

MAX_ARITY = 20


def parse_input(x: "int | str | Sequence[int]", n: int) -> int:
    """Normalize an input to its integer index.

    Strings are read left to right as x_1 x_2 ... x_n; sequences likewise.
    Integers are taken as already-packed indices.
    """
    if isinstance(x, str):
        if len(x) != n or any(ch not in "01" for ch in x):
            raise ValueError(f"input string {x!r} is not {n} bits")
        return sum(1 << i for i, ch in enumerate(x) if ch == "1")
    if isinstance(x, int):
        if not 0 <= x < (1 << n):
            raise ValueError(f"input index {x} out of range for arity {n}")
        return x
    bits = list(x)
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise ValueError("input bit sequence has wrong length or non-bits")
    return sum(1 << i for i, b in enumerate(bits) if b)


def popcount(x: int) -> int:
    return bin(x).count("1")


def dot2(mask: int, x: int) -> int:
    """Mod-2 dot product of two packed bit vectors."""
    return popcount(mask & x) & 1


def _check_arity(n: int) -> None:
    if not 1 <= n <= MAX_ARITY:
        raise ValueError(f"arity must be in 1..{MAX_ARITY}, got {n}")


@dataclass(frozen=True)
class BooleanFunction:
    """A function F_2^n -> F_2 stored as a truth table.

    ``symmetric_profile`` is present iff the function depends only on the
    Hamming weight of the input; entry w is the value at weight w.
    """

    n: int
    table: tuple[int, ...]
    kind: str = "custom"
    params: dict = field(default_factory=dict, compare=False)
    symmetric_profile: tuple[int, ...] | None = None

    def __post_init__(self):
        _check_arity(self.n)
        if len(self.table) != 1 << self.n:
            raise ValueError("truth table length must be 2^n")
        if any(b not in (0, 1) for b in self.table):
            raise ValueError("truth table entries must be bits")
        if self.symmetric_profile is not None:
            if len(self.symmetric_profile) != self.n + 1:
                raise ValueError("symmetric profile needs n+1 entries")
            for x, b in enumerate(self.table):
                if b != self.symmetric_profile[popcount(x)]:
                    raise ValueError("profile disagrees with truth table")

    def __call__(self, x: "int | str | Sequence[int]") -> int:
        return self.table[parse_input(x, self.n)]

    @property
    def is_symmetric(self) -> bool:
        return self.symmetric_profile is not None

    def complement(self) -> "BooleanFunction":
        return BooleanFunction(
            self.n,
            tuple(1 - b for b in self.table),
            kind=f"not({self.kind})",
            params=dict(self.params),
            symmetric_profile=None if self.symmetric_profile is None
            else tuple(1 - b for b in self.symmetric_profile),
        )

    def to_json(self) -> str:
        table_int = sum(b << i for i, b in enumerate(self.table))
        width = -(-len(self.table) // 4)
        return json.dumps({
            "n": self.n,
            "kind": self.kind,
            "params": self.params,
            "table_hex": format(table_int, f"0{width}x"),
        })

    @classmethod
    def from_json(cls, text: str) -> "BooleanFunction":
        obj = json.loads(text)
        n = obj["n"]
        table_int = int(obj["table_hex"], 16)
        table = tuple((table_int >> i) & 1 for i in range(1 << n))
        f = cls(n, table, kind=obj.get("kind", "custom"), params=obj.get("params", {}))
        prof = _profile_of(f)
        return f if prof is None else BooleanFunction(
            n, table, kind=f.kind, params=f.params, symmetric_profile=prof)


def _profile_of(f: BooleanFunction) -> tuple[int, ...] | None:
    prof: list[int | None] = [None] * (f.n + 1)
    for x, b in enumerate(f.table):
        w = popcount(x)
        if prof[w] is None:
            prof[w] = b
        elif prof[w] != b:
            return None
    return tuple(prof)  # type: ignore[arg-type]


def from_profile(profile: Sequence[int], n: int, kind: str = "custom",
                 params: dict | None = None) -> BooleanFunction:
    """Build a symmetric function from its Hamming-weight profile."""
    _check_arity(n)
    if len(profile) != n + 1:
        raise ValueError("profile needs n+1 entries")
    table = tuple(profile[popcount(x)] for x in range(1 << n))
    return BooleanFunction(n, table, kind=kind, params=params or {},
                           symmetric_profile=tuple(profile))


def mod_p(p: int, j: int, n: int) -> BooleanFunction:
    """0 iff the Hamming weight is congruent to j mod p, else 1."""
    if p < 3 or p % 2 == 0:
        raise ValueError("p must be an odd integer >= 3")
    if not 0 <= j < p:
        raise ValueError("j must satisfy 0 <= j < p")
    prof = [0 if (w % p) == j else 1 for w in range(n + 1)]
    return from_profile(prof, n, kind="mod_p", params={"p": p, "j": j})


def and_n(n: int) -> BooleanFunction:
    prof = [1 if w == n else 0 for w in range(n + 1)]
    return from_profile(prof, n, kind="and")


def or_n(n: int) -> BooleanFunction:
    prof = [0 if w == 0 else 1 for w in range(n + 1)]
    return from_profile(prof, n, kind="or")


def pairwise_and(n: int) -> BooleanFunction:
    """1 iff the Hamming weight is 2 or 3 mod 4 (second least significant bit)."""
    prof = [(w >> 1) & 1 for w in range(n + 1)]
    return from_profile(prof, n, kind="pairwise_and")


def parity_n(n: int) -> BooleanFunction:
    prof = [w & 1 for w in range(n + 1)]
    return from_profile(prof, n, kind="parity")


def constant(b: int, n: int) -> BooleanFunction:
    return from_profile([b] * (n + 1), n, kind=f"const{b}")


def from_table(table: Iterable[int], kind: str = "custom") -> BooleanFunction:
    table = tuple(table)
    n = (len(table) - 1).bit_length()
    if 1 << n != len(table):
        raise ValueError("table length must be a power of two")
    f = BooleanFunction(n, table, kind=kind)
    prof = _profile_of(f)
    return f if prof is None else BooleanFunction(n, table, kind=kind,
                                                  symmetric_profile=prof)


def build(kind: str, n: int, **params) -> BooleanFunction:
    """Dispatch by kind name; used by the CLI function-spec parser."""
    if kind == "mod_p":
        return mod_p(params["p"], params.get("j", 0), n)
    factories = {"and": and_n, "or": or_n, "pairwise_and": pairwise_and,
                 "parity": parity_n}
    if kind in factories:
        return factories[kind](n)
    if kind in ("const0", "const1"):
        return constant(int(kind[-1]), n)
    if kind == "custom":
        return from_table(params["table"])
    raise ValueError(f"unknown function kind {kind!r}")


@dataclass(frozen=True)
class AnfPolynomial:
    """Algebraic normal form: the set of monomial masks with coefficient 1."""

    n: int
    monomials: frozenset[int]

    @property
    def degree(self) -> int:
        return max((popcount(m) for m in self.monomials), default=0)

    def __call__(self, x: "int | str | Sequence[int]") -> int:
        xi = parse_input(x, self.n)
        acc = 0
        for m in self.monomials:
            if m & xi == m:
                acc ^= 1
        return acc

    def weight_coefficients(self) -> tuple[int, ...] | None:
        """Per-degree coefficients if the ANF is symmetric, else None."""
        coef = [None] * (self.n + 1)
        for m in range(1 << self.n):
            w = popcount(m)
            bit = 1 if m in self.monomials else 0
            if coef[w] is None:
                coef[w] = bit
            elif coef[w] != bit:
                return None
        return tuple(coef)  # type: ignore[arg-type]


def anf(f: BooleanFunction) -> AnfPolynomial:
    """Moebius transform over the subset lattice."""
    coef = list(f.table)
    size = 1 << f.n
    step = 1
    while step < size:
        for lo in range(0, size, step << 1):
            for i in range(lo, lo + step):
                coef[i + step] ^= coef[i]
        step <<= 1
    return AnfPolynomial(f.n, frozenset(m for m in range(size) if coef[m]))


def walsh_hadamard(f: BooleanFunction, k: "int | str | Sequence[int]") -> float:
    """Fourier coefficient 2^-n sum_x (-1)^{f(x) + k.x}."""
    ki = parse_input(k, f.n)
    total = sum(-1 if (f.table[x] ^ dot2(ki, x)) else 1 for x in range(1 << f.n))
    return total / (1 << f.n)


def walsh_spectrum(f: BooleanFunction) -> list[float]:
    """All 2^n Fourier coefficients via the fast transform."""
    vals = [(-1) ** b for b in f.table]
    size = 1 << f.n
    step = 1
    while step < size:
        for lo in range(0, size, step << 1):
            for i in range(lo, lo + step):
                a, b = vals[i], vals[i + step]
                vals[i], vals[i + step] = a + b, a - b
        step <<= 1
    return [v / size for v in vals]


def f_max(f: BooleanFunction) -> float:
    """Largest absolute Fourier coefficient; distance to the best linear guess."""
    return max(abs(v) for v in walsh_spectrum(f))


def nchvm_bound(f: BooleanFunction) -> float:
    """Best success probability of any mod-2 linear (noncontextual) strategy."""
    return (1.0 + f_max(f)) / 2.0


@dataclass(frozen=True)
class ModPAnfCoefficients:
    """Complete-degree-mu coefficients of the weight-counting functions.

    ``vectors[mu][j]`` is the coefficient of the complete degree-mu symmetric
    monomial sum in the function that is 0 iff the weight is j mod p.
    """

    p: int
    n: int
    vectors: tuple[tuple[int, ...], ...]

    def coefficients_for(self, j: int) -> tuple[int, ...]:
        return tuple(v[j % self.p] for v in self.vectors)


def mod_p_anf_coeffs(p: int, n: int) -> ModPAnfCoefficients:
    """Cyclic-shift recurrence for the counting functions' ANF coefficients.

    Base case (0,1,...,1); each step adds the cyclically shifted previous
    vector over F_2.  Every vector stays nonzero, which is what forces a
    degree-n monomial for some residue j.
    """
    if p < 3 or p % 2 == 0:
        raise ValueError("p must be an odd integer >= 3")
    if n < 1:
        raise ValueError("n must be >= 1")
    vecs = [tuple(0 if j == 0 else 1 for j in range(p))]
    for _ in range(n):
        prev = vecs[-1]
        vecs.append(tuple(prev[j] ^ prev[(j - 1) % p] for j in range(p)))
    out = ModPAnfCoefficients(p, n, tuple(vecs))
    for mu, v in enumerate(out.vectors):
        if not any(v):
            raise AssertionError(f"coefficient vector vanished at degree {mu}")
    return out
