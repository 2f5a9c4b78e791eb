"""Steenrod algebra words, Adem rewriting, and cochain-level squares.

Mod 2 a monomial is a tuple (i_1, ..., i_r) meaning Sq^{i_1} ... Sq^{i_r}.
For odd p a monomial is a tuple of tokens, ``"b"`` for the Bockstein and a
positive int ``i`` for P^i.  The two algebras are kept apart.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .cohomology import Cochain
from .simplicial import ComplexError

BETA = "b"


@lru_cache(maxsize=None)
def binom_mod(n: int, k: int, p: int) -> int:
    """C(n, k) mod p by Lucas' theorem; zero outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return 0
    out = 1
    while n or k:
        a, b = n % p, k % p
        if b > a:
            return 0
        out = out * _small_binom(a, b) % p
        n //= p
        k //= p
    return out


@lru_cache(maxsize=None)
def _small_binom(a: int, b: int) -> int:
    from math import comb
    return comb(a, b)


# --- words -----------------------------------------------------------------

def degree(word: tuple, p: int) -> int:
    if p == 2:
        return sum(word)
    return sum(1 if t == BETA else 2 * t * (p - 1) for t in word)


def is_admissible(word: tuple, p: int) -> bool:
    if p == 2:
        return all(w >= 1 for w in word) and all(word[k] >= 2 * word[k + 1] for k in range(len(word) - 1))
    return _first_redex(word, p) is None and all(t == BETA or t >= 1 for t in word)


def _first_redex(word: tuple, p: int, pick=None):
    """Positions where a rewrite applies; returns one (the first unless
    ``pick`` chooses)."""
    spots = _redexes(word, p)
    if not spots:
        return None
    return spots[0] if pick is None else pick(spots)


def _redexes(word: tuple, p: int) -> list:
    out = []
    if p == 2:
        for k, w in enumerate(word):
            if w == 0:
                out.append(("unit", k))
        for k in range(len(word) - 1):
            a, b = word[k], word[k + 1]
            if a and b and a < 2 * b:
                out.append(("adem", k))
        return out
    for k, t in enumerate(word):
        if t == 0:
            out.append(("unit", k))
    for k in range(len(word) - 1):
        a, b = word[k], word[k + 1]
        if a == BETA and b == BETA:
            out.append(("bb", k))
        elif a != BETA and b != BETA and a and b and a < p * b:
            out.append(("pp", k))
        elif (a != BETA and a and b == BETA and k + 2 < len(word) and word[k + 2] != BETA
              and word[k + 2] and a <= p * word[k + 2]):
            out.append(("pbp", k))
    return out


def _rewrite(word: tuple, p: int, spot) -> dict:
    """One rewrite step: word -> {word': coefficient}."""
    kind, k = spot
    if kind == "unit":
        return {word[:k] + word[k + 1:]: 1}
    if kind == "bb":
        return {}
    out: dict[tuple, int] = {}

    def put(mid, c):
        c %= p
        if c:
            w = word[:k] + mid + word[k + (3 if kind == "pbp" else 2):]
            out[w] = (out.get(w, 0) + c) % p
            if not out[w]:
                del out[w]

    if kind == "adem":
        a, b = word[k], word[k + 1]
        for j in range(a // 2 + 1):
            c = binom_mod(b - 1 - j, a - 2 * j, 2)
            if c:
                put(_sq_pair(a + b - j, j), 1)
        return out
    if kind == "pp":
        a, b = word[k], word[k + 1]
        for j in range(a // p + 1):
            c = (-1) ** (a + j) * binom_mod((p - 1) * (b - j) - 1, a - p * j, p)
            put(_p_pair(a + b - j, j), c)
        return out
    # P^a b P^b, a <= p b
    a, b = word[k], word[k + 2]
    for j in range(a // p + 1):
        c1 = (-1) ** (a + j) * binom_mod((p - 1) * (b - j), a - p * j, p)
        put((BETA,) + _p_pair(a + b - j, j), c1)
        c2 = (-1) ** (a + j + 1) * binom_mod((p - 1) * (b - j) - 1, a - p * j - 1, p)
        put(_p_pair(a + b - j, j, beta=True), c2)
    return out


def _sq_pair(x, j):
    return (x, j) if j else (x,)


def _p_pair(x, j, beta=False):
    mid = (BETA,) if beta else ()
    return (x,) + mid + ((j,) if j else ())


@dataclass
class SteenrodElement:
    """Z/p-linear combination of monomials, all of one degree."""
    p: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        t = {}
        for w, c in self.terms.items():
            w = tuple(w)
            c %= self.p
            if c:
                t[w] = (t.get(w, 0) + c) % self.p
        self.terms = {w: c for w, c in sorted(t.items(), key=lambda x: _key(x[0])) if c}
        degs = {degree(w, self.p) for w in self.terms}
        if len(degs) > 1:
            raise ValueError("Steenrod element is not homogeneous")

    @classmethod
    def word(cls, word: Sequence, p: int = 2) -> "SteenrodElement":
        return cls(p, {tuple(word): 1})

    @property
    def degree(self) -> int | None:
        return degree(next(iter(self.terms)), self.p) if self.terms else None

    def __add__(self, other):
        t = dict(self.terms)
        for w, c in other.terms.items():
            t[w] = t.get(w, 0) + c
        return SteenrodElement(self.p, t)

    def __mul__(self, other):
        t = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                t[w1 + w2] = t.get(w1 + w2, 0) + c1 * c2
        return SteenrodElement(self.p, t)

    def __eq__(self, other):
        return isinstance(other, SteenrodElement) and self.p == other.p and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.terms.items():
            mono = format_word(w, self.p)
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts)


def _key(w):
    return tuple((0, 0) if t == BETA else (1, t) for t in w)


def format_word(w: tuple, p: int) -> str:
    if not w:
        return "1"
    if p == 2:
        return "".join(f"Sq^{i}" for i in w)
    return "".join("b" if t == BETA else f"P^{t}" for t in w)


def parse_word(text: str, p: int) -> tuple:
    """"1,2" -> (1, 2); for odd p "b" marks a Bockstein, e.g. "1,b,1"."""
    out = []
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        if tok.lower() in ("b", "beta"):
            if p == 2:
                out.append(1)  # Sq^1 is the Bockstein mod 2
            else:
                out.append(BETA)
        else:
            v = int(tok)
            if v < 0:
                raise ValueError("negative exponent")
            out.append(v)
    return tuple(out)


def adem_reduce(e: SteenrodElement | Sequence, p: int = 2, rng: random.Random | None = None) -> SteenrodElement:
    """Rewrite to admissible monomials.

    With ``rng`` the redex is chosen at random at every step instead of the
    leftmost one; the normal form is the same either way.
    """
    if not isinstance(e, SteenrodElement):
        e = SteenrodElement.word(e, p)
    p = e.p
    pick = (lambda spots: rng.choice(spots)) if rng is not None else None
    done: dict[tuple, int] = {}
    todo = dict(e.terms)
    while todo:
        w, c = todo.popitem()
        spot = _first_redex(w, p, pick)
        if spot is None:
            done[w] = (done.get(w, 0) + c) % p
            continue
        for w2, c2 in _rewrite(w, p, spot).items():
            todo[w2] = (todo.get(w2, 0) + c * c2) % p
            if not todo[w2]:
                del todo[w2]
    return SteenrodElement(p, done)


def admissible_monomials(d: int, p: int = 2) -> list[tuple]:
    """All admissible monomials of degree d, generated recursively."""
    if p == 2:
        out = []

        def rec(rem, prev, acc):
            if rem == 0:
                out.append(tuple(acc))
                return
            # next exponent i must satisfy prev >= 2 i
            top = rem if prev is None else min(rem, prev // 2)
            for i in range(top, 0, -1):
                rec(rem - i, i, acc + [i])

        rec(d, None, [])
        return sorted(out)
    out = []
    q = 2 * (p - 1)

    def rec_odd(rem, acc):
        # a redex inside a prefix survives in every extension, so prune early
        if acc and not is_admissible(tuple(acc), p):
            return
        if rem == 0:
            out.append(tuple(acc))
            return
        if (not acc or acc[-1] != BETA) and rem >= 1:
            rec_odd(rem - 1, acc + [BETA])
        for i in range(1, rem // q + 1):
            rec_odd(rem - i * q, acc + [i])

    rec_odd(d, [])
    return sorted(out, key=_key)


def admissible_dimension_series(n: int, p: int = 2) -> list[int]:
    """Dimensions of the Steenrod algebra in degrees 0..n from the Milnor
    basis Poincare series (independent of the admissible enumeration)."""
    coeffs = [0] * (n + 1)
    coeffs[0] = 1
    if p == 2:
        k = 1
        while 2 ** k - 1 <= n:
            g = 2 ** k - 1
            for i in range(g, n + 1):
                coeffs[i] += coeffs[i - g]
            k += 1
        return coeffs
    k = 0
    while 2 * p ** k - 1 <= n:  # exterior generators tau_k
        g = 2 * p ** k - 1
        for i in range(n, g - 1, -1):
            coeffs[i] += coeffs[i - g]
        k += 1
    k = 1
    while 2 * (p ** k - 1) <= n:  # polynomial generators xi_k
        g = 2 * (p ** k - 1)
        for i in range(g, n + 1):
            coeffs[i] += coeffs[i - g]
        k += 1
    return coeffs


def random_word(rng: random.Random, max_degree: int, p: int = 2, max_len: int = 5) -> tuple:
    """Random word with exponents >= 1 and total degree <= max_degree."""
    while True:
        n = rng.randint(1, max_len)
        if p == 2:
            w = tuple(rng.randint(1, max(1, max_degree // 2)) for _ in range(n))
        else:
            w = tuple(BETA if rng.random() < 0.3 else rng.randint(1, 3) for _ in range(n))
        if 0 < degree(w, p) <= max_degree:
            return w


# --- Cartan formula --------------------------------------------------------

def cartan_expand(k: int, u_deg: int, v_deg: int) -> list[tuple[int, int, int]]:
    """Terms (i, k - i, coefficient) of Sq^k(u v) = sum Sq^i u Sq^{k-i} v,
    dropping those killed because Sq^i vanishes above the degree."""
    out = []
    for i in range(k + 1):
        if i <= u_deg and k - i <= v_deg:
            out.append((i, k - i, 1))
    return out


# --- cochain level ---------------------------------------------------------

def cup_i(u: Cochain, v: Cochain, i: int) -> Cochain:
    """Steenrod's cup-i product mod 2 on the vertex-id order.

    On an n-simplex with n = deg u + deg v - i, cut 0..n at j_0 < ... < j_i
    into intervals [0, j_0], [j_0, j_1], ..., [j_i, n]; u reads the even
    intervals, v the odd ones.
    """
    if u.p != 2 or v.p != 2:
        raise ComplexError("cup-i products are implemented mod 2")
    if u.complex is not v.complex and u.complex != v.complex:
        raise ComplexError("cochains live on different complexes")
    K = u.complex
    a, b = u.degree, v.degree
    n = a + b - i
    out = {}
    if i < 0 or n < 0 or not u.values or not v.values:
        return Cochain(K, max(n, 0), {}, 2)
    for s in K.simplices(n):
        acc = 0
        for cuts in itertools.combinations(range(n + 1), i + 1):
            bounds = (0,) + cuts + (n,)
            front, back = [], []
            for r in range(i + 2):
                lo, hi = bounds[r], bounds[r + 1]
                part = front if r % 2 == 0 else back
                part.extend(range(lo, hi + 1))
            if len(front) != a + 1 or len(back) != b + 1:
                continue
            # shared endpoints appear twice in one part when an interval is
            # a single point; those terms are degenerate
            if len(set(front)) != len(front) or len(set(back)) != len(back):
                continue
            x = u.values.get(tuple(s[t] for t in front))
            if x:
                y = v.values.get(tuple(s[t] for t in back))
                if y:
                    acc ^= 1
        if acc:
            out[s] = 1
    return Cochain(K, n, out, 2)


def sq_on_cochain(i: int, c: Cochain) -> Cochain:
    """Sq^i c = c cup_{n-i} c for a mod-2 cocycle c of degree n."""
    if c.p != 2:
        raise ComplexError("Sq^i needs a mod-2 cochain")
    if not c.is_cocycle():
        raise ComplexError("Sq^i of a non-cocycle")
    n = c.degree
    if i < 0:
        raise ValueError("negative Sq index")
    if i > n:
        return Cochain(c.complex, n + i, {}, 2)
    return cup_i(c, c, n - i)


def apply_word(word: Sequence[int], c: Cochain) -> Cochain:
    """Apply Sq^{i_1} ... Sq^{i_r} (rightmost first) at cochain level."""
    for i in reversed(tuple(word)):
        c = sq_on_cochain(i, c)
    return c


def apply_element(e: SteenrodElement, c: Cochain) -> Cochain:
    if e.p != 2:
        raise ComplexError("only mod-2 elements act on cochains")
    out = None
    for w, coef in e.terms.items():
        if coef % 2 == 0:
            continue
        x = apply_word(w, c)
        out = x if out is None else out + x
    if out is None:
        d = c.degree + (e.degree or 0)
        return Cochain(c.complex, d, {}, 2)
    return out
