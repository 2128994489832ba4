"""Operadores diferenciais sobre símbolos, deslocamentos de Bopp e campos de Moyal-Lie.

Um ``DiffOperator`` é uma soma finita ``Σ c_{j,k}(p, q) ∂_p^j ∂_q^k`` em forma
normal: coeficientes à esquerda, derivadas à direita.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple, Union

from sympy.utilities.iterables import multiset_permutations

from core.algebra import (
    HBAR,
    IMAGINARY_UNIT,
    GammaSeries,
    PolySymbol,
    RatSymbol,
    as_rat,
)
from core.erros import ErroCalculo
from core.estrela import star_product
from core.exponencial import ExpSymbol
from core.expressao import format_plain

_logger = logging.getLogger(__name__)

Orders = Tuple[int, int]
Operand = Union[RatSymbol, GammaSeries, ExpSymbol]

SIDES = ("left", "right")
LETTERS = ("p", "q")


def _derivative(f: RatSymbol, dp: int, dq: int) -> RatSymbol:
    for _ in range(dp):
        f = f.diff("p")
    for _ in range(dq):
        f = f.diff("q")
    return f


class DiffOperator:
    """Operador diferencial em (p, q) com coeficientes racionais."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Orders, object] = None):
        clean: Dict[Orders, RatSymbol] = {}
        for (dp, dq), coeff in (terms or {}).items():
            if dp < 0 or dq < 0:
                raise ValueError("Ordens de derivação devem ser não negativas.")
            coeff = as_rat(coeff)
            if not coeff.is_zero:
                clean[(dp, dq)] = coeff
        self.terms: Dict[Orders, RatSymbol] = dict(sorted(clean.items()))

    @classmethod
    def zero(cls) -> "DiffOperator":
        return cls()

    @classmethod
    def identity(cls) -> "DiffOperator":
        return cls({(0, 0): 1})

    @classmethod
    def multiplication(cls, f) -> "DiffOperator":
        return cls({(0, 0): f})

    @classmethod
    def partial(cls, name: str) -> "DiffOperator":
        if name == "p":
            return cls({(1, 0): 1})
        if name == "q":
            return cls({(0, 1): 1})
        raise ValueError(f"Derivada apenas em p ou q, não em '{name}'.")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def order(self) -> int:
        return max((dp + dq for dp, dq in self.terms), default=0)

    def __iter__(self) -> Iterator[Tuple[Orders, RatSymbol]]:
        return iter(self.terms.items())

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        terms = dict(self.terms)
        for key, coeff in other.terms.items():
            terms[key] = terms[key] + coeff if key in terms else coeff
        return DiffOperator(terms)

    def __neg__(self) -> "DiffOperator":
        return DiffOperator({key: -coeff for key, coeff in self.terms.items()})

    def __sub__(self, other: "DiffOperator") -> "DiffOperator":
        return self + (-other)

    def scale(self, factor) -> "DiffOperator":
        """Multiplicação à esquerda por uma fração."""
        factor = as_rat(factor)
        return DiffOperator({key: factor * coeff for key, coeff in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, DiffOperator):
            return compose(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int) -> "DiffOperator":
        result = DiffOperator.identity()
        for _ in range(n):
            result = compose(result, self)
        return result

    def __call__(self, f: Operand) -> Operand:
        return apply(self, f)

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self.terms.keys() == other.terms.keys() and all(
            self.terms[k] == other.terms[k] for k in self.terms)

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __repr__(self):
        return f"DiffOperator({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for (dp, dq), coeff in self.terms.items():
            factors = [f"({format_plain(coeff)})"]
            if dp:
                factors.append("Dp" if dp == 1 else f"Dp^{dp}")
            if dq:
                factors.append("Dq" if dq == 1 else f"Dq^{dq}")
            pieces.append("*".join(factors))
        return " + ".join(pieces)

    def to_dict(self) -> list:
        return [{"dp": dp, "dq": dq, "coeff": coeff.to_dict()} for (dp, dq), coeff in self.terms.items()]

    def to_json(self) -> str:
        """Serializa o operador para uma string JSON."""
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_dict(cls, items: Sequence[dict]) -> "DiffOperator":
        terms: Dict[Orders, RatSymbol] = {}
        for item in items:
            key = (int(item["dp"]), int(item["dq"]))
            coeff = RatSymbol.from_dict(item["coeff"])
            terms[key] = terms[key] + coeff if key in terms else coeff
        return cls(terms)

    @classmethod
    def from_json(cls, json_str: str) -> "DiffOperator":
        """Cria um operador a partir de uma string JSON."""
        return cls.from_dict(json.loads(json_str))


def compose(A: DiffOperator, B: DiffOperator) -> DiffOperator:
    """A ∘ B em forma normal pela regra de Leibniz."""
    terms: Dict[Orders, RatSymbol] = {}
    for (ap, aq), a in A.terms.items():
        for (bp, bq), b in B.terms.items():
            for r in range(ap + 1):
                for s in range(aq + 1):
                    db = _derivative(b, ap - r, aq - s)
                    if db.is_zero:
                        continue
                    key = (r + bp, s + bq)
                    term = a * db * (comb(ap, r) * comb(aq, s))
                    terms[key] = terms[key] + term if key in terms else term
    return DiffOperator(terms)


def operator_commutator(A: DiffOperator, B: DiffOperator) -> DiffOperator:
    return compose(A, B) - compose(B, A)


def apply(A: DiffOperator, f: Operand) -> Operand:
    """Ação de A sobre uma fração, série em gamma ou símbolo exponencial."""
    if isinstance(f, GammaSeries):
        return f.map(lambda c: apply(A, c))
    if isinstance(f, ExpSymbol):
        total = f * 0
        for (dp, dq), coeff in A.terms.items():
            total = total + f.derivative(dp, dq) * coeff
        return total
    f = as_rat(f)
    total = RatSymbol.constant(0)
    for (dp, dq), coeff in A.terms.items():
        df = _derivative(f, dp, dq)
        if not df.is_zero:
            total = total + coeff * df
    return total


# ----------------------------------------------------------------------------
# Deslocamentos de Bopp e imagens dos monômios simétricos
# ----------------------------------------------------------------------------

def _half_i_hbar() -> RatSymbol:
    return RatSymbol.variable(HBAR) * IMAGINARY_UNIT / 2


def bopp(side: str, var: str) -> DiffOperator:
    """p_L = p + (iħ/2)∂_q, p_R = p − (iħ/2)∂_q, q_L = q − (iħ/2)∂_p, q_R = q + (iħ/2)∂_p."""
    if side not in SIDES or var not in LETTERS:
        raise ValueError(f"Deslocamento de Bopp inválido: ({side}, {var})")
    shift = _half_i_hbar()
    sign = 1 if (side == "left") == (var == "p") else -1
    other = "q" if var == "p" else "p"
    return DiffOperator.multiplication(RatSymbol.variable(var)) + DiffOperator.partial(other).scale(shift * sign)


def weyl_ordered_monomial(P: DiffOperator, Q: DiffOperator, m: int, n: int) -> DiffOperator:
    """Ordenação simétrica de P^m Q^n para [P, Q] escalar: 2^{-m} Σ_k C(m,k) P^{m−k} Q^n P^k."""
    Qn = Q ** n
    powers = [DiffOperator.identity()]
    for _ in range(m):
        powers.append(compose(powers[-1], P))
    total = DiffOperator.zero()
    for k in range(m + 1):
        total = total + compose(compose(powers[m - k], Qn), powers[k]).scale(comb(m, k))
    return total.scale(RatSymbol.constant(1) / 2 ** m)


@dataclass(frozen=True)
class WeylMonomial:
    """Monômio simetricamente ordenado cujo símbolo é p^m q^n."""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise ValueError("Expoentes do monômio devem ser não negativos.")

    def symbol(self) -> RatSymbol:
        return RatSymbol.variable("p") ** self.m * RatSymbol.variable("q") ** self.n


@lru_cache(maxsize=None)
def _image(m: int, n: int) -> DiffOperator:
    left = weyl_ordered_monomial(bopp("left", "p"), bopp("left", "q"), m, n)
    right = weyl_ordered_monomial(bopp("right", "p"), bopp("right", "q"), m, n)
    _logger.debug("imagem S_{%d,%d} calculada", m, n)
    return left - right


def image_of_monomial(t: Union[WeylMonomial, Tuple[int, int]]) -> DiffOperator:
    """S_{m,n}: ordenação simétrica de p_L^m q_L^n menos a de p_R^m q_R^n.

    Age como S_{m,n} f = {f, p^m q^n}_M.
    """
    if not isinstance(t, WeylMonomial):
        t = WeylMonomial(*t)
    return _image(t.m, t.n)


# ----------------------------------------------------------------------------
# Expansões de geradores
# ----------------------------------------------------------------------------

class GeneratorExpansion:
    """Gerador A = Σ a_{m,n} t_{m,n} com suporte finito."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[Orders, object] = None):
        clean: Dict[Orders, RatSymbol] = {}
        for (m, n), a in (coeffs or {}).items():
            a = as_rat(a)
            if not (a.free_of("p") and a.free_of("q")):
                raise ErroCalculo(f"Coeficiente a_{{{m},{n}}} depende de p ou q: {a}")
            if not a.is_zero:
                clean[(m, n)] = a
        self.coeffs: Dict[Orders, RatSymbol] = dict(sorted(clean.items()))

    @classmethod
    def from_symbol(cls, f) -> "GeneratorExpansion":
        """Decompõe um símbolo polinomial em p, q nos coeficientes a_{m,n}."""
        f = as_rat(f)
        if not f.is_polynomial_in(("p", "q")):
            raise ErroCalculo(f"O símbolo '{f}' não é polinomial em p e q.")
        coeffs: Dict[Orders, RatSymbol] = {}
        for m, by_p in f.coefficients_in("p").items():
            for n, a in by_p.coefficients_in("q").items():
                coeffs[(m, n)] = a
        return cls(coeffs)

    def to_symbol(self) -> RatSymbol:
        total = RatSymbol.constant(0)
        for (m, n), a in self.coeffs.items():
            total = total + a * WeylMonomial(m, n).symbol()
        return total

    def __add__(self, other: "GeneratorExpansion") -> "GeneratorExpansion":
        coeffs = dict(self.coeffs)
        for key, a in other.coeffs.items():
            coeffs[key] = coeffs[key] + a if key in coeffs else a
        return GeneratorExpansion(coeffs)

    def scale(self, factor) -> "GeneratorExpansion":
        return GeneratorExpansion({key: a * as_rat(factor) for key, a in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, GeneratorExpansion):
            return NotImplemented
        return self.coeffs.keys() == other.coeffs.keys() and all(
            self.coeffs[k] == other.coeffs[k] for k in self.coeffs)

    def __repr__(self):
        inner = "; ".join(f"{m},{n}:{format_plain(a)}" for (m, n), a in self.coeffs.items())
        return f"GeneratorExpansion({inner})"


def moyal_lie_vector(A: GeneratorExpansion) -> DiffOperator:
    """V_A = Σ a_{m,n} S_{m,n}."""
    total = DiffOperator.zero()
    for (m, n), a in A.coeffs.items():
        total = total + image_of_monomial((m, n)).scale(a)
    return total


# ----------------------------------------------------------------------------
# Palavras de operadores
# ----------------------------------------------------------------------------

def _letters(word: Union[str, Iterable[str]]) -> Tuple[str, ...]:
    if isinstance(word, str):
        word = [c for c in word.replace("^", "").replace(",", "").replace(" ", "")]
    letters = tuple(word)
    for letter in letters:
        if letter not in LETTERS:
            raise ValueError(f"Palavra aceita apenas as letras p e q, não '{letter}'.")
    return letters


def weyl_symbol_of_word(word: Union[str, Iterable[str]]) -> PolySymbol:
    """Símbolo de Weyl do produto de operadores p̂, q̂ na ordem dada."""
    result = RatSymbol.constant(1)
    for letter in _letters(word):
        result = star_product(result, RatSymbol.variable(letter))
    return result.to_poly()


def weyl_symmetrize(word: Union[str, Iterable[str]]) -> PolySymbol:
    """Média dos símbolos de todas as ordenações distintas das letras da palavra."""
    letters = _letters(word)
    total = RatSymbol.constant(0)
    count = 0
    for ordering in multiset_permutations(list(letters)):
        total = total + weyl_symbol_of_word(ordering).to_rat()
        count += 1
    if count == 0:
        return PolySymbol.constant(1)
    return (total / count).to_poly()
