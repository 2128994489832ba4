"""Aritmética exata do cálculo no espaço de fase.

Coeficientes vivem em ℚ(i) (o domínio ``QQ_I`` do sympy). Polinômios e frações
usam as variáveis distinguidas ``p, q, hbar, gamma`` seguidas dos parâmetros
declarados em ordem lexicográfica; a ordem fixa garante mapas de termos
canônicos, de modo que símbolos iguais têm representações idênticas.
"""

from __future__ import annotations

import json
import logging
import re
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.fields import FracField
from sympy.polys.orderings import lex

from core.erros import (
    ErroCalculo,
    IncompatibleSymbolsError,
    NotGammaAdicUnitError,
    ZeroDenominatorError,
)

_logger = logging.getLogger(__name__)

HBAR = "hbar"
GAMMA = "gamma"
DISTINGUISHED = ("p", "q", HBAR, GAMMA)

GaussianRational = QQ_I.dtype
Exponents = Tuple[int, ...]
Number = Union[int, Fraction, str, GaussianRational]

_RATIONAL_TEXT = re.compile(r"^\s*-?\d+\s*(/\s*\d+\s*)?$")


# ----------------------------------------------------------------------------
# Coeficientes
# ----------------------------------------------------------------------------

def rational(value) -> "QQ.dtype":
    """Converte int, Fraction ou texto "n/d" em um racional do sympy."""
    if isinstance(value, str):
        if not _RATIONAL_TEXT.match(value):
            raise ValueError(f"Racional inválido: '{value}' (use a forma n/d).")
        value = Fraction(value.replace(" ", ""))
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, int):
        return QQ(value)
    return QQ.convert(value)


def gaussian(re_part=0, im_part=0) -> GaussianRational:
    """Número a + b·i com a, b racionais."""
    return QQ_I(rational(re_part), rational(im_part))


def as_gaussian(value: Number) -> GaussianRational:
    if isinstance(value, GaussianRational):
        return value
    return gaussian(value)


def re_im(value: GaussianRational) -> Tuple[Fraction, Fraction]:
    """Partes real e imaginária como ``Fraction``."""
    return (Fraction(int(value.x.numerator), int(value.x.denominator)),
            Fraction(int(value.y.numerator), int(value.y.denominator)))


def rational_text(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


IMAGINARY_UNIT = gaussian(0, 1)


# ----------------------------------------------------------------------------
# Variáveis e corpos
# ----------------------------------------------------------------------------

def canonical_variables(names: Iterable[str] = ()) -> Tuple[str, ...]:
    """Tupla (p, q, hbar, gamma, parâmetros ordenados)."""
    extra = sorted({n for n in names if n not in DISTINGUISHED})
    return DISTINGUISHED + tuple(extra)


@lru_cache(maxsize=None)
def _field(variables: Tuple[str, ...]) -> FracField:
    _logger.debug("novo corpo de frações sobre %s", variables)
    return FracField(tuple(sympy.Symbol(v) for v in variables), QQ_I, lex)


def _lift_poly(poly, source: Tuple[str, ...], target: Tuple[str, ...]):
    if source == target:
        return poly
    ring = _field(target).ring
    positions = [target.index(v) for v in source]
    terms = {}
    for monom, coeff in poly.items():
        exps = [0] * len(target)
        for pos, k in zip(positions, monom):
            exps[pos] = k
        terms[tuple(exps)] = coeff
    return ring.from_dict(terms)


def _poly_degree(poly, index: int) -> int:
    return max((monom[index] for monom in poly.keys()), default=0)


def _sorted_terms(poly) -> List[Tuple[Exponents, GaussianRational]]:
    return sorted(poly.items(), key=lambda kv: kv[0], reverse=True)


def _terms_to_list(poly) -> List[dict]:
    out = []
    for monom, coeff in _sorted_terms(poly):
        re_part, im_part = re_im(coeff)
        out.append({
            "coeff": {"re": rational_text(re_part), "im": rational_text(im_part)},
            "exps": list(monom),
        })
    return out


def _terms_from_list(items: Sequence[dict], variables: Tuple[str, ...]) -> Dict[Exponents, GaussianRational]:
    terms: Dict[Exponents, GaussianRational] = {}
    for item in items:
        exps = tuple(int(e) for e in item["exps"])
        if len(exps) != len(variables) or any(e < 0 for e in exps):
            raise ValueError(f"Expoentes inválidos: {item['exps']}")
        coeff = item["coeff"]
        terms[exps] = gaussian(coeff.get("re", "0/1"), coeff.get("im", "0/1"))
    return terms


def _check_variables(names: Sequence[str]) -> Tuple[str, ...]:
    variables = tuple(names)
    if variables != canonical_variables(variables):
        raise ValueError(f"Ordem de variáveis não canônica: {list(variables)}")
    return variables


# ----------------------------------------------------------------------------
# PolySymbol
# ----------------------------------------------------------------------------

class PolySymbol:
    """Polinômio esparso com coeficientes em ℚ(i)."""

    __slots__ = ("variables", "_poly")

    def __init__(self, variables: Tuple[str, ...], poly):
        self.variables = variables
        self._poly = poly

    @classmethod
    def from_terms(cls, terms: Mapping[Exponents, Number], variables: Iterable[str] = ()) -> "PolySymbol":
        variables = canonical_variables(variables)
        ring = _field(variables).ring
        return cls(variables, ring.from_dict({tuple(k): as_gaussian(v) for k, v in terms.items()}))

    @classmethod
    def constant(cls, value: Number, variables: Iterable[str] = ()) -> "PolySymbol":
        variables = canonical_variables(variables)
        return cls(variables, _field(variables).ring.ground_new(as_gaussian(value)))

    @classmethod
    def variable(cls, name: str) -> "PolySymbol":
        variables = canonical_variables([name])
        return cls(variables, _field(variables).ring.gens[variables.index(name)])

    @property
    def terms(self) -> Dict[Exponents, GaussianRational]:
        return dict(_sorted_terms(self._poly))

    @property
    def is_zero(self) -> bool:
        return not self._poly

    @property
    def is_constant(self) -> bool:
        return all(not any(m) for m in self._poly.keys())

    def lift(self, variables: Tuple[str, ...]) -> "PolySymbol":
        return PolySymbol(variables, _lift_poly(self._poly, self.variables, variables))

    def _coerce(self, other) -> Tuple["PolySymbol", "PolySymbol"]:
        if not isinstance(other, PolySymbol):
            other = PolySymbol.constant(other, self.variables)
        if other.variables == self.variables:
            return self, other
        target = canonical_variables(self.variables + other.variables)
        return self.lift(target), other.lift(target)

    def __add__(self, other):
        a, b = self._coerce(other)
        return PolySymbol(a.variables, a._poly + b._poly)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._coerce(other)
        return PolySymbol(a.variables, a._poly - b._poly)

    def __rsub__(self, other):
        a, b = self._coerce(other)
        return PolySymbol(a.variables, b._poly - a._poly)

    def __mul__(self, other):
        a, b = self._coerce(other)
        return PolySymbol(a.variables, a._poly * b._poly)

    __rmul__ = __mul__

    def __neg__(self):
        return PolySymbol(self.variables, -self._poly)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("Potência de polinômio exige expoente inteiro não negativo.")
        if n == 0:
            return PolySymbol(self.variables, self._poly.ring.one)
        return PolySymbol(self.variables, self._poly ** n)

    def diff(self, name: str) -> "PolySymbol":
        if name not in self.variables:
            return PolySymbol(self.variables, self._poly.ring.zero)
        return PolySymbol(self.variables, self._poly.diff(self.variables.index(name)))

    def degree(self, name: str) -> int:
        if name not in self.variables:
            return 0
        return _poly_degree(self._poly, self.variables.index(name))

    def total_degree(self, names: Iterable[str]) -> int:
        idx = [self.variables.index(n) for n in names if n in self.variables]
        return max((sum(m[i] for i in idx) for m in self._poly.keys()), default=0)

    def to_rat(self) -> "RatSymbol":
        field = _field(self.variables)
        return RatSymbol(self.variables, field.new(self._poly))

    def __eq__(self, other):
        if not isinstance(other, PolySymbol):
            try:
                other = PolySymbol.constant(other, self.variables)
            except (TypeError, ValueError, sympy.polys.polyerrors.CoercionFailed):
                return NotImplemented
        a, b = self._coerce(other)
        return a._poly == b._poly

    def __hash__(self):
        return hash(tuple(sorted((self._reduced_key()))))

    def _reduced_key(self):
        used = [i for i, v in enumerate(self.variables)
                if v in DISTINGUISHED or _poly_degree(self._poly, i) > 0]
        return [((tuple((self.variables[i], m[i]) for i in used)), c) for m, c in self._poly.items()]

    def __repr__(self):
        return f"PolySymbol({self})"

    def __str__(self):
        from core.expressao import format_plain
        return format_plain(self.to_rat())

    def to_dict(self) -> dict:
        return {"vars": list(self.variables), "terms": _terms_to_list(self._poly)}

    def to_json(self) -> str:
        """Serializa o polinômio para uma string JSON."""
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "PolySymbol":
        variables = _check_variables(data.get("vars", DISTINGUISHED))
        return cls.from_terms(_terms_from_list(data.get("terms", []), variables), variables)

    @classmethod
    def from_json(cls, json_str: str) -> "PolySymbol":
        """Cria um polinômio a partir de uma string JSON."""
        return cls.from_dict(json.loads(json_str))


# ----------------------------------------------------------------------------
# RatSymbol
# ----------------------------------------------------------------------------

def _substitute_poly(poly, source: Tuple[str, ...], ring, target: Tuple[str, ...],
                     images: Dict[int, Tuple[object, object]]):
    """Substitui variáveis de ``poly`` por frações n/d (já no anel alvo).

    Devolve (N, D) com poly(imagens) = N/D e D = Π d_i^{grau_i}.
    """
    degrees = {i: _poly_degree(poly, i) for i in images}
    denominator = ring.one
    for i, (_, den) in images.items():
        denominator *= den ** degrees[i]
    if not images:
        return _lift_poly(poly, source, target), denominator
    positions = [target.index(v) for v in source]
    power_cache: Dict[Tuple[int, int], object] = {}

    def power(i: int, e: int):
        key = (i, e)
        if key not in power_cache:
            num, den = images[i]
            # PolyElement recusa 0**0
            head = num ** e if e else ring.one
            power_cache[key] = head * den ** (degrees[i] - e)
        return power_cache[key]

    numerator = ring.zero
    for monom, coeff in poly.items():
        exps = [0] * len(target)
        for i, k in enumerate(monom):
            if i not in images:
                exps[positions[i]] += k
        term = ring.term_new(tuple(exps), coeff)
        for i in images:
            term *= power(i, monom[i])
        numerator += term
    return numerator, denominator


class RatSymbol:
    """Fração de polinômios normalizada (mdc cancelado, denominador canônico)."""

    __slots__ = ("variables", "_frac")

    def __init__(self, variables: Tuple[str, ...], frac):
        self.variables = variables
        self._frac = frac

    # Construção -------------------------------------------------------------

    @classmethod
    def constant(cls, value: Number, variables: Iterable[str] = ()) -> "RatSymbol":
        variables = canonical_variables(variables)
        field = _field(variables)
        return cls(variables, field.new(field.ring.ground_new(as_gaussian(value))))

    @classmethod
    def variable(cls, name: str) -> "RatSymbol":
        return PolySymbol.variable(name).to_rat()

    @classmethod
    def from_polys(cls, num: PolySymbol, den: PolySymbol) -> "RatSymbol":
        return ratfunc_normalize(num, den)

    # Acesso -----------------------------------------------------------------

    @property
    def num(self) -> PolySymbol:
        return PolySymbol(self.variables, self._frac.numer)

    @property
    def den(self) -> PolySymbol:
        return PolySymbol(self.variables, self._frac.denom)

    @property
    def is_zero(self) -> bool:
        return not self._frac.numer

    @property
    def is_constant(self) -> bool:
        return self.num.is_constant and self.den.is_constant

    def as_number(self) -> GaussianRational:
        if not self.is_constant:
            raise ValueError(f"O símbolo '{self}' não é constante.")
        n = self._frac.numer.get(self._zero_monom(), QQ_I.zero)
        d = self._frac.denom.get(self._zero_monom(), QQ_I.one)
        return n / d

    def _zero_monom(self) -> Exponents:
        return (0,) * len(self.variables)

    def free_of(self, name: str) -> bool:
        return self.num.degree(name) == 0 and self.den.degree(name) == 0

    def is_polynomial_in(self, names: Iterable[str]) -> bool:
        den = self.den
        return all(den.degree(n) == 0 for n in names)

    def degree(self, name: str) -> int:
        return self.num.degree(name)

    def total_degree(self, names: Iterable[str]) -> int:
        return self.num.total_degree(names)

    def to_poly(self) -> PolySymbol:
        if not self.den.is_constant:
            raise ErroCalculo(f"O símbolo '{self}' não é polinomial.")
        inverse = QQ_I.one / self.as_den_constant()
        return PolySymbol(self.variables, self._frac.numer * inverse)

    def as_den_constant(self) -> GaussianRational:
        return self._frac.denom.get(self._zero_monom(), QQ_I.one)

    # Aritmética -------------------------------------------------------------

    def lift(self, variables: Tuple[str, ...]) -> "RatSymbol":
        if variables == self.variables:
            return self
        field = _field(variables)
        numer = _lift_poly(self._frac.numer, self.variables, variables)
        denom = _lift_poly(self._frac.denom, self.variables, variables)
        return RatSymbol(variables, field.raw_new(numer, denom))

    def _coerce(self, other) -> Tuple["RatSymbol", "RatSymbol"]:
        other = as_rat(other, self.variables)
        if other.variables == self.variables:
            return self, other
        target = canonical_variables(self.variables + other.variables)
        return self.lift(target), other.lift(target)

    def _wrap(self, frac) -> "RatSymbol":
        return RatSymbol(self.variables, frac)

    def __add__(self, other):
        if _foreign(other):
            return NotImplemented
        a, b = self._coerce(other)
        return a._wrap(a._frac + b._frac)

    __radd__ = __add__

    def __sub__(self, other):
        if _foreign(other):
            return NotImplemented
        a, b = self._coerce(other)
        return a._wrap(a._frac - b._frac)

    def __rsub__(self, other):
        a, b = self._coerce(other)
        return a._wrap(b._frac - a._frac)

    def __mul__(self, other):
        if _foreign(other):
            return NotImplemented
        a, b = self._coerce(other)
        return a._wrap(a._frac * b._frac)

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._coerce(other)
        if b.is_zero:
            raise ZeroDenominatorError(f"Divisão de '{self}' por zero.")
        return a._wrap(a._frac / b._frac)

    def __rtruediv__(self, other):
        a, b = self._coerce(other)
        return b / a

    def __neg__(self):
        return self._wrap(-self._frac)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise ValueError("Expoente deve ser inteiro.")
        if n == 0:
            return self._wrap(self._frac.field.one)
        if n > 0:
            return self._wrap(self._frac ** n)
        if self.is_zero:
            raise ZeroDenominatorError("Potência negativa de zero.")
        return RatSymbol.constant(1, self.variables) / (self ** (-n))

    def diff(self, name: str) -> "RatSymbol":
        """Derivada parcial exata pela regra do quociente."""
        if name not in self.variables:
            return RatSymbol.constant(0, self.variables)
        i = self.variables.index(name)
        numer, denom = self._frac.numer, self._frac.denom
        d_numer = numer.diff(i)
        d_denom = denom.diff(i)
        field = self._frac.field
        if not d_denom:
            return self._wrap(field.new(d_numer, denom))
        return self._wrap(field.new(d_numer * denom - numer * d_denom, denom * denom))

    def substitute(self, mapping: Mapping[str, object]) -> "RatSymbol":
        """Substitui variáveis por símbolos racionais ou números."""
        images = {name: as_rat(value) for name, value in mapping.items() if name in self.variables}
        images = {name: value for name, value in images.items()
                  if not (self.num.degree(name) == 0 and self.den.degree(name) == 0)}
        if not images:
            return self
        names = list(self.variables)
        for value in images.values():
            names.extend(value.variables)
        target = canonical_variables(names)
        field = _field(target)
        ring = field.ring
        lifted = {self.variables.index(name): value.lift(target) for name, value in images.items()}
        pairs = {i: (v._frac.numer, v._frac.denom) for i, v in lifted.items()}
        n1, d1 = _substitute_poly(self._frac.numer, self.variables, ring, target, pairs)
        n2, d2 = _substitute_poly(self._frac.denom, self.variables, ring, target, pairs)
        if not n2:
            raise ZeroDenominatorError(f"Substituição anula o denominador de '{self}'.")
        return RatSymbol(target, field.new(n1 * d2, d1 * n2))

    def evaluate(self, point: Mapping[str, Number]) -> "RatSymbol":
        return self.substitute({k: RatSymbol.constant(v) for k, v in point.items()})

    def conjugate(self) -> "RatSymbol":
        ring = self._frac.field.ring

        def conj(poly):
            return ring.from_dict({m: QQ_I.new(c.x, -c.y) for m, c in poly.items()})

        return self._wrap(self._frac.field.new(conj(self._frac.numer), conj(self._frac.denom)))

    @property
    def is_real(self) -> bool:
        return self == self.conjugate()

    def coefficients_in(self, name: str) -> Dict[int, "RatSymbol"]:
        """Coeficientes de ``name^k`` (o denominador não pode depender de ``name``)."""
        if not self.den.degree(name) == 0:
            raise ErroCalculo(f"'{self}' não é polinomial em {name}.")
        if name not in self.variables:
            return {0: self}
        i = self.variables.index(name)
        ring = self._frac.field.ring
        buckets: Dict[int, dict] = {}
        for monom, coeff in self._frac.numer.items():
            reduced = monom[:i] + (0,) + monom[i + 1:]
            buckets.setdefault(monom[i], {})[reduced] = coeff
        field = self._frac.field
        return {k: self._wrap(field.new(ring.from_dict(terms), self._frac.denom))
                for k, terms in sorted(buckets.items())}

    # Igualdade e exibição ----------------------------------------------------

    def __eq__(self, other):
        try:
            a, b = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return a._frac.numer == b._frac.numer and a._frac.denom == b._frac.denom

    def __hash__(self):
        return hash((tuple(sorted(self.num._reduced_key())), tuple(sorted(self.den._reduced_key()))))

    def __repr__(self):
        return f"RatSymbol({self})"

    def __str__(self):
        from core.expressao import format_plain
        return format_plain(self)

    def to_dict(self) -> dict:
        return {
            "vars": list(self.variables),
            "num": _terms_to_list(self._frac.numer),
            "den": _terms_to_list(self._frac.denom),
        }

    def to_json(self) -> str:
        """Serializa a fração para uma string JSON."""
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "RatSymbol":
        variables = _check_variables(data.get("vars", DISTINGUISHED))
        if "terms" in data:
            return PolySymbol.from_dict(data).to_rat()
        num = PolySymbol.from_terms(_terms_from_list(data.get("num", []), variables), variables)
        den_items = data.get("den", [{"coeff": {"re": "1/1", "im": "0/1"}, "exps": [0] * len(variables)}])
        den = PolySymbol.from_terms(_terms_from_list(den_items, variables), variables)
        return ratfunc_normalize(num, den)

    @classmethod
    def from_json(cls, json_str: str) -> "RatSymbol":
        """Cria uma fração a partir de uma string JSON."""
        return cls.from_dict(json.loads(json_str))


def _foreign(value) -> bool:
    """Operandos que RatSymbol deixa para o método refletido do outro tipo."""
    return not isinstance(value, (RatSymbol, PolySymbol, int, Fraction, GaussianRational))


def as_rat(value, variables: Iterable[str] = ()) -> RatSymbol:
    if isinstance(value, RatSymbol):
        return value
    if isinstance(value, PolySymbol):
        return value.to_rat()
    if isinstance(value, (int, Fraction, GaussianRational)):
        return RatSymbol.constant(value, variables)
    raise IncompatibleSymbolsError(f"Não é um símbolo racional: {value!r}")


def symbol(name: str) -> RatSymbol:
    return RatSymbol.variable(name)


def constant(value: Number, variables: Iterable[str] = ()) -> RatSymbol:
    return RatSymbol.constant(value, variables)


# ----------------------------------------------------------------------------
# Séries em gamma
# ----------------------------------------------------------------------------

class GammaSeries:
    """Série de potências em gamma truncada na ordem ``order``.

    ``coeffs[k]`` é o coeficiente de gamma^k e não depende de gamma.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Sequence[object]):
        if order < 0:
            raise ValueError("A ordem da série deve ser não negativa.")
        items = [as_rat(c) for c in list(coeffs)[:order + 1]]
        for c in items:
            if not c.free_of(GAMMA):
                raise ErroCalculo(f"Coeficiente de série depende de gamma: {c}")
        while len(items) < order + 1:
            items.append(RatSymbol.constant(0))
        self.order = order
        self.coeffs: Tuple[RatSymbol, ...] = tuple(items)

    @classmethod
    def from_symbol(cls, f, order: int) -> "GammaSeries":
        return series_expand(as_rat(f), order)

    @classmethod
    def zero(cls, order: int) -> "GammaSeries":
        return cls(order, [])

    def to_symbol(self) -> RatSymbol:
        gamma = RatSymbol.variable(GAMMA)
        total = RatSymbol.constant(0)
        for k, c in enumerate(self.coeffs):
            if not c.is_zero:
                total = total + c * gamma ** k
        return total

    def truncate(self, order: int) -> "GammaSeries":
        return GammaSeries(min(order, self.order), self.coeffs)

    def map(self, fn: Callable[[RatSymbol], RatSymbol]) -> "GammaSeries":
        return GammaSeries(self.order, [fn(c) for c in self.coeffs])

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coeffs)

    def free_of(self, name: str) -> bool:
        return all(c.free_of(name) for c in self.coeffs)

    def _coerce(self, other) -> "GammaSeries":
        if isinstance(other, GammaSeries):
            return other
        return series_expand(as_rat(other), self.order)

    def __add__(self, other):
        other = self._coerce(other)
        order = min(self.order, other.order)
        return GammaSeries(order, [a + b for a, b in zip(self.coeffs[:order + 1], other.coeffs)])

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        order = min(self.order, other.order)
        return GammaSeries(order, [a - b for a, b in zip(self.coeffs[:order + 1], other.coeffs)])

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return self.map(lambda c: -c)

    def __mul__(self, other):
        if isinstance(other, RatSymbol) and other.free_of(GAMMA):
            return self.map(lambda c: c * other)
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self.map(lambda c: c * other)
        other = self._coerce(other)
        order = min(self.order, other.order)
        out = []
        for n in range(order + 1):
            acc = RatSymbol.constant(0)
            for k in range(n + 1):
                a, b = self.coeffs[k], other.coeffs[n - k]
                if not a.is_zero and not b.is_zero:
                    acc = acc + a * b
            out.append(acc)
        return GammaSeries(order, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("Potência de série exige expoente inteiro não negativo.")
        result = GammaSeries(self.order, [RatSymbol.constant(1)])
        for _ in range(n):
            result = result * self
        return result

    def diff(self, name: str) -> "GammaSeries":
        if name == GAMMA:
            raise ErroCalculo("Derivada em gamma não é definida sobre a série truncada.")
        return self.map(lambda c: c.diff(name))

    def __eq__(self, other):
        if not isinstance(other, GammaSeries):
            return NotImplemented
        return self.order == other.order and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def __repr__(self):
        return f"GammaSeries(order={self.order}, {[str(c) for c in self.coeffs]})"

    def to_dict(self) -> dict:
        return {"order": self.order, "coeffs": [c.to_dict() for c in self.coeffs]}

    @classmethod
    def from_dict(cls, data: dict) -> "GammaSeries":
        return cls(int(data["order"]), [RatSymbol.from_dict(c) for c in data.get("coeffs", [])])


# ----------------------------------------------------------------------------
# Operações nomeadas
# ----------------------------------------------------------------------------

_POLY_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
}


def poly_arith(lhs: PolySymbol, rhs: PolySymbol, op: str) -> PolySymbol:
    """Soma, subtração ou produto exato; os conjuntos de variáveis são unidos."""
    try:
        return _POLY_OPS[op](lhs, rhs)
    except KeyError:
        raise ValueError(f"Operação desconhecida: '{op}'") from None


def partial(f, var: str) -> RatSymbol:
    return as_rat(f).diff(var)


def ratfunc_normalize(num: PolySymbol, den: PolySymbol) -> RatSymbol:
    """Fração reduzida pelo mdc com denominador na forma canônica."""
    if den.is_zero:
        raise ZeroDenominatorError(f"Denominador nulo para o numerador '{num}'.")
    num, den = num._coerce(den)
    field = _field(num.variables)
    return RatSymbol(num.variables, field.new(num._poly, den._poly))


def series_expand(f, order: int) -> GammaSeries:
    """Expansão de Taylor em gamma até ``order``.

    Exige que o denominador em gamma = 0 seja não nulo (unidade gamma-ádica).
    """
    f = as_rat(f)
    if order < 0:
        raise ValueError("A ordem da série deve ser não negativa.")
    num = f.num.to_rat().coefficients_in(GAMMA)
    den = f.den.to_rat().coefficients_in(GAMMA)
    d0 = den.get(0)
    if d0 is None or d0.is_zero:
        raise NotGammaAdicUnitError(f"Denominador de '{f}' se anula em gamma = 0.")
    coeffs: List[RatSymbol] = []
    for k in range(order + 1):
        acc = num.get(k, RatSymbol.constant(0))
        for j in range(1, k + 1):
            dj = den.get(j)
            if dj is not None and not coeffs[k - j].is_zero:
                acc = acc - dj * coeffs[k - j]
        coeffs.append(acc / d0)
    _logger.debug("série em gamma de ordem %d calculada", order)
    return GammaSeries(order, coeffs)
