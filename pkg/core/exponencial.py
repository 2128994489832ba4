"""Símbolos exponenciais ``prefator · exp(Φ)``.

O prefator é ``R · √S · e^{iπk/4} · (2πħ)^s`` com R e S frações exatas. Potências
pares de ``e^{iπ/4}`` são absorvidas em R (são potências de i), de modo que a fase
guardada é sempre 0 ou 1 e prefatores iguais têm a mesma representação.
"""

from __future__ import annotations

import json
import logging
from fractions import Fraction
from math import gcd
from typing import Mapping, Optional, Tuple

import sympy

from core.algebra import IMAGINARY_UNIT, RatSymbol, as_rat, re_im, rational_text
from core.erros import IncompatibleSymbolsError
from core.expressao import format_latex, format_plain

_logger = logging.getLogger(__name__)


def _unit_power(k: int) -> RatSymbol:
    """i^k."""
    return RatSymbol.constant(IMAGINARY_UNIT) ** (k % 4)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _real_content(terms) -> Optional[Fraction]:
    """Conteúdo racional positivo de coeficientes reais (None se algum for complexo)."""
    num, den = 0, 1
    for coeff in terms.values():
        re_part, im_part = re_im(coeff)
        if im_part != 0:
            return None
        num = gcd(num, abs(re_part.numerator))
        den = _lcm(den, re_part.denominator)
    if num == 0:
        return None
    return Fraction(num, den)


def _leading_sign(terms) -> int:
    lead = next(iter(terms.values()))
    re_part, im_part = re_im(lead)
    return -1 if (re_part < 0 or (re_part == 0 and im_part < 0)) else 1


def _square_split(value: Fraction) -> Tuple[Fraction, int]:
    """value > 0 escrito como fora² · dentro, com ``dentro`` inteiro livre de quadrados."""
    m = value.numerator * value.denominator
    outside, inside = 1, 1
    for prime, e in sympy.factorint(m).items():
        outside *= prime ** (e // 2)
        inside *= prime ** (e % 2)
    return Fraction(outside, value.denominator), inside


class Prefactor:
    """Prefator exato de um símbolo exponencial."""

    __slots__ = ("rational_part", "radicand", "phase_eighths", "two_pi_hbar_power")

    def __init__(self, rational_part: RatSymbol, radicand: RatSymbol, phase_eighths: int,
                 two_pi_hbar_power: Fraction):
        self.rational_part = rational_part
        self.radicand = radicand
        self.phase_eighths = phase_eighths
        self.two_pi_hbar_power = two_pi_hbar_power

    @classmethod
    def build(cls, rational_part=1, radicand=1, phase_eighths: int = 0,
              two_pi_hbar_power=Fraction(0)) -> "Prefactor":
        """Normaliza: extrai quadrados numéricos de S e potências de i da fase."""
        rational = as_rat(rational_part)
        radicand = as_rat(radicand)
        phase = phase_eighths % 8
        power = Fraction(two_pi_hbar_power)
        if (power * 2).denominator != 1:
            raise ValueError("A potência de 2πħ deve ser semi-inteira.")
        if radicand.is_zero:
            return cls(RatSymbol.constant(0), RatSymbol.constant(1), 0, Fraction(0))
        num_content = _real_content(radicand.num.terms)
        den_content = _real_content(radicand.den.terms)
        if num_content is not None and den_content is not None:
            sign = _leading_sign(radicand.num.terms) * _leading_sign(radicand.den.terms)
            content = num_content / den_content
            primitive = radicand / RatSymbol.constant(content * sign)
            if sign < 0:
                phase += 2
            outside, inside = _square_split(content)
            rational = rational * RatSymbol.constant(outside)
            radicand = primitive * inside
        rational = rational * _unit_power(phase // 2)
        phase %= 2
        if rational.is_zero:
            return cls(rational, RatSymbol.constant(1), 0, Fraction(0))
        return cls(rational, radicand, phase, power)

    @classmethod
    def one(cls) -> "Prefactor":
        return cls.build()

    @property
    def radical_parts(self) -> Tuple[Tuple[RatSymbol, Fraction], ...]:
        if self.radicand == 1:
            return ()
        return ((self.radicand, Fraction(1, 2)),)

    @property
    def is_zero(self) -> bool:
        return self.rational_part.is_zero

    def same_shape(self, other: "Prefactor") -> bool:
        return (self.radicand == other.radicand and self.phase_eighths == other.phase_eighths
                and self.two_pi_hbar_power == other.two_pi_hbar_power)

    def scale(self, factor) -> "Prefactor":
        return Prefactor(self.rational_part * as_rat(factor), self.radicand,
                         self.phase_eighths, self.two_pi_hbar_power)

    def __mul__(self, other: "Prefactor") -> "Prefactor":
        return Prefactor.build(self.rational_part * other.rational_part,
                               self.radicand * other.radicand,
                               self.phase_eighths + other.phase_eighths,
                               self.two_pi_hbar_power + other.two_pi_hbar_power)

    def substitute(self, mapping: Mapping[str, object]) -> "Prefactor":
        return Prefactor.build(self.rational_part.substitute(mapping), self.radicand.substitute(mapping),
                               self.phase_eighths, self.two_pi_hbar_power)

    def conjugate(self) -> "Prefactor":
        return Prefactor.build(self.rational_part.conjugate(), self.radicand.conjugate(),
                               -self.phase_eighths, self.two_pi_hbar_power)

    def __eq__(self, other):
        if not isinstance(other, Prefactor):
            return NotImplemented
        return self.same_shape(other) and self.rational_part == other.rational_part

    def __hash__(self):
        return hash((self.rational_part, self.radicand, self.phase_eighths, self.two_pi_hbar_power))

    def display_parts(self) -> Tuple[RatSymbol, int]:
        """(parte racional, fase em oitavos) com i e sinais constantes levados à fase."""
        rational, phase = self.rational_part, self.phase_eighths
        terms = rational.num.terms
        if terms and all(re_im(c)[0] == 0 for c in terms.values()):
            rational, phase = rational * _unit_power(3), phase + 2
        if rational.is_constant and re_im(rational.as_number())[0] < 0:
            rational, phase = -rational, phase + 4
        return rational, phase % 8

    def format(self, fmt: str = "plain") -> str:
        rational, phase = self.display_parts()
        latex = fmt == "latex"
        pieces = []
        if rational != 1:
            text = format_latex(rational) if latex else format_plain(rational)
            if " " in text or "/" in text:
                text = f"\\left({text}\\right)" if latex else f"({text})"
            pieces.append(text)
        if self.radicand != 1:
            text = format_latex(self.radicand) if latex else format_plain(self.radicand)
            pieces.append(f"\\sqrt{{{text}}}" if latex else f"sqrt({text})")
        if phase:
            angle = Fraction(phase if phase <= 4 else phase - 8, 4)
            sign = "-" if angle < 0 else ""
            angle = abs(angle)
            if latex:
                body = " ".join(x for x in (_latex_fraction(angle), "i\\pi") if x)
                pieces.append(f"e^{{{sign}{body}}}")
            else:
                text = "i*pi" if angle.numerator == 1 else f"{angle.numerator}*i*pi"
                if angle.denominator != 1:
                    text += f"/{angle.denominator}"
                pieces.append(f"exp({sign}{text})")
        if self.two_pi_hbar_power:
            if latex:
                pieces.append(f"(2\\pi\\hbar)^{{{self.two_pi_hbar_power}}}")
            else:
                pieces.append(f"(2*pi*hbar)^({self.two_pi_hbar_power})")
        if not pieces:
            return "1"
        return (" " if latex else "*").join(pieces)

    def to_dict(self) -> dict:
        return {
            "rational_part": self.rational_part.to_dict(),
            "radical_parts": [{"base": base.to_dict(), "exponent": rational_text(e)}
                              for base, e in self.radical_parts],
            "phase_eighths": self.phase_eighths,
            "two_pi_hbar_power": rational_text(self.two_pi_hbar_power),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Prefactor":
        radicand = RatSymbol.constant(1)
        for part in data.get("radical_parts", []):
            exponent = Fraction(part["exponent"])
            base = RatSymbol.from_dict(part["base"])
            if exponent.denominator != 2:
                raise ValueError("Expoente de radical deve ser semi-inteiro ímpar.")
            radicand = radicand * base ** int(exponent * 2)
        return cls.build(RatSymbol.from_dict(data["rational_part"]), radicand,
                         int(data.get("phase_eighths", 0)), Fraction(data.get("two_pi_hbar_power", "0/1")))


def _latex_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return "" if value.numerator == 1 else str(value.numerator)
    return f"\\frac{{{value.numerator}}}{{{value.denominator}}}"


class ExpSymbol:
    """``prefator · exp(Φ)`` com Φ uma fração exata."""

    __slots__ = ("prefactor", "exponent")

    def __init__(self, prefactor: Prefactor, exponent: RatSymbol):
        self.prefactor = prefactor
        self.exponent = as_rat(exponent)

    @classmethod
    def from_exponent(cls, exponent, prefactor: Optional[Prefactor] = None) -> "ExpSymbol":
        return cls(prefactor or Prefactor.one(), as_rat(exponent))

    @classmethod
    def one(cls) -> "ExpSymbol":
        return cls(Prefactor.one(), RatSymbol.constant(0))

    @property
    def is_zero(self) -> bool:
        return self.prefactor.is_zero

    def same_shape(self, other: "ExpSymbol") -> bool:
        return self.prefactor.same_shape(other.prefactor) and self.exponent == other.exponent

    def with_rational(self, rational: RatSymbol) -> "ExpSymbol":
        return ExpSymbol(Prefactor(rational, self.prefactor.radicand, self.prefactor.phase_eighths,
                                   self.prefactor.two_pi_hbar_power), self.exponent)

    def _combine(self, other, sign: int) -> "ExpSymbol":
        if isinstance(other, ExpSymbol):
            if other.is_zero:
                return self
            if self.is_zero:
                return other if sign > 0 else -other
            if not self.same_shape(other):
                raise IncompatibleSymbolsError("Soma de símbolos exponenciais de formas distintas.")
            rational = self.prefactor.rational_part + other.prefactor.rational_part * sign
            return self.with_rational(rational)
        other = as_rat(other)
        if other.is_zero:
            return self
        raise IncompatibleSymbolsError("Soma de símbolo exponencial com fração não nula.")

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.with_rational(-self.prefactor.rational_part)

    def __mul__(self, other):
        if isinstance(other, ExpSymbol):
            return ExpSymbol(self.prefactor * other.prefactor, self.exponent + other.exponent)
        return ExpSymbol(self.prefactor.scale(other), self.exponent)

    __rmul__ = __mul__

    def diff(self, name: str) -> "ExpSymbol":
        """(∂R + R·∂S/(2S) + R·∂Φ)·√S·e^Φ."""
        rational = self.prefactor.rational_part
        radicand = self.prefactor.radicand
        total = rational.diff(name) + rational * self.exponent.diff(name)
        d_radicand = radicand.diff(name)
        if not d_radicand.is_zero:
            total = total + rational * d_radicand / (radicand * 2)
        return self.with_rational(total)

    def derivative(self, dp: int, dq: int) -> "ExpSymbol":
        """∂_p^dp ∂_q^dq do símbolo."""
        result = self
        for _ in range(dp):
            result = result.diff("p")
        for _ in range(dq):
            result = result.diff("q")
        return result

    def substitute(self, mapping: Mapping[str, object]) -> "ExpSymbol":
        return ExpSymbol(self.prefactor.substitute(mapping), self.exponent.substitute(mapping))

    def conjugate(self) -> "ExpSymbol":
        return ExpSymbol(self.prefactor.conjugate(), self.exponent.conjugate())

    def free_of(self, name: str) -> bool:
        return all(s.free_of(name) for s in (self.prefactor.rational_part, self.prefactor.radicand, self.exponent))

    def __eq__(self, other):
        if isinstance(other, ExpSymbol):
            if self.is_zero or other.is_zero:
                return self.is_zero and other.is_zero
            return self.prefactor == other.prefactor and self.exponent == other.exponent
        try:
            other = as_rat(other)
        except IncompatibleSymbolsError:
            return NotImplemented
        if other.is_zero:
            return self.is_zero
        return self == ExpSymbol(Prefactor.build(other), RatSymbol.constant(0))

    def __hash__(self):
        return hash((self.prefactor, self.exponent))

    def __repr__(self):
        return f"ExpSymbol({self})"

    def __str__(self):
        return self.format("plain")

    def format(self, fmt: str = "plain") -> str:
        if fmt == "json":
            return self.to_json()
        if self.is_zero:
            return "0"
        prefix = self.prefactor.format(fmt)
        if self.exponent.is_zero:
            return prefix
        if fmt == "latex":
            body = f"\\exp\\left({format_latex(self.exponent)}\\right)"
            return body if prefix == "1" else f"{prefix} {body}"
        body = f"exp({format_plain(self.exponent)})"
        return body if prefix == "1" else f"{prefix}*{body}"

    def to_dict(self) -> dict:
        return {"prefactor": self.prefactor.to_dict(), "exponent": self.exponent.to_dict()}

    def to_json(self) -> str:
        """Serializa o símbolo para uma string JSON."""
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "ExpSymbol":
        return cls(Prefactor.from_dict(data["prefactor"]), RatSymbol.from_dict(data["exponent"]))

    @classmethod
    def from_json(cls, json_str: str) -> "ExpSymbol":
        """Cria um símbolo a partir de uma string JSON."""
        return cls.from_dict(json.loads(json_str))
