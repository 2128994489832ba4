from fractions import Fraction

import pytest

from core.algebra import IMAGINARY_UNIT, RatSymbol, symbol
from core.erros import IncompatibleSymbolsError
from core.exponencial import ExpSymbol, Prefactor

p, q, hbar = symbol("p"), symbol("q"), symbol("hbar")
i = RatSymbol.constant(IMAGINARY_UNIT)


def test_prefator_extrai_quadrados():
    pref = Prefactor.build(1, Fraction(8, 9))
    assert pref.rational_part == Fraction(2, 3)
    assert pref.radicand == 2


def test_radicando_negativo_vira_fase():
    pref = Prefactor.build(1, -2)
    assert pref.radicand == 2
    assert pref.phase_eighths == 0
    assert pref.rational_part == i


def test_fase_par_vai_para_a_parte_racional():
    pref = Prefactor.build(1, 1, phase_eighths=7)
    assert pref.phase_eighths == 1
    assert pref.rational_part == -i
    assert pref.format() == "exp(-i*pi/4)"


def test_produto_de_prefatores():
    a = Prefactor.build(2, RatSymbol.constant(1) / symbol("t"), 0, Fraction(-1, 2))
    b = Prefactor.build(1, symbol("t"), 1, Fraction(-1, 2))
    c = a * b
    assert c.radicand == 1
    assert c.rational_part == 2
    assert c.two_pi_hbar_power == -1
    assert c.phase_eighths == 1


def test_formato_do_prefator():
    pref = Prefactor.build(1, RatSymbol.constant(1) / symbol("c"), -1, Fraction(-1, 2))
    assert pref.format() == "sqrt(1/(c))*exp(-i*pi/4)*(2*pi*hbar)^(-1/2)"
    assert pref.format("latex") == r"\sqrt{\frac{1}{c}} e^{-\frac{1}{4} i\pi} (2\pi\hbar)^{-1/2}"


def test_prefator_json():
    pref = Prefactor.build(3, 1 + p * p, 1, Fraction(1, 2))
    assert Prefactor.from_dict(pref.to_dict()) == pref


def test_derivada_do_exponencial():
    u = ExpSymbol.from_exponent(i * p ** 3 / hbar)
    du = u.diff("p")
    assert du.exponent == u.exponent
    assert du.prefactor.rational_part == 3 * i * p ** 2 / hbar
    assert u.derivative(0, 1).is_zero


def test_derivada_com_radicando():
    u = ExpSymbol(Prefactor.build(1, p), RatSymbol.constant(0))
    du = u.diff("p")
    assert du.prefactor.rational_part == 1 / (2 * p)
    assert du.prefactor.radicand == p


def test_produto_soma_expoentes():
    u = ExpSymbol.from_exponent(i * p / hbar)
    v = ExpSymbol.from_exponent(i * q / hbar)
    assert (u * v).exponent == i * (p + q) / hbar
    assert (u * 3).prefactor.rational_part == 3


def test_soma_exige_mesma_forma():
    u = ExpSymbol.from_exponent(i * p / hbar)
    assert (u + u).prefactor.rational_part == 2
    assert (u - u).is_zero
    with pytest.raises(IncompatibleSymbolsError):
        u + ExpSymbol.from_exponent(i * q / hbar)
    with pytest.raises(IncompatibleSymbolsError):
        u + p


def test_substituicao_e_conjugado():
    u = ExpSymbol.from_exponent(i * p * q / hbar)
    assert u.substitute({"q": 2}).exponent == 2 * i * p / hbar
    assert u.conjugate().exponent == -i * p * q / hbar


def test_igualdade_com_numeros():
    assert ExpSymbol.one() == 1
    assert ExpSymbol.one() * 0 == 0


def test_formato_do_exponencial():
    u = ExpSymbol.from_exponent(-i * symbol("a") * p ** 3 / (3 * hbar))
    assert u.format() == "exp(-i*a*p^3/(3*hbar))"
    assert ExpSymbol.from_json(u.to_json()) == u
