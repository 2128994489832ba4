import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given

from core.algebra import IMAGINARY_UNIT, PolySymbol, RatSymbol, symbol
from core.erros import ErroCalculo
from core.estrela import moyal_bracket, poisson_bracket, star_product
from core.operadores import (
    DiffOperator,
    GeneratorExpansion,
    WeylMonomial,
    apply,
    bopp,
    compose,
    image_of_monomial,
    moyal_lie_vector,
    operator_commutator,
    weyl_ordered_monomial,
    weyl_symbol_of_word,
    weyl_symmetrize,
)
from tests.estrategias import polinomios

p, q, hbar = symbol("p"), symbol("q"), symbol("hbar")
i = RatSymbol.constant(IMAGINARY_UNIT)

S21 = DiffOperator({
    (0, 1): 2 * i * hbar * p * q,
    (1, 0): -i * hbar * p ** 2,
    (1, 2): i * hbar ** 3 / 4,
})


def _polinomio_aleatorio(rng: random.Random, grau: int = 6) -> RatSymbol:
    total = RatSymbol.constant(0)
    for _ in range(rng.randint(1, 6)):
        m = rng.randint(0, grau)
        n = rng.randint(0, grau - m)
        coeff = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        total = total + coeff * p ** m * q ** n
    return total


# Forma normal -------------------------------------------------------------------

def test_leibniz_na_composicao():
    d_p = DiffOperator.partial("p")
    mult = DiffOperator.multiplication(p)
    assert compose(d_p, mult) == DiffOperator.identity() + compose(mult, d_p)
    assert operator_commutator(d_p, mult) == DiffOperator.identity()


def test_potencia_e_aplicacao():
    d_q = DiffOperator.partial("q")
    assert (d_q ** 2)(q ** 3) == 6 * q
    assert (d_q ** 0) == DiffOperator.identity()
    assert DiffOperator.zero().is_zero
    assert (d_q ** 3).order == 3


def test_operador_json():
    assert DiffOperator.from_json(S21.to_json()) == S21


# Deslocamentos de Bopp ------------------------------------------------------------

@pytest.mark.parametrize("var", ["p", "q"])
@given(f=polinomios(grau=2, termos=3))
def test_bopp_realiza_multiplicacao_estrela(var, f):
    v = symbol(var)
    assert apply(bopp("left", var), f) == star_product(f, v)
    assert apply(bopp("right", var), f) == star_product(v, f)


def test_comutador_dos_deslocamentos_e_escalar():
    left = operator_commutator(bopp("left", "p"), bopp("left", "q"))
    right = operator_commutator(bopp("right", "p"), bopp("right", "q"))
    assert left == DiffOperator.multiplication(i * hbar)
    assert right == DiffOperator.multiplication(-i * hbar)


def test_bopp_invalido():
    with pytest.raises(ValueError):
        bopp("middle", "p")


# Imagens S_{m,n} ------------------------------------------------------------------

def test_forma_normal_de_s21():
    assert image_of_monomial((2, 1)) == S21
    assert image_of_monomial(WeylMonomial(2, 1)) == S21


def test_imagens_de_grau_baixo():
    assert image_of_monomial((1, 0)) == DiffOperator.partial("q").scale(i * hbar)
    assert image_of_monomial((0, 1)) == DiffOperator.partial("p").scale(-i * hbar)
    assert image_of_monomial((0, 0)).is_zero


@pytest.mark.parametrize("m, n", [(1, 1), (2, 0), (0, 3), (2, 2), (3, 1)])
@given(f=polinomios(grau=3, termos=3))
def test_imagem_e_colchete_de_moyal(m, n, f):
    assert apply(image_of_monomial((m, n)), f) == moyal_bracket(f, WeylMonomial(m, n).symbol())


def test_campo_hamiltoniano_de_p2q():
    rng = random.Random(2021)
    g = p ** 2 * q
    for _ in range(20):
        f = _polinomio_aleatorio(rng)
        image = apply(S21, f)
        assert image == moyal_bracket(f, g)
        linear = image.coefficients_in("hbar").get(1, RatSymbol.constant(0))
        assert linear == i * poisson_bracket(f, g)
        if f.diff("p").diff("q").diff("q").is_zero:
            assert image == i * hbar * poisson_bracket(f, g)


def test_simetrizacao_sem_escalar_difere():
    pl, ql = bopp("left", "p"), bopp("left", "q")
    pr, qr = bopp("right", "p"), bopp("right", "q")
    naive = compose(compose(pl, pl), ql) - compose(compose(pr, pr), qr)
    assert naive - S21 == DiffOperator.multiplication(2 * i * hbar * p)
    assert weyl_ordered_monomial(pl, ql, 2, 1) - weyl_ordered_monomial(pr, qr, 2, 1) == S21


def test_monomio_negativo():
    with pytest.raises(ValueError):
        WeylMonomial(-1, 2)


# Campos de Moyal-Lie -------------------------------------------------------------

def test_expansao_de_gerador():
    a = symbol("a")
    A = GeneratorExpansion.from_symbol(p ** 2 * q + hbar * q + a * q ** 2)
    assert A.coeffs == {(0, 1): hbar, (0, 2): a, (2, 1): RatSymbol.constant(1)}
    assert A.to_symbol() == p ** 2 * q + hbar * q + a * q ** 2
    assert (A + A) == A.scale(2)
    with pytest.raises(ErroCalculo):
        GeneratorExpansion({(1, 0): p})
    with pytest.raises(ErroCalculo):
        GeneratorExpansion.from_symbol(1 / (1 + p))


def test_campo_age_como_colchete():
    a = symbol("a")
    A = GeneratorExpansion({(2, 1): Fraction(1, 2), (0, 2): a})
    f = p ** 3 * q + q ** 2
    assert apply(moyal_lie_vector(A), f) == moyal_bracket(f, A.to_symbol())


GERADORES = [p ** 2, q ** 2, p * q, p ** 2 * q, p * q ** 2]


@pytest.mark.parametrize("A, B", list(combinations(GERADORES, 2)))
def test_anti_homomorfismo(A, B):
    V_A = moyal_lie_vector(GeneratorExpansion.from_symbol(A))
    V_B = moyal_lie_vector(GeneratorExpansion.from_symbol(B))
    V_AB = moyal_lie_vector(GeneratorExpansion.from_symbol(moyal_bracket(A, B)))
    assert V_AB == -operator_commutator(V_A, V_B)


# Palavras de operadores ----------------------------------------------------------

def test_simbolo_de_palavra():
    assert weyl_symbol_of_word("pq") == (p * q - i * hbar / 2).to_poly()
    assert weyl_symbol_of_word("qp") == (p * q + i * hbar / 2).to_poly()
    assert weyl_symbol_of_word("") == PolySymbol.constant(1)


def test_simetrizacao_recupera_monomio():
    assert weyl_symmetrize("pq") == (p * q).to_poly()
    assert weyl_symmetrize("ppq") == (p ** 2 * q).to_poly()
    assert weyl_symmetrize(["q", "p", "q"]) == (p * q ** 2).to_poly()


def test_palavra_invalida():
    with pytest.raises(ValueError):
        weyl_symbol_of_word("pxq")


@given(f=polinomios(grau=3, termos=3))
def test_composicao_e_aplicacao_sucessiva(f):
    A, B = bopp("left", "p"), image_of_monomial((1, 2))
    assert apply(compose(A, B), f) == apply(A, apply(B, f))
    assert apply(compose(B, A), f) == apply(B, apply(A, f))


def test_campo_e_linear_no_gerador():
    a = symbol("a")
    A = GeneratorExpansion.from_symbol(p ** 2 * q + a * q ** 2)
    B = GeneratorExpansion.from_symbol(p * q + 3 * p ** 3)
    c = RatSymbol.constant(Fraction(2, 3))
    assert moyal_lie_vector(A + B.scale(c)) == moyal_lie_vector(A) + moyal_lie_vector(B).scale(c)
