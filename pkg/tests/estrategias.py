"""Estratégias do hypothesis para símbolos aleatórios."""

from fractions import Fraction

from hypothesis import strategies as st

from core.algebra import RatSymbol, gaussian

racionais = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@st.composite
def coeficientes(draw, complexos=True):
    re_part = draw(racionais)
    im_part = draw(racionais) if complexos and draw(st.booleans()) else Fraction(0)
    return gaussian(re_part, im_part)


@st.composite
def polinomios(draw, variaveis=("p", "q"), grau=3, termos=4, complexos=True):
    """Polinômio com até ``termos`` monômios de grau parcial até ``grau``."""
    total = RatSymbol.constant(0)
    for _ in range(draw(st.integers(min_value=0, max_value=termos))):
        monomio = RatSymbol.constant(draw(coeficientes(complexos)))
        for nome in variaveis:
            monomio = monomio * RatSymbol.variable(nome) ** draw(st.integers(min_value=0, max_value=grau))
        total = total + monomio
    return total


@st.composite
def fracoes(draw, variaveis=("p", "q", "hbar"), grau=2):
    """Fração com denominador não nulo."""
    num = draw(polinomios(variaveis, grau))
    den = draw(polinomios(variaveis, grau).filter(lambda d: not d.is_zero))
    return num / den
