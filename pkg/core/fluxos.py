"""Fluxos de Moyal-Lie como séries truncadas em gamma.

O fluxo de ``f`` sob o campo ``V`` é ``exp(s·iγV/ħ) f`` com s = ±1, somado até a
ordem pedida. Cada termo é obtido do anterior: t_n = (s·i/ħ)·V(t_{n−1})/n.
"""

from __future__ import annotations

import json
import logging

from core.algebra import (
    HBAR,
    IMAGINARY_UNIT,
    GammaSeries,
    RatSymbol,
    as_rat,
    series_expand,
)
from core.erros import ResidualHbarPoleError
from core.operadores import DiffOperator, apply

_logger = logging.getLogger(__name__)


class FlowResult:
    """Série do fluxo, o gerador usado e se os coeficientes independem de ħ."""

    def __init__(self, series: GammaSeries, generator: DiffOperator):
        self.series = series
        self.generator = generator

    @property
    def hbar_free(self) -> bool:
        return self.series.free_of(HBAR)

    def to_dict(self) -> dict:
        return {
            "series": self.series.to_dict(),
            "generator": self.generator.to_dict(),
            "hbar_free": self.hbar_free,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


def flow(V: DiffOperator, f, order: int, sign: int = 1) -> FlowResult:
    """Σ_{n≤N} (s·iγ/ħ)^n/n! · V^n f."""
    if order < 0:
        raise ValueError("A ordem do fluxo deve ser não negativa.")
    if sign not in (1, -1):
        raise ValueError("O sinal do fluxo deve ser +1 ou -1.")
    f = as_rat(f)
    factor = RatSymbol.constant(IMAGINARY_UNIT * sign) / RatSymbol.variable(HBAR)
    coeffs = [f]
    term = f
    for n in range(1, order + 1):
        term = apply(V, term) * factor / n
        if not term.is_polynomial_in((HBAR,)):
            raise ResidualHbarPoleError(
                f"O termo de ordem {n} do fluxo mantém um polo em ħ: {term}")
        coeffs.append(term)
    _logger.debug("fluxo calculado até a ordem %d", order)
    return FlowResult(GammaSeries(order, coeffs), V)


def compare_closed_form(result: FlowResult, closed) -> bool:
    """Compara o fluxo com a expansão em gamma de uma forma fechada."""
    return series_expand(as_rat(closed), result.series.order) == result.series


def flow_invariant(P_series: GammaSeries, Q_series: GammaSeries, monomial_relation) -> GammaSeries:
    """P^m Q^n − p^m q^n; a série nula certifica a combinação conservada."""
    m, n = monomial_relation
    order = min(P_series.order, Q_series.order)
    original = RatSymbol.variable("p") ** m * RatSymbol.variable("q") ** n
    return P_series.truncate(order) ** m * Q_series.truncate(order) ** n - original


def compose_series(f, P_series: GammaSeries, Q_series: GammaSeries) -> GammaSeries:
    """f(P(γ), Q(γ)) para f polinomial em p e q, truncada na menor ordem."""
    f = as_rat(f)
    order = min(P_series.order, Q_series.order)
    P_series, Q_series = P_series.truncate(order), Q_series.truncate(order)
    numerator = _evaluate_polynomial(f.num.to_rat(), P_series, Q_series, order)
    denominator = _evaluate_polynomial(f.den.to_rat(), P_series, Q_series, order)
    return numerator * _series_inverse(denominator)


def _evaluate_polynomial(f: RatSymbol, P: GammaSeries, Q: GammaSeries, order: int) -> GammaSeries:
    total = GammaSeries.zero(order)
    P_powers = [GammaSeries(order, [RatSymbol.constant(1)])]
    Q_powers = [GammaSeries(order, [RatSymbol.constant(1)])]
    for m, by_p in f.coefficients_in("p").items():
        while len(P_powers) <= m:
            P_powers.append(P_powers[-1] * P)
        for n, a in by_p.coefficients_in("q").items():
            while len(Q_powers) <= n:
                Q_powers.append(Q_powers[-1] * Q)
            total = total + P_powers[m] * Q_powers[n] * series_expand(a, order)
    return total


def _series_inverse(s: GammaSeries) -> GammaSeries:
    """1/s por divisão de séries; exige coeficiente de ordem zero não nulo."""
    d0 = s.coeffs[0]
    out = []
    for k in range(s.order + 1):
        acc = RatSymbol.constant(1 if k == 0 else 0)
        for j in range(1, k + 1):
            acc = acc - s.coeffs[j] * out[k - j]
        out.append(acc / d0)
    return GammaSeries(s.order, out)


def covariance_defect(V: DiffOperator, f, order: int, sign: int = 1) -> GammaSeries:
    """fluxo(f) − f(P(γ), Q(γ)), com P e Q os fluxos de p e q.

    Anula-se para p, q e para combinações conservadas; em geral mede quanto o
    fluxo de Moyal se afasta da simples substituição clássica.
    """
    P = flow(V, RatSymbol.variable("p"), order, sign).series
    Q = flow(V, RatSymbol.variable("q"), order, sign).series
    return flow(V, f, order, sign).series - compose_series(f, P, Q)
