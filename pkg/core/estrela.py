"""Produto estrela, colchetes de Poisson e de Moyal.

Convenção: D = ←∂_q →∂_p − ←∂_p →∂_q, de modo que {q, p} = 1 e um par canônico
satisfaz {P, Q} = −1 e {P, Q}_M = −iħ. O produto estrela é exp{(iħ/2) D}.

Os símbolos aceitos são ``RatSymbol``, ``GammaSeries`` (operações distribuídas
por ordem em gamma) e ``ExpSymbol`` (combinado com uma fração).
"""

from __future__ import annotations

import json
import logging
from math import comb, factorial
from typing import List, Optional, Tuple, Union

from core.algebra import (
    HBAR,
    IMAGINARY_UNIT,
    GammaSeries,
    RatSymbol,
    as_rat,
    series_expand,
)
from core.erros import HbarDependentInputError, IncompatibleSymbolsError, NonTerminatingSeriesError
from core.exponencial import ExpSymbol

_logger = logging.getLogger(__name__)

Symbol = Union[RatSymbol, GammaSeries, ExpSymbol]

PHASE_SPACE = ("p", "q")


def _half_i_hbar() -> RatSymbol:
    return RatSymbol.variable(HBAR) * IMAGINARY_UNIT / 2


def _derivative(f: Symbol, dp: int, dq: int) -> Symbol:
    if isinstance(f, ExpSymbol):
        return f.derivative(dp, dq)
    for _ in range(dp):
        f = f.diff("p")
    for _ in range(dq):
        f = f.diff("q")
    return f


def _as_series(f, order: int) -> GammaSeries:
    if isinstance(f, GammaSeries):
        return f.truncate(order)
    if isinstance(f, ExpSymbol):
        raise IncompatibleSymbolsError("Símbolo exponencial não combina com série em gamma.")
    return series_expand(as_rat(f), order)


def _per_gamma_order(operation, f, g, *args) -> GammaSeries:
    """Aplica uma operação bilinear coeficiente a coeficiente nas ordens de gamma."""
    orders = [s.order for s in (f, g) if isinstance(s, GammaSeries)]
    order = min(orders)
    a, b = _as_series(f, order), _as_series(g, order)
    out = []
    for n in range(order + 1):
        acc = RatSymbol.constant(0)
        for i in range(n + 1):
            lhs, rhs = a.coeffs[i], b.coeffs[n - i]
            if lhs.is_zero or rhs.is_zero:
                continue
            acc = acc + operation(lhs, rhs, *args)
        out.append(acc)
    return GammaSeries(order, out)


def _is_series_pair(f, g) -> bool:
    return isinstance(f, GammaSeries) or isinstance(g, GammaSeries)


def poisson_bracket(f: Symbol, g: Symbol) -> Symbol:
    """{f, g} = (∂_q f)(∂_p g) − (∂_p f)(∂_q g)."""
    if _is_series_pair(f, g):
        return _per_gamma_order(poisson_bracket, f, g)
    f = f if isinstance(f, ExpSymbol) else as_rat(f)
    g = g if isinstance(g, ExpSymbol) else as_rat(g)
    return f.diff("q") * g.diff("p") - f.diff("p") * g.diff("q")


def bidiff_power(f: Symbol, g: Symbol, n: int) -> Symbol:
    """f [D]^n g pela regra binomial."""
    if n < 0:
        raise ValueError("A potência do bidiferencial deve ser não negativa.")
    if _is_series_pair(f, g):
        return _per_gamma_order(bidiff_power, f, g, n)
    f = f if isinstance(f, ExpSymbol) else as_rat(f)
    g = g if isinstance(g, ExpSymbol) else as_rat(g)
    if isinstance(f, ExpSymbol) and isinstance(g, ExpSymbol):
        raise IncompatibleSymbolsError("Produto de dois símbolos exponenciais não suportado.")
    total = None
    for k in range(n + 1):
        left = _derivative(f, k, n - k)
        if left.is_zero:
            continue
        right = _derivative(g, n - k, k)
        if right.is_zero:
            continue
        term = left * right * ((-1) ** k * comb(n, k))
        total = term if total is None else total + term
    if total is None:
        return f * g * 0
    return total


def _polynomial_degree(f: Symbol) -> Optional[int]:
    """Grau total em (p, q) quando f é polinomial nessas variáveis."""
    if isinstance(f, ExpSymbol):
        return None
    if isinstance(f, GammaSeries):
        degrees = [_polynomial_degree(c) for c in f.coeffs]
        if any(d is None for d in degrees):
            return None
        return max(degrees, default=0)
    f = as_rat(f)
    if not f.is_polynomial_in(PHASE_SPACE):
        return None
    return f.total_degree(PHASE_SPACE)


def star_bound(f: Symbol, g: Symbol, truncation: Optional[int] = None) -> int:
    """Última potência de D que contribui para f ⋆ g."""
    degrees = [d for d in (_polynomial_degree(f), _polynomial_degree(g)) if d is not None]
    if not degrees:
        if truncation is None:
            raise NonTerminatingSeriesError(
                "A série do produto estrela não termina; informe uma truncagem em ħ.")
        return truncation
    bound = min(degrees)
    return bound if truncation is None else min(bound, truncation)


def star_product(f: Symbol, g: Symbol, truncation: Optional[int] = None) -> Symbol:
    """f ⋆ g = Σ_n (iħ/2)^n / n! · f [D]^n g."""
    if _is_series_pair(f, g):
        return _per_gamma_order(star_product, f, g, truncation)
    bound = star_bound(f, g, truncation)
    factor = _half_i_hbar()
    total = None
    for n in range(bound + 1):
        term = bidiff_power(f, g, n)
        if term.is_zero:
            continue
        term = term * (factor ** n / factorial(n))
        total = term if total is None else total + term
    if total is None:
        return bidiff_power(f, g, 0) * 0
    _logger.debug("produto estrela com %d potências de D", bound + 1)
    return total


def moyal_bracket(f: Symbol, g: Symbol, truncation: Optional[int] = None) -> Symbol:
    """{f, g}_M = f ⋆ g − g ⋆ f."""
    return star_product(f, g, truncation) - star_product(g, f, truncation)


def moyal_term(f: Symbol, g: Symbol, k: int) -> Symbol:
    """Termo k do colchete de Moyal: (iħ/2)^{2k+1} · 2/(2k+1)! · f [D]^{2k+1} g."""
    n = 2 * k + 1
    scale = _half_i_hbar() ** n * 2 / factorial(n)
    return bidiff_power(f, g, n) * scale


def jacobian_determinant(P: Symbol, Q: Symbol) -> Symbol:
    """det ∂(P, Q)/∂(p, q); vale 1 exatamente quando {P, Q} = −1."""
    return -poisson_bracket(P, Q)


def _is_minus_one(value: Symbol) -> bool:
    if isinstance(value, GammaSeries):
        return value == GammaSeries(value.order, [RatSymbol.constant(-1)])
    return value == -1


def _hbar_free(f: Symbol) -> bool:
    if isinstance(f, GammaSeries):
        return f.free_of(HBAR)
    return as_rat(f).free_of(HBAR)


def _symbol_to_dict(f: Symbol) -> dict:
    return f.to_dict()


def _symbol_from_dict(data: dict) -> Symbol:
    if "order" in data:
        return GammaSeries.from_dict(data)
    return RatSymbol.from_dict(data)


class BracketReport:
    """Resultado da verificação de um par canônico."""

    def __init__(self, poisson: Symbol, moyal_terms: List[Tuple[int, Symbol]]):
        self.poisson = poisson
        self.moyal_terms = list(moyal_terms)

    @property
    def first_nonvanishing_correction(self) -> Optional[int]:
        for k, term in self.moyal_terms:
            if k >= 1 and not term.is_zero:
                return k
        return None

    @property
    def is_canonical(self) -> bool:
        return _is_minus_one(self.poisson) and self.first_nonvanishing_correction is None

    def to_dict(self) -> dict:
        return {
            "poisson": _symbol_to_dict(self.poisson),
            "moyal_terms": [{"k": k, "term": _symbol_to_dict(t)} for k, t in self.moyal_terms],
            "is_canonical": self.is_canonical,
            "first_nonvanishing_correction": self.first_nonvanishing_correction,
        }

    def to_json(self) -> str:
        """Serializa o relatório para uma string JSON."""
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_json(cls, json_str: str) -> "BracketReport":
        """Cria um relatório a partir de uma string JSON."""
        data = json.loads(json_str)
        terms = [(int(item["k"]), _symbol_from_dict(item["term"])) for item in data.get("moyal_terms", [])]
        return cls(_symbol_from_dict(data["poisson"]), terms)


def check_canonical_pair(P: Symbol, Q: Symbol, k_max: int = 2,
                         gamma_order: Optional[int] = None) -> BracketReport:
    """Colchete de Poisson e termos k = 0..k_max do colchete de Moyal de (P, Q)."""
    for name, value in (("P", P), ("Q", Q)):
        if isinstance(value, ExpSymbol):
            raise IncompatibleSymbolsError(f"{name} deve ser uma fração ou série em gamma.")
        if not _hbar_free(value):
            raise HbarDependentInputError(f"{name} depende de ħ; a verificação vale para pares sem ħ.")
    if gamma_order is not None:
        P, Q = _as_series(P, gamma_order), _as_series(Q, gamma_order)
    poisson = poisson_bracket(P, Q)
    terms = [(k, moyal_term(P, Q, k)) for k in range(k_max + 1)]
    report = BracketReport(poisson, terms)
    _logger.debug("par verificado: canônico=%s", report.is_canonical)
    return report
