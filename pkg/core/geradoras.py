"""Funções geradoras de transformações canônicas.

Uma transformação (p, q) ↦ (P, Q) sem ħ é gerada por u = e^{2iT/ħ}, com T
obtido do sistema de gradiente. As derivadas do mapa inverso vêm da adjunta do
jacobiano direto (det = 1):

    ∂p/∂P = ∂Q/∂q,  ∂q/∂Q = ∂P/∂p,  ∂q/∂P = −∂Q/∂p,  ∂p/∂Q = −∂P/∂q.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from core.algebra import HBAR, IMAGINARY_UNIT, RatSymbol, as_rat
from core.erros import (
    ExactnessFailureError,
    HbarDependentInputError,
    HbarDependentTError,
    NonPolynomialAntiderivativeError,
    NotCanonicalError,
    SingularDenominatorError,
    TracePlusTwoSingularError,
)
from core.estrela import poisson_bracket, star_product
from core.exponencial import ExpSymbol, Prefactor
from core.operadores import DiffOperator, apply, bopp

_logger = logging.getLogger(__name__)

Symbol = Union[RatSymbol, ExpSymbol]


# ----------------------------------------------------------------------------
# Relação de determinante
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class DeterminantRelation:
    """ad − bc = 1 entre quatro parâmetros, eliminando d (ou a, no caminho secundário)."""

    a: str = "a"
    b: str = "b"
    c: str = "c"
    d: str = "d"
    eliminate: str = "d"

    def __post_init__(self):
        if self.eliminate not in ("a", "d"):
            raise ValueError("A relação elimina apenas a ou d.")

    @classmethod
    def from_text(cls, text: str, eliminate: str = "d") -> "DeterminantRelation":
        names = [n.strip() for n in text.split(",")]
        if len(names) != 4 or not all(names):
            raise ValueError(f"Relação de determinante exige quatro nomes: '{text}'")
        return cls(*names, eliminate=eliminate)

    def substitution(self) -> Dict[str, RatSymbol]:
        a, b, c, d = (RatSymbol.variable(n) for n in (self.a, self.b, self.c, self.d))
        if self.eliminate == "d":
            return {self.d: (1 + b * c) / a}
        return {self.a: (1 + b * c) / d}

    def secondary(self) -> "DeterminantRelation":
        return DeterminantRelation(self.a, self.b, self.c, self.d, "a" if self.eliminate == "d" else "d")

    def reduce(self, f):
        """Reescreve f sem a variável eliminada."""
        if f is None:
            return f
        if isinstance(f, (RatSymbol, ExpSymbol)):
            return f.substitute(self.substitution())
        return as_rat(f).substitute(self.substitution())

    @property
    def names(self) -> Tuple[str, str, str, str]:
        return (self.a, self.b, self.c, self.d)


def _reduce(relation: Optional[DeterminantRelation], f):
    return relation.reduce(f) if relation is not None else f


# ----------------------------------------------------------------------------
# Par canônico
# ----------------------------------------------------------------------------

class CanonicalPair:
    """Transformação (p, q) ↦ (P(p, q), Q(p, q)) sem dependência em ħ."""

    def __init__(self, P, Q, relation: Optional[DeterminantRelation] = None, name: str = ""):
        self.P = as_rat(P)
        self.Q = as_rat(Q)
        self.relation = relation
        self.name = name
        for label, value in (("P", self.P), ("Q", self.Q)):
            if not value.free_of(HBAR):
                raise HbarDependentInputError(f"{label} depende de ħ: {value}")

    @classmethod
    def identity(cls) -> "CanonicalPair":
        return cls(RatSymbol.variable("p"), RatSymbol.variable("q"), name="identidade")

    @classmethod
    def from_matrix(cls, g: Sequence[Sequence[object]], relation: Optional[DeterminantRelation] = None,
                    name: str = "") -> "CanonicalPair":
        """P = a p + b q, Q = c p + d q para g = [[a, b], [c, d]]."""
        (a, b), (c, d) = g
        p, q = RatSymbol.variable("p"), RatSymbol.variable("q")
        return cls(as_rat(a) * p + as_rat(b) * q, as_rat(c) * p + as_rat(d) * q, relation, name)

    def reduce(self, f):
        return _reduce(self.relation, f)

    def forward_partials(self) -> Dict[str, RatSymbol]:
        return {
            "P_p": self.P.diff("p"), "P_q": self.P.diff("q"),
            "Q_p": self.Q.diff("p"), "Q_q": self.Q.diff("q"),
        }

    def inverse_partials(self) -> Dict[str, RatSymbol]:
        """Derivadas de (p, q) em relação a (P, Q), escritas em (p, q)."""
        d = self.forward_partials()
        return {"p_P": d["Q_q"], "q_Q": d["P_p"], "q_P": -d["Q_p"], "p_Q": -d["P_q"]}

    def jacobian_determinant(self) -> RatSymbol:
        return self.reduce(-poisson_bracket(self.P, self.Q))

    def is_canonical(self) -> bool:
        return (self.reduce(poisson_bracket(self.P, self.Q)) + 1).is_zero

    def require_canonical(self) -> None:
        if not self.is_canonical():
            raise NotCanonicalError(f"O par ({self.P}, {self.Q}) não satisfaz {{P, Q}} = -1.")

    def to_dict(self) -> dict:
        data = {"name": self.name, "P": self.P.to_dict(), "Q": self.Q.to_dict()}
        if self.relation is not None:
            data["relation"] = {"names": list(self.relation.names), "eliminate": self.relation.eliminate}
        return data

    def to_json(self) -> str:
        """Serializa o par para uma string JSON."""
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_json(cls, json_str: str) -> "CanonicalPair":
        """Cria um par a partir de uma string JSON."""
        data = json.loads(json_str)
        relation = None
        if data.get("relation"):
            relation = DeterminantRelation(*data["relation"]["names"], eliminate=data["relation"]["eliminate"])
        return cls(RatSymbol.from_dict(data["P"]), RatSymbol.from_dict(data["Q"]), relation, data.get("name", ""))

    def __repr__(self):
        return f"CanonicalPair(P={self.P}, Q={self.Q})"


def lagrange_bracket(ct: CanonicalPair) -> RatSymbol:
    """{q, p}_{Q,P} = ∂q/∂Q ∂p/∂P − ∂q/∂P ∂p/∂Q; vale 1 para pares canônicos."""
    inv = ct.inverse_partials()
    return ct.reduce(inv["q_Q"] * inv["p_P"] - inv["q_P"] * inv["p_Q"])


# ----------------------------------------------------------------------------
# Equações de autovalor estrela
# ----------------------------------------------------------------------------

def star_eigen_residuals(u: Symbol, ct: CanonicalPair) -> Tuple[Symbol, Symbol]:
    """(u ⋆ Q − q ⋆ u, u ⋆ P − p ⋆ u); ambos nulos quando u gera a transformação.

    Os lados direitos são q ⋆ u = (q + (iħ/2)∂_p)u e p ⋆ u = (p − (iħ/2)∂_q)u.
    """
    q_star = apply(bopp("right", "q"), u)
    p_star = apply(bopp("right", "p"), u)
    residual_q = star_product(u, ct.Q) - q_star
    residual_p = star_product(u, ct.P) - p_star
    return ct.reduce(residual_q), ct.reduce(residual_p)


# ----------------------------------------------------------------------------
# Sistema de gradiente e integração
# ----------------------------------------------------------------------------

def trace_plus_two(ct: CanonicalPair) -> RatSymbol:
    inv = ct.inverse_partials()
    return ct.reduce(2 + inv["p_P"] + inv["q_Q"])


def gradient_T(ct: CanonicalPair) -> Tuple[RatSymbol, RatSymbol]:
    """(∂_p T, ∂_q T) = (2 + ∂_P p + ∂_Q q)^{-1} · M · (q − Q, P − p)."""
    t = trace_plus_two(ct)
    if t.is_zero:
        raise SingularDenominatorError("2 + ∂p/∂P + ∂q/∂Q se anula identicamente.")
    inv = ct.inverse_partials()
    p, q = RatSymbol.variable("p"), RatSymbol.variable("q")
    dq, dp = q - ct.Q, ct.P - p
    gp = ((1 + inv["q_Q"]) * dq - inv["q_P"] * dp) / t
    gq = (-inv["p_Q"] * dq + (1 + inv["p_P"]) * dp) / t
    return ct.reduce(gp), ct.reduce(gq)


def _integrate_termwise(f: RatSymbol, name: str) -> Optional[RatSymbol]:
    """Primitiva termo a termo em ``name``; None se o denominador depende de ``name``."""
    if not f.is_polynomial_in((name,)):
        return None
    x = RatSymbol.variable(name)
    total = RatSymbol.constant(0)
    for k, c in f.coefficients_in(name).items():
        total = total + c * x ** (k + 1) / (k + 1)
    return total


def _integrate_in_order(gp: RatSymbol, gq: RatSymbol, first: str) -> Optional[RatSymbol]:
    second = "q" if first == "p" else "p"
    g_first, g_second = (gp, gq) if first == "p" else (gq, gp)
    partial = _integrate_termwise(g_first, first)
    if partial is None:
        return None
    remainder = g_second - partial.diff(second)
    if not remainder.free_of(first):
        return None
    rest = _integrate_termwise(remainder, second)
    if rest is None:
        return None
    return partial + rest


def integrate_gradient(gp, gq) -> RatSymbol:
    """T com ∂_p T = gp, ∂_q T = gq e T(0, 0) = 0."""
    gp, gq = as_rat(gp), as_rat(gq)
    if gp.diff("q") != gq.diff("p"):
        raise ExactnessFailureError("∂_q gp difere de ∂_p gq; o par não é um gradiente.")
    for first in ("p", "q"):
        T = _integrate_in_order(gp, gq, first)
        if T is not None:
            _logger.debug("T integrado começando por %s", first)
            return _normalize_constant(T)
    raise NonPolynomialAntiderivativeError(
        "A primitiva sai das frações com denominador independente da variável integrada.")


def _pq_coefficients(f: RatSymbol) -> Dict[Tuple[int, int], RatSymbol]:
    """Coeficientes de p^i q^j de um polinômio em (p, q)."""
    out = {}
    for i, c in f.coefficients_in("p").items():
        for j, cij in c.coefficients_in("q").items():
            out[(i, j)] = cij
    return out


def _normalize_constant(T: RatSymbol) -> RatSymbol:
    """Fixa a constante aditiva de T = N/D.

    Anula o coeficiente de N no menor monômio (grau total, depois lex) de D em
    (p, q). Com D(0, 0) ≠ 0 isso é exatamente T(0, 0) = 0.
    """
    den_terms = _pq_coefficients(T.den.to_rat())
    lowest = min(den_terms, key=lambda ij: (ij[0] + ij[1], ij))
    num_terms = _pq_coefficients(T.num.to_rat())
    if lowest not in num_terms:
        return T
    shift = num_terms[lowest] / den_terms[lowest]
    if lowest != (0, 0):
        _logger.debug("T(0, 0) indefinido; constante fixada pelo monômio %s do denominador", lowest)
    return T - shift


def hbar_independence_check(T) -> bool:
    return as_rat(T).free_of(HBAR)


def build_u(T) -> ExpSymbol:
    """u = exp(2iT/ħ) com prefator unitário."""
    T = as_rat(T)
    if not hbar_independence_check(T):
        raise HbarDependentTError(f"T depende de ħ: {T}")
    exponent = T * (2 * IMAGINARY_UNIT) / RatSymbol.variable(HBAR)
    return ExpSymbol.from_exponent(exponent)


# ----------------------------------------------------------------------------
# SL2
# ----------------------------------------------------------------------------

def sl2_T(g: Sequence[Sequence[object]]) -> RatSymbol:
    """T = [b q² − c p² + (a − d) p q]/(a + d + 2)."""
    (a, b), (c, d) = [[as_rat(x) for x in row] for row in g]
    t = a + d + 2
    if t.is_zero:
        raise TracePlusTwoSingularError("Tr g = -2 não é tratado.")
    p, q = RatSymbol.variable("p"), RatSymbol.variable("q")
    return (b * q ** 2 - c * p ** 2 + (a - d) * p * q) / t


def sl2_u(g: Sequence[Sequence[object]], relation: Optional[DeterminantRelation] = None) -> ExpSymbol:
    """u = (2/√(a + d + 2))·exp(2iT/ħ); a identidade dá u = 1."""
    (a, _), (_, d) = [[as_rat(x) for x in row] for row in g]
    t = a + d + 2
    T = sl2_T(g)
    u = build_u(T)
    u = ExpSymbol(Prefactor.build(2, RatSymbol.constant(1) / t), u.exponent)
    return _reduce(relation, u)


# ----------------------------------------------------------------------------
# Condições de covariância
# ----------------------------------------------------------------------------

def covariance_condition_check(u: Symbol, ct: CanonicalPair) -> bool:
    """(Q − (iħ/2)∂_P)u = (q + (iħ/2)∂_p)u e (P + (iħ/2)∂_Q)u = (p − (iħ/2)∂_q)u.

    Condições suficientes, não necessárias: False não refuta a independência de ħ.
    """
    if trace_plus_two(ct).is_zero:
        raise SingularDenominatorError("2 + ∂p/∂P + ∂q/∂Q se anula identicamente.")
    inv = ct.inverse_partials()
    d_P = DiffOperator({(1, 0): inv["p_P"], (0, 1): inv["q_P"]})
    d_Q = DiffOperator({(1, 0): inv["p_Q"], (0, 1): inv["q_Q"]})
    half = RatSymbol.variable(HBAR) * IMAGINARY_UNIT / 2
    lhs_q = apply(DiffOperator.multiplication(ct.Q) - d_P.scale(half), u)
    lhs_p = apply(DiffOperator.multiplication(ct.P) + d_Q.scale(half), u)
    rhs_q = apply(bopp("right", "q"), u)
    rhs_p = apply(bopp("right", "p"), u)
    return ct.reduce(lhs_q - rhs_q).is_zero and ct.reduce(lhs_p - rhs_p).is_zero


# ----------------------------------------------------------------------------
# Catálogo
# ----------------------------------------------------------------------------

SL2_NUMERIC = (
    ((2, 1), (1, 1)),
    ((1, 1), (0, 1)),
    ((0, -1), (1, 0)),
    ((3, 2), (4, 3)),
)


def ct_catalog() -> List[CanonicalPair]:
    """Transformações usadas nos testes e na linha de comando."""
    p, q, gamma = RatSymbol.variable("p"), RatSymbol.variable("q"), RatSymbol.variable("gamma")
    a = RatSymbol.variable("a")
    relation = DeterminantRelation()
    pairs = [
        CanonicalPair.identity(),
        CanonicalPair.from_matrix(_symbolic_matrix(), relation, "sl2"),
    ]
    for k, g in enumerate(SL2_NUMERIC):
        pairs.append(CanonicalPair.from_matrix(g, name=f"sl2_{k}"))
    pairs.append(CanonicalPair(p, q + a * p ** 2, name="potencial_linear"))
    pairs.append(CanonicalPair(p / (1 + gamma * p), q * (1 + gamma * p) ** 2, name="fluxo_gamma"))
    return pairs


def _symbolic_matrix() -> List[List[RatSymbol]]:
    return [[RatSymbol.variable("a"), RatSymbol.variable("b")],
            [RatSymbol.variable("c"), RatSymbol.variable("d")]]
