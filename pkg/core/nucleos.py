"""Núcleos integrais da transformação unitária e funções geradoras clássicas.

Os núcleos são obtidos integrando o símbolo u(p, q) contra as fases de Fourier
das representações de posição, momento e mistas. O integrador é exato e
sequencial: expoentes quadráticos na variável de integração completam o
quadrado (integral gaussiana), expoentes lineares produzem um delta que colapsa
a integração seguinte nessa variável.

Convenção de ramo: para κ = iħ·c₂ > 0 a gaussiana contribui e^{-iπ/4}
(``GAUSSIAN_BRANCH_EIGHTHS``); coeficientes simbólicos são tratados como
positivos. Compostas como aqui, as fases saem conjugadas em relação à leitura
usual e^{iF/ħ}; por isso os núcleos marcam ``conjugated = True`` e a função
geradora é lida como F = −ħΦ/i.
"""

from __future__ import annotations

import json
import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from core.algebra import HBAR, IMAGINARY_UNIT, RatSymbol, as_rat, re_im
from core.erros import (
    HbarResidueError,
    UnsupportedExponentDegreeError,
    UnsupportedIntegrandError,
)
from core.exponencial import ExpSymbol, Prefactor
from core.expressao import format_latex, format_plain
from core.geradoras import CanonicalPair, DeterminantRelation

_logger = logging.getLogger(__name__)

GAUSSIAN_BRANCH_EIGHTHS = -1

KERNEL_VARIABLES: Dict[str, Tuple[str, str]] = {
    "position": ("y", "x"),
    "mixed": ("y", "p_x"),
    "momentum": ("p_y", "p_x"),
    "mixed2": ("p_y", "x"),
}
KINDS = tuple(KERNEL_VARIABLES)


def _var(name: str) -> RatSymbol:
    return RatSymbol.variable(name)


def _i_over_hbar() -> RatSymbol:
    return RatSymbol.constant(IMAGINARY_UNIT) / _var(HBAR)


def _assumed_abs(value: RatSymbol) -> Tuple[RatSymbol, int]:
    """(|value|, sinal); valores simbólicos são tratados como positivos."""
    if value.is_constant:
        re_part, _ = re_im(value.as_number())
        if re_part < 0:
            return -value, -1
        return value, 1
    _logger.debug("sinal de %s assumido positivo", value)
    return value, 1


class Kernel:
    """Núcleo ``corpo · δ(delta)`` nas duas variáveis do tipo escolhido."""

    def __init__(self, kind: str, body: ExpSymbol, delta: Optional[RatSymbol] = None,
                 conjugated: bool = True):
        if kind not in KERNEL_VARIABLES:
            raise ValueError(f"Tipo de núcleo desconhecido: '{kind}'")
        for name in ("p", "q"):
            if not body.free_of(name) or (delta is not None and not delta.free_of(name)):
                raise UnsupportedIntegrandError(f"O núcleo ainda depende de {name}.")
        self.kind = kind
        self.body = body
        self.delta = delta
        self.conjugated = conjugated

    @property
    def variables(self) -> Tuple[str, str]:
        return KERNEL_VARIABLES[self.kind]

    @property
    def prefactor(self) -> Prefactor:
        return self.body.prefactor

    @property
    def exponent(self) -> RatSymbol:
        return self.body.exponent

    @classmethod
    def from_generating_function(cls, kind: str, F, prefactor: Optional[Prefactor] = None) -> "Kernel":
        """Núcleo e^{iF/ħ} para uma função geradora nas variáveis do tipo."""
        F = as_rat(F)
        return cls(kind, ExpSymbol(prefactor or Prefactor.one(), F * _i_over_hbar()), conjugated=False)

    def generating_function(self) -> RatSymbol:
        """F com Φ = ±iF/ħ; erro se F depender de ħ."""
        F = self.exponent * _var(HBAR) / IMAGINARY_UNIT
        if self.conjugated:
            F = -F
        if not F.free_of(HBAR):
            raise HbarResidueError(f"A função geradora extraída depende de ħ: {F}")
        return F

    def reduce(self, relation: Optional[DeterminantRelation]) -> "Kernel":
        if relation is None:
            return self
        delta = relation.reduce(self.delta) if self.delta is not None else None
        return Kernel(self.kind, relation.reduce(self.body), delta, self.conjugated)

    def format(self, fmt: str = "plain") -> str:
        if fmt == "json":
            return self.to_json()
        text = self.body.format(fmt)
        if self.delta is not None:
            if fmt == "latex":
                text += f" \\delta\\left({format_latex(self.delta)}\\right)"
            else:
                text += f"*delta({format_plain(self.delta)})"
        return text

    def __str__(self):
        return self.format("plain")

    def __repr__(self):
        return f"Kernel({self.kind}: {self})"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "variables": list(self.variables),
            "prefactor": self.prefactor.to_dict(),
            "exponent": self.exponent.to_dict(),
            "delta": self.delta.to_dict() if self.delta is not None else None,
            "conjugated": self.conjugated,
        }

    def to_json(self) -> str:
        """Serializa o núcleo para uma string JSON."""
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_json(cls, json_str: str) -> "Kernel":
        """Cria um núcleo a partir de uma string JSON."""
        data = json.loads(json_str)
        body = ExpSymbol(Prefactor.from_dict(data["prefactor"]), RatSymbol.from_dict(data["exponent"]))
        delta = RatSymbol.from_dict(data["delta"]) if data.get("delta") else None
        return cls(data["kind"], body, delta, bool(data.get("conjugated", True)))


# ----------------------------------------------------------------------------
# Integração sequencial
# ----------------------------------------------------------------------------

class _Integrand:
    """Estado da integração: prefator · exp(Φ) · Π δ(λ_k)."""

    def __init__(self, body: ExpSymbol):
        self.body = body
        self.deltas: List[RatSymbol] = []

    def substitute(self, name: str, value: RatSymbol) -> None:
        self.body = self.body.substitute({name: value})
        self.deltas = [d.substitute({name: value}) for d in self.deltas]

    def scale_prefactor(self, factor: RatSymbol = None, radicand: RatSymbol = None,
                        phase: int = 0, two_pi_hbar: Fraction = Fraction(0)) -> None:
        extra = Prefactor.build(factor if factor is not None else 1,
                                radicand if radicand is not None else 1, phase, two_pi_hbar)
        self.body = ExpSymbol(self.body.prefactor * extra, self.body.exponent)

    def integrate(self, name: str) -> None:
        for k, delta in enumerate(self.deltas):
            if not delta.free_of(name):
                self._collapse(k, name)
                return
        prefactor = self.body.prefactor
        if not (prefactor.rational_part.free_of(name) and prefactor.radicand.free_of(name)):
            raise UnsupportedIntegrandError(f"O prefator depende da variável de integração {name}.")
        exponent = self.body.exponent
        if not exponent.is_polynomial_in((name,)):
            raise UnsupportedExponentDegreeError(f"O expoente não é polinomial em {name}.")
        degree = exponent.degree(name)
        if degree >= 3:
            raise UnsupportedExponentDegreeError(
                f"Expoente de grau {degree} em {name}; apenas graus 1 e 2 são integrados.")
        coeffs = exponent.coefficients_in(name)
        zero = RatSymbol.constant(0)
        c0, c1, c2 = coeffs.get(0, zero), coeffs.get(1, zero), coeffs.get(2, zero)
        if degree == 2:
            self._gaussian(name, c0, c1, c2)
        elif degree == 1:
            self._linear(name, c0, c1)
        else:
            raise UnsupportedIntegrandError(f"Integral em {name} sem fase oscilante diverge.")

    def _gaussian(self, name: str, c0: RatSymbol, c1: RatSymbol, c2: RatSymbol) -> None:
        kappa = c2 * _var(HBAR) * IMAGINARY_UNIT
        if not kappa.free_of(HBAR) or not kappa.is_real:
            raise UnsupportedIntegrandError(f"Coeficiente quadrático em {name} não é uma fase real: {c2}")
        magnitude, sign = _assumed_abs(kappa)
        self.body = ExpSymbol(self.body.prefactor, c0 - c1 ** 2 / (c2 * 4))
        self.scale_prefactor(radicand=RatSymbol.constant(1) / (magnitude * 2),
                             phase=GAUSSIAN_BRANCH_EIGHTHS * sign, two_pi_hbar=Fraction(1, 2))
        _logger.debug("integral gaussiana em %s, κ = %s", name, kappa)

    def _linear(self, name: str, c0: RatSymbol, c1: RatSymbol) -> None:
        lam = c1 * _var(HBAR) / IMAGINARY_UNIT
        if not lam.free_of(HBAR) or not lam.is_real:
            raise UnsupportedIntegrandError(f"Coeficiente linear em {name} não é uma fase real: {c1}")
        self.body = ExpSymbol(self.body.prefactor, c0)
        self.scale_prefactor(two_pi_hbar=Fraction(1))
        self.deltas.append(lam)
        _logger.debug("integral linear em %s gera delta(%s)", name, lam)

    def _collapse(self, k: int, name: str) -> None:
        delta = self.deltas.pop(k)
        if not delta.is_polynomial_in((name,)) or delta.degree(name) != 1:
            raise UnsupportedIntegrandError(f"Delta não linear em {name}: {delta}")
        coeffs = delta.coefficients_in(name)
        alpha = coeffs[1]
        beta = coeffs.get(0, RatSymbol.constant(0))
        root = -beta / alpha
        magnitude, _ = _assumed_abs(alpha)
        self.substitute(name, root)
        self.scale_prefactor(factor=RatSymbol.constant(1) / magnitude)
        _logger.debug("delta colapsado em %s = %s", name, root)


def _simplify_delta(delta: RatSymbol, variables: Sequence[str]) -> Tuple[RatSymbol, RatSymbol]:
    """Normaliza δ(α v + β) para δ(v + β/α)/|α| na primeira variável presente."""
    for name in variables:
        if not delta.free_of(name) and delta.is_polynomial_in((name,)) and delta.degree(name) == 1:
            alpha = delta.coefficients_in(name)[1]
            magnitude, _ = _assumed_abs(alpha)
            return delta / alpha, RatSymbol.constant(1) / magnitude
    return delta, RatSymbol.constant(1)


def _as_exp(u) -> ExpSymbol:
    if isinstance(u, ExpSymbol):
        return u
    return ExpSymbol(Prefactor.build(as_rat(u)), RatSymbol.constant(0))


def kernel_transform(u, kind: str) -> Kernel:
    """Núcleo do tipo ``kind`` obtido do símbolo u(p, q)."""
    if kind not in KERNEL_VARIABLES:
        raise ValueError(f"Tipo de núcleo desconhecido: '{kind}'")
    u = _as_exp(u)
    p, q = _var("p"), _var("q")
    x, y, p_x, p_y = _var("x"), _var("y"), _var("p_x"), _var("p_y")
    phase = _i_over_hbar()
    if kind in ("position", "mixed"):
        body = u.substitute({"q": (x + y) / 2})
        extra = phase * p * (y - x)
        if kind == "mixed":
            extra = extra + phase * x * p_x
        order = ["x", "p"] if kind == "mixed" else ["p"]
        norm = Fraction(-1)
    else:
        body = u.substitute({"p": (p_y + p_x) / 2})
        extra = phase * q * (p_y - p_x)
        if kind == "mixed2":
            extra = extra - phase * x * p_x
        order = ["q", "p_x"] if kind == "mixed2" else ["q"]
        norm = Fraction(-1) if kind == "mixed2" else Fraction(0)
    state = _Integrand(ExpSymbol(body.prefactor, body.exponent + extra))
    state.scale_prefactor(two_pi_hbar=norm)
    for name in order:
        state.integrate(name)
    delta = None
    if state.deltas:
        if len(state.deltas) > 1:
            raise UnsupportedIntegrandError("Mais de um delta restante no núcleo.")
        delta, factor = _simplify_delta(state.deltas[0], KERNEL_VARIABLES[kind])
        state.scale_prefactor(factor=factor)
    kernel = Kernel(kind, state.body, delta)
    _logger.debug("núcleo %s: %s", kind, kernel)
    return kernel


# ----------------------------------------------------------------------------
# Relações clássicas
# ----------------------------------------------------------------------------

# Argumentos de cada tipo de função geradora.
GENERATING_TYPES: Dict[str, Tuple[str, str]] = {
    "F1": ("Q", "q"),
    "F2": ("q", "P"),
    "F3": ("Q", "p"),
    "F4": ("P", "p"),
}

# Leitura de cada núcleo como função geradora: papel -> (variável do núcleo, sinal).
# Com a fase de Fourier dos núcleos de momento, p_x faz o papel do momento novo e o
# núcleo misto correspondente lê Q = −x.
KERNEL_READINGS: Dict[str, Tuple[str, Dict[str, Tuple[str, int]]]] = {
    "position": ("F1", {"Q": ("y", 1), "q": ("x", 1)}),
    "mixed": ("F3", {"Q": ("y", 1), "p": ("p_x", 1)}),
    "momentum": ("F4", {"P": ("p_x", 1), "p": ("p_y", 1)}),
    "mixed2": ("F3", {"Q": ("x", -1), "p": ("p_y", 1)}),
}


def _relation_residual(role: str, derivative: RatSymbol, ct: CanonicalPair) -> RatSymbol:
    """p = ∂F/∂q, q = −∂F/∂p, P = −∂F/∂Q, Q = ∂F/∂P, como resíduos."""
    if role == "q":
        return _var("p") - derivative
    if role == "p":
        return _var("q") + derivative
    if role == "Q":
        return ct.P + derivative
    return ct.Q - derivative


def classical_relations(F, gf_type: str, ct: CanonicalPair) -> Tuple[RatSymbol, RatSymbol]:
    """Resíduos das relações de geração de F escrita nos argumentos do tipo.

    F1(Q,q): p = ∂F/∂q, P = −∂F/∂Q.   F3(Q,p): q = −∂F/∂p, P = −∂F/∂Q.
    F2(q,P): p = ∂F/∂q, Q = ∂F/∂P.    F4(P,p): q = −∂F/∂p, Q = ∂F/∂P.
    """
    if gf_type not in GENERATING_TYPES:
        raise ValueError(f"Tipo de função geradora desconhecido: '{gf_type}'")
    F = as_rat(F)
    images = {"P": ct.P, "Q": ct.Q}
    residuals = []
    for role in GENERATING_TYPES[gf_type]:
        derivative = F.diff(role).substitute(images)
        residuals.append(ct.reduce(_relation_residual(role, derivative, ct)))
    return residuals[0], residuals[1]


def generating_function_of(kernel: Kernel) -> Tuple[str, RatSymbol]:
    """(tipo, F) com F escrita nos argumentos clássicos do tipo."""
    gf_type, reading = KERNEL_READINGS[kernel.kind]
    mapping = {var: _var(role) * sign for role, (var, sign) in reading.items()}
    return gf_type, kernel.generating_function().substitute(mapping)


def classical_genfun_check(F: Kernel, ct: CanonicalPair) -> bool:
    """Verdadeiro se a função geradora do núcleo reproduz a transformação."""
    if F.delta is not None:
        _logger.debug("núcleo com delta não define função geradora")
        return False
    gf_type, generating = generating_function_of(F)
    r_first, r_second = classical_relations(generating, gf_type, ct)
    _logger.debug("%s = %s: resíduos %s, %s", gf_type, generating, r_first, r_second)
    return r_first.is_zero and r_second.is_zero
