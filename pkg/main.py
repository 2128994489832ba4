"""Linha de comando do cálculo de Weyl exato.

Cada subcomando lê expressões com a mesma gramática (``core.expressao``), chama
as operações do núcleo e imprime o resultado em ``plain``, ``latex`` ou ``json``.
Códigos de saída: 0 sucesso, 1 erro de domínio, 2 erro de uso.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from core.algebra import GammaSeries, PolySymbol, RatSymbol
from core.erros import ErroCalculo
from core.estrela import check_canonical_pair, moyal_bracket, poisson_bracket, star_product
from core.exponencial import ExpSymbol
from core.expressao import FORMATS, format_latex, format_plain, parse
from core.fluxos import compare_closed_form, flow
from core.geradoras import (
    CanonicalPair,
    DeterminantRelation,
    build_u,
    covariance_condition_check,
    gradient_T,
    hbar_independence_check,
    integrate_gradient,
    sl2_u,
    star_eigen_residuals,
)
from core.nucleos import KINDS, Kernel, classical_genfun_check, generating_function_of, kernel_transform
from core.operadores import (
    DiffOperator,
    GeneratorExpansion,
    image_of_monomial,
    moyal_lie_vector,
    weyl_symbol_of_word,
    weyl_symmetrize,
)

_logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DEFAULT_GAMMA_ORDER = 8
DEFAULT_K_MAX = 2

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2


class UsageError(ValueError):
    """Argumento bem formado para o argparse, mas inválido para o subcomando."""


@dataclass
class CommandResult:
    """Resultado de uma invocação: status, payload JSON, linhas de texto e diagnósticos."""

    command: str
    status: str = "ok"
    payload: dict = field(default_factory=dict)
    lines: List[str] = field(default_factory=list)
    diagnostics: List[str] = field(default_factory=list)
    exit_code: int = EXIT_OK
    fmt: str = "plain"

    @classmethod
    def error(cls, command: str, message: str, exit_code: int) -> "CommandResult":
        return cls(command, status="error", diagnostics=[message], exit_code=exit_code)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "status": self.status,
            "command": self.command,
            "payload": self.payload,
            "diagnostics": self.diagnostics,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


# ----------------------------------------------------------------------------
# Apresentação
# ----------------------------------------------------------------------------

def _series_text(series: GammaSeries, fmt: str) -> str:
    render = format_latex if fmt == "latex" else format_plain
    pieces = []
    for k, c in enumerate(series.coeffs):
        if c.is_zero:
            continue
        text = render(c)
        if k == 0:
            pieces.append(text)
        elif fmt == "latex":
            pieces.append(f"\\left({text}\\right) \\gamma^{{{k}}}")
        else:
            pieces.append(f"({text})*gamma^{k}")
    tail = f"O(\\gamma^{{{series.order + 1}}})" if fmt == "latex" else f"O(gamma^{series.order + 1})"
    return " + ".join(pieces + [tail])


def show(value, fmt: str) -> str:
    """Texto de um resultado do núcleo no formato pedido (plain ou latex)."""
    if isinstance(value, PolySymbol):
        value = value.to_rat()
    if isinstance(value, RatSymbol):
        return format_latex(value) if fmt == "latex" else format_plain(value)
    if isinstance(value, GammaSeries):
        return _series_text(value, fmt)
    if isinstance(value, (ExpSymbol, Kernel)):
        return value.format(fmt)
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def dump(value):
    """Forma JSON de um resultado do núcleo."""
    if isinstance(value, (PolySymbol, RatSymbol, GammaSeries, ExpSymbol, Kernel, DiffOperator)):
        return value.to_dict()
    return value


def _entry(result: CommandResult, label: str, value, fmt: str) -> None:
    result.payload[label] = {"value": dump(value), "text": show(value, "plain")}
    result.lines.append(f"{label} = {show(value, fmt)}")


# ----------------------------------------------------------------------------
# Leitura de argumentos
# ----------------------------------------------------------------------------

def _params(args) -> Tuple[str, ...]:
    names = [n.strip() for n in (args.params or "").split(",") if n.strip()]
    relation = getattr(args, "det", None)
    if relation:
        names.extend(n.strip() for n in relation.split(",") if n.strip())
    return tuple(dict.fromkeys(names))


def _user_input(call: Callable, *args):
    """Chama uma leitura de argumento; ValueError que não é de domínio vira erro de uso."""
    try:
        return call(*args)
    except ErroCalculo:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _parse(text: str, params: Sequence[str]) -> RatSymbol:
    return _user_input(parse, text, params)


def _check_orders(args) -> None:
    for name in ("order", "k_max"):
        value = getattr(args, name, None)
        if value is not None and value < 0:
            raise UsageError(f"--{name.replace('_', '-')} deve ser não negativo.")


def _require(args, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"Argumentos obrigatórios ausentes: {', '.join(missing)}")


def parse_generator(text: str, params: Sequence[str]) -> GeneratorExpansion:
    """Lê ``"m,n:coef;m,n:coef"`` como Σ a_{m,n} t_{m,n}."""
    coeffs: Dict[Tuple[int, int], RatSymbol] = {}
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        orders, sep, coeff = chunk.partition(":")
        parts = orders.split(",")
        if not sep or len(parts) != 2:
            raise UsageError(f"Termo de gerador inválido: '{chunk}' (esperado 'm,n:coef')")
        try:
            m, n = int(parts[0]), int(parts[1])
        except ValueError:
            raise UsageError(f"Ordens não inteiras em '{chunk}'") from None
        value = _parse(coeff, params)
        coeffs[(m, n)] = coeffs[(m, n)] + value if (m, n) in coeffs else value
    if not coeffs:
        raise UsageError("Gerador vazio.")
    return _user_input(GeneratorExpansion, coeffs)


def _monomial(text: str) -> Tuple[int, int]:
    try:
        m, n = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"Monômio inválido: '{text}' (esperado 'm,n')") from None
    if m < 0 or n < 0:
        raise UsageError("Expoentes do monômio devem ser não negativos.")
    return m, n


def _canonical_pair(args) -> CanonicalPair:
    _require(args, "P", "Q")
    params = _params(args)
    relation = _user_input(DeterminantRelation.from_text, args.det) if args.det else None
    ct = CanonicalPair(_parse(args.P, params), _parse(args.Q, params), relation)
    ct.require_canonical()
    return ct


def _linear_matrix(ct: CanonicalPair) -> Optional[List[List[RatSymbol]]]:
    """[[a, b], [c, d]] quando P = ap + bq e Q = cp + dq."""
    p, q = RatSymbol.variable("p"), RatSymbol.variable("q")
    rows = []
    for image in (ct.P, ct.Q):
        a, b = image.diff("p"), image.diff("q")
        if not all(x.free_of("p") and x.free_of("q") for x in (a, b)):
            return None
        if not (image - a * p - b * q).is_zero:
            return None
        rows.append([a, b])
    return rows


def _symbol_of(ct: CanonicalPair) -> Tuple[RatSymbol, ExpSymbol]:
    """T pelo sistema de gradiente e u; transformações lineares recebem o prefator 2/√(a+d+2)."""
    gp, gq = gradient_T(ct)
    T = integrate_gradient(gp, gq)
    matrix = _linear_matrix(ct)
    if matrix is not None:
        return T, sl2_u(matrix, ct.relation)
    return T, build_u(T)


# ----------------------------------------------------------------------------
# Subcomandos
# ----------------------------------------------------------------------------

def cmd_star(args, result: CommandResult) -> None:
    _require(args, "lhs", "rhs")
    params = _params(args)
    f, g = _parse(args.lhs, params), _parse(args.rhs, params)
    _entry(result, "star", star_product(f, g, args.order), args.format)


def cmd_bracket(args, result: CommandResult) -> None:
    _require(args, "lhs", "rhs")
    params = _params(args)
    f, g = _parse(args.lhs, params), _parse(args.rhs, params)
    if args.kind == "poisson":
        value = poisson_bracket(f, g)
    else:
        value = moyal_bracket(f, g, args.order)
    _entry(result, args.kind, value, args.format)


def cmd_verify_ct(args, result: CommandResult) -> None:
    _require(args, "P", "Q")
    params = _params(args)
    P, Q = _parse(args.P, params), _parse(args.Q, params)
    report = check_canonical_pair(P, Q, args.k_max, args.order)
    result.payload.update(report.to_dict())
    result.lines.append(f"poisson = {show(report.poisson, args.format)}")
    for k, term in report.moyal_terms:
        result.lines.append(f"moyal[{k}] = {show(term, args.format)}")
    result.lines.append(f"is_canonical = {show(report.is_canonical, args.format)}")


def cmd_flow(args, result: CommandResult) -> None:
    _require(args, "generator", "f")
    params = _params(args)
    V = moyal_lie_vector(parse_generator(args.generator, params))
    order = DEFAULT_GAMMA_ORDER if args.order is None else args.order
    outcome = flow(V, _parse(args.f, params), order, args.sign)
    _entry(result, "flow", outcome.series, args.format)
    result.payload["generator"] = V.to_dict()
    result.payload["hbar_free"] = outcome.hbar_free
    result.lines.append(f"hbar_free = {show(outcome.hbar_free, args.format)}")
    if args.closed:
        matches = compare_closed_form(outcome, _parse(args.closed, params))
        result.payload["matches_closed_form"] = matches
        result.lines.append(f"matches_closed_form = {show(matches, args.format)}")


def cmd_ordering(args, result: CommandResult) -> None:
    if args.word is None and args.monomial is None:
        raise UsageError("Informe --word ou --monomial.")
    if args.word is not None:
        _entry(result, "word_symbol", _user_input(weyl_symbol_of_word, args.word), args.format)
        _entry(result, "symmetrized", weyl_symmetrize(args.word), args.format)
    if args.monomial is not None:
        S = image_of_monomial(_monomial(args.monomial))
        result.payload["operator"] = {"value": S.to_dict(), "text": str(S)}
        result.lines.append(f"operator = {S}")


def cmd_genfun(args, result: CommandResult) -> None:
    ct = _canonical_pair(args)
    T, u = _symbol_of(ct)
    _entry(result, "T", T, args.format)
    _entry(result, "u", u, args.format)
    residual_q, residual_p = star_eigen_residuals(u, ct)
    result.payload["hbar_independent"] = hbar_independence_check(T)
    result.payload["residuals"] = [dump(residual_q), dump(residual_p)]
    zero = residual_q.is_zero and residual_p.is_zero
    result.payload["residuals_zero"] = zero
    result.lines.append(f"residuals_zero = {show(zero, args.format)}")
    try:
        covariance = covariance_condition_check(u, ct)
    except ErroCalculo as exc:
        result.diagnostics.append(exc.diagnostic())
        covariance = None
    result.payload["covariance_conditions"] = covariance
    if covariance is not None:
        result.lines.append(f"covariance_conditions = {show(covariance, args.format)}")


def cmd_kernel(args, result: CommandResult) -> None:
    ct = _canonical_pair(args)
    _, u = _symbol_of(ct)
    kernel = kernel_transform(u, args.kind).reduce(ct.relation)
    result.payload["kernel"] = kernel.to_dict()
    result.lines.append(f"kernel[{kernel.kind}] = {kernel.format(args.format)}")
    if kernel.delta is None:
        gf_type, F = generating_function_of(kernel)
        _entry(result, gf_type, F, args.format)
        check = classical_genfun_check(kernel, ct)
        result.payload["classical_check"] = check
        result.lines.append(f"classical_check = {show(check, args.format)}")


COMMANDS: Dict[str, Callable[[argparse.Namespace, CommandResult], None]] = {
    "star": cmd_star,
    "bracket": cmd_bracket,
    "verify-ct": cmd_verify_ct,
    "flow": cmd_flow,
    "ordering": cmd_ordering,
    "genfun": cmd_genfun,
    "kernel": cmd_kernel,
}


# ----------------------------------------------------------------------------
# Argparse
# ----------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Erros de uso viram exceção em vez de encerrar o processo."""

    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="plain")
    common.add_argument("--params", default="", help="nomes de parâmetros separados por vírgula")
    common.add_argument("--verbose", action="store_true", help="log de depuração em stderr")

    parser = _Parser(prog="weyl-ct", description="Cálculo de Weyl exato: produto estrela, fluxos e funções geradoras.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    star = sub.add_parser("star", parents=[common], help="produto estrela f ⋆ g")
    star.add_argument("--lhs")
    star.add_argument("--rhs")
    star.add_argument("--order", type=int, help="truncagem em potências de ħ")

    bracket = sub.add_parser("bracket", parents=[common], help="colchete de Poisson ou de Moyal")
    bracket.add_argument("--lhs")
    bracket.add_argument("--rhs")
    bracket.add_argument("--kind", choices=("poisson", "moyal"), default="moyal")
    bracket.add_argument("--order", type=int, help="truncagem em potências de ħ")

    verify = sub.add_parser("verify-ct", parents=[common], help="verifica {P, Q} = -1 e as correções de Moyal")
    verify.add_argument("--P")
    verify.add_argument("--Q")
    verify.add_argument("--order", type=int, help="ordem em gamma para expandir P e Q")
    verify.add_argument("--k-max", dest="k_max", type=int, default=DEFAULT_K_MAX)

    flow_cmd = sub.add_parser("flow", parents=[common], help="fluxo de Moyal-Lie em série de gamma")
    flow_cmd.add_argument("--generator", help="'m,n:coef;...'")
    flow_cmd.add_argument("--f")
    flow_cmd.add_argument("--order", type=int)
    flow_cmd.add_argument("--sign", type=int, choices=(1, -1), default=1)
    flow_cmd.add_argument("--closed", help="forma fechada para comparar")

    ordering = sub.add_parser("ordering", parents=[common], help="símbolos de palavras e imagens S_{m,n}")
    ordering.add_argument("--word")
    ordering.add_argument("--monomial", help="'m,n'")

    for name, text in (("genfun", "T, u e resíduos da transformação"), ("kernel", "núcleo integral")):
        cmd = sub.add_parser(name, parents=[common], help=text)
        cmd.add_argument("--P")
        cmd.add_argument("--Q")
        cmd.add_argument("--det", help="relação ad - bc = 1 como 'a,b,c,d'")
        if name == "kernel":
            cmd.add_argument("--kind", choices=KINDS, default="position")
    return parser


def _wants_json(argv: Sequence[str]) -> bool:
    for k, arg in enumerate(argv):
        if arg == "--format=json" or (arg == "--format" and k + 1 < len(argv) and argv[k + 1] == "json"):
            return True
    return False


def run(argv: Optional[Sequence[str]] = None) -> CommandResult:
    """Executa um subcomando e devolve o resultado sem imprimir."""
    argv = list(sys.argv[1:] if argv is None else argv)
    command = argv[0] if argv else ""
    fmt = "json" if _wants_json(argv) else "plain"
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        result = CommandResult.error(command, f"UsageError: {exc}", EXIT_USAGE)
        result.fmt = fmt
        return result
    except SystemExit as exc:
        # --help já foi impresso pelo argparse
        return CommandResult(command, exit_code=int(exc.code or 0), fmt="help")
    if args.verbose:
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr)
    result = CommandResult(args.command, fmt=args.format)
    try:
        _check_orders(args)
        COMMANDS[args.command](args, result)
    except UsageError as exc:
        result = CommandResult.error(args.command, f"UsageError: {exc}", EXIT_USAGE)
    except ErroCalculo as exc:
        _logger.debug("erro de domínio em %s", args.command, exc_info=True)
        result = CommandResult.error(args.command, exc.diagnostic(), EXIT_DOMAIN)
    except Exception as exc:
        _logger.debug("falha interna em %s", args.command, exc_info=True)
        result = CommandResult.error(args.command, f"InternalError: {type(exc).__name__}: {exc}", EXIT_DOMAIN)
    result.fmt = args.format
    return result


def main(argv: Optional[Sequence[str]] = None) -> int:
    result = run(argv)
    if result.fmt == "json":
        print(result.to_json())
    elif result.fmt != "help":
        if result.status == "ok":
            print("\n".join(result.lines))
        for message in result.diagnostics:
            print(message, file=sys.stderr)
    return result.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
