"""Leitura e impressão de expressões simbólicas.

A gramática (ver ``docs/gramatica.md``) aceita racionais inteiros, a unidade
imaginária ``i``, as variáveis ``p``, ``q``, ``hbar``, ``gamma`` e parâmetros
declarados, combinados por ``+ - * / ^`` e parênteses. O analisador segue o
esquema de precedência por escalada: cada grupo de ``OPERATORS`` liga mais
forte que o anterior.
"""

from __future__ import annotations

import logging
import operator
import re
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple, Union

from core.algebra import (
    DISTINGUISHED,
    GAMMA,
    HBAR,
    IMAGINARY_UNIT,
    GaussianRational,
    RatSymbol,
    canonical_variables,
    re_im,
)
from core.erros import ExprSyntaxError, NegativeExponentError, UnknownSymbolError

_logger = logging.getLogger(__name__)

RESERVED = frozenset(DISTINGUISHED) | {"i"}

# Grupos em precedência crescente.
OPERATORS = [
    [("+", "left"), ("-", "left")],
    [("*", "left"), ("/", "left")],
    [("^", "none")],
]
OPERATOR_PREC = {name: idx for idx, group in enumerate(OPERATORS) for name, _ in group}
OPERATOR_ASSOC = {name: assoc for group in OPERATORS for name, assoc in group}
UNARY_MINUS_PREC = OPERATOR_PREC["^"]

# Limites da leitura; acima deles a entrada vira ExprSyntaxError.
MAX_NESTING = 100
MAX_EXPONENT = 64
MAX_DIGITS = 1000

_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"[0-9]+")


# ----------------------------------------------------------------------------
# Árvore sintática
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Numero:
    value: int
    offset: int


@dataclass(frozen=True)
class Imaginario:
    offset: int


@dataclass(frozen=True)
class Nome:
    name: str
    offset: int


@dataclass(frozen=True)
class Negacao:
    operand: "ExprAST"
    offset: int


@dataclass(frozen=True)
class Binaria:
    op: str
    lhs: "ExprAST"
    rhs: "ExprAST"
    offset: int


ExprAST = Union[Numero, Imaginario, Nome, Negacao, Binaria]


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op", "end"
    value: str
    offset: int


# ----------------------------------------------------------------------------
# Analisador léxico
# ----------------------------------------------------------------------------

def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    idx = 0
    while idx < len(text):
        c = text[idx]
        if c.isspace():
            idx += 1
            continue
        if "0" <= c <= "9":
            match = _NUMBER.match(text, idx)
            end = match.end()
            if end - idx > MAX_DIGITS:
                raise ExprSyntaxError(f"literal com mais de {MAX_DIGITS} dígitos", text, idx)
            if end < len(text) and text[end] in ".eE" and (text[end] == "." or end + 1 < len(text) and "0" <= text[end + 1] <= "9"):
                raise ExprSyntaxError("literais decimais não são suportados; use n/d", text, end)
            tokens.append(Token("num", match.group(), idx))
            idx = end
            continue
        if c == "." and idx + 1 < len(text) and "0" <= text[idx + 1] <= "9":
            raise ExprSyntaxError("literais decimais não são suportados; use n/d", text, idx)
        if c in OPERATOR_PREC or c in "()":
            tokens.append(Token("op", c, idx))
            idx += 1
            continue
        match = _IDENTIFIER.match(text, idx)
        if match:
            tokens.append(Token("name", match.group(), idx))
            idx = match.end()
            continue
        raise ExprSyntaxError(f"caractere inesperado {c!r}", text, idx)
    tokens.append(Token("end", "", len(text)))
    return tokens


# ----------------------------------------------------------------------------
# Analisador sintático
# ----------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.depth = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        if token.kind != "end":
            self.pos += 1
        return token

    def error(self, message: str, offset: int) -> ExprSyntaxError:
        return ExprSyntaxError(message, self.text, offset)

    @contextmanager
    def nested(self, token: Token):
        self.depth += 1
        try:
            if self.depth > MAX_NESTING:
                raise self.error(f"aninhamento acima de {MAX_NESTING} níveis", token.offset)
            yield
        finally:
            self.depth -= 1

    def atom(self) -> ExprAST:
        token = self.advance()
        if token.kind == "end":
            raise self.error("fim inesperado da expressão", token.offset)
        if token.kind == "op" and token.value == "-":
            with self.nested(token):
                return Negacao(self.expression(UNARY_MINUS_PREC), token.offset)
        if token.kind == "op" and token.value == "(":
            with self.nested(token):
                inner = self.expression(0)
            closing = self.advance()
            if closing.kind != "op" or closing.value != ")":
                raise self.error("esperado ')'", closing.offset)
            return inner
        if token.kind == "num":
            return Numero(int(token.value), token.offset)
        if token.kind == "name":
            if token.value == "i":
                return Imaginario(token.offset)
            return Nome(token.value, token.offset)
        raise self.error(f"operador inesperado '{token.value}'", token.offset)

    def exponent(self) -> int:
        token = self.advance()
        if token.kind == "op" and token.value == "-":
            raise NegativeExponentError("expoente negativo; escreva como divisão", self.text, token.offset)
        if token.kind != "num":
            raise self.error("o expoente deve ser um inteiro não negativo", token.offset)
        if int(token.value) > MAX_EXPONENT:
            raise self.error(f"expoente acima de {MAX_EXPONENT}", token.offset)
        return int(token.value)

    def expression(self, min_prec: int) -> ExprAST:
        lhs = self.atom()
        while True:
            token = self.peek()
            if token.kind in ("num", "name") or (token.kind == "op" and token.value == "("):
                raise self.error("multiplicação implícita não é permitida; use '*'", token.offset)
            if token.kind != "op" or token.value not in OPERATOR_PREC:
                return lhs
            op_prec = OPERATOR_PREC[token.value]
            if op_prec < min_prec:
                return lhs
            self.advance()
            if token.value == "^":
                lhs = Binaria("^", lhs, Numero(self.exponent(), token.offset), token.offset)
                if self.peek().kind == "op" and self.peek().value == "^":
                    raise self.error("potências encadeadas exigem parênteses", self.peek().offset)
                continue
            next_prec = op_prec + 1 if OPERATOR_ASSOC[token.value] == "left" else op_prec
            rhs = self.expression(next_prec)
            lhs = Binaria(token.value, lhs, rhs, token.offset)

    def parse(self) -> ExprAST:
        if self.peek().kind == "end":
            raise self.error("expressão vazia", 0)
        tree = self.expression(0)
        rest = self.peek()
        if rest.kind != "end":
            raise self.error(f"símbolo inesperado '{rest.value}'", rest.offset)
        return tree


def parse_ast(text: Union[str, bytes]) -> ExprAST:
    return _Parser(_as_text(text)).parse()


def _as_text(text: Union[str, bytes]) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode("utf-8")
        except UnicodeDecodeError as exc:
            valid = text[:exc.start].decode("utf-8")
            raise ExprSyntaxError("entrada não é UTF-8 válido", valid, len(valid)) from None
    return text


def _check_params(params: Iterable[str]) -> Tuple[str, ...]:
    names = tuple(params)
    for name in names:
        if name in RESERVED:
            raise ValueError(f"O parâmetro '{name}' é um nome reservado.")
        if not _IDENTIFIER.fullmatch(name):
            raise ValueError(f"Nome de parâmetro inválido: '{name}'")
    return names


_BINARY = {"+": operator.add, "-": operator.sub, "*": operator.mul, "/": operator.truediv}


def lower(node: ExprAST, variables: Tuple[str, ...], text: str = "") -> RatSymbol:
    """Converte a árvore em uma fração canônica sobre ``variables``.

    Percorre a árvore com pilha explícita; somas longas geram árvores profundas à esquerda.
    """
    values: List[RatSymbol] = []
    stack: List[Tuple[ExprAST, bool]] = [(node, False)]
    while stack:
        current, ready = stack.pop()
        if isinstance(current, Numero):
            values.append(RatSymbol.constant(current.value, variables))
        elif isinstance(current, Imaginario):
            values.append(RatSymbol.constant(IMAGINARY_UNIT, variables))
        elif isinstance(current, Nome):
            if current.name not in variables:
                raise UnknownSymbolError(f"símbolo desconhecido '{current.name}'", text, current.offset)
            values.append(RatSymbol.variable(current.name).lift(variables))
        elif isinstance(current, Negacao):
            if ready:
                values.append(-values.pop())
            else:
                stack.extend([(current, True), (current.operand, False)])
        elif current.op == "^":
            if ready:
                values.append(values.pop() ** current.rhs.value)
            else:
                stack.extend([(current, True), (current.lhs, False)])
        elif ready:
            rhs = values.pop()
            values.append(_BINARY[current.op](values.pop(), rhs))
        else:
            stack.extend([(current, True), (current.rhs, False), (current.lhs, False)])
    return values.pop()


def parse(text: Union[str, bytes], params: Sequence[str] = ()) -> RatSymbol:
    """Lê ``text`` como uma fração canônica nas variáveis (p, q, hbar, gamma, params)."""
    text = _as_text(text)
    variables = canonical_variables(_check_params(params))
    tree = _Parser(text).parse()
    result = lower(tree, variables, text)
    _logger.debug("expressão %r lida como %s", text, result)
    return result


# ----------------------------------------------------------------------------
# Impressão
# ----------------------------------------------------------------------------

def _display_order(variables: Sequence[str]) -> List[int]:
    """Parâmetros, hbar e gamma antes de p e q em cada termo."""
    params = [i for i, v in enumerate(variables) if v not in DISTINGUISHED]
    front = [variables.index(v) for v in (HBAR, GAMMA)]
    back = [variables.index(v) for v in ("p", "q")]
    return params + front + back


def _plain_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"({value.numerator}/{value.denominator})"


def _plain_coefficient(coeff: GaussianRational) -> Tuple[bool, str]:
    """(negativo, texto); texto vazio indica coeficiente unitário."""
    re_part, im_part = re_im(coeff)
    if im_part == 0:
        magnitude = abs(re_part)
        return re_part < 0, "" if magnitude == 1 else _plain_rational(magnitude)
    if re_part == 0:
        magnitude = abs(im_part)
        return im_part < 0, "i" if magnitude == 1 else f"{_plain_rational(magnitude)}*i"
    sign = " + " if im_part > 0 else " - "
    magnitude = abs(im_part)
    imag = "i" if magnitude == 1 else f"{magnitude}*i"
    return False, f"({re_part}{sign}{imag})"


def _plain_polynomial(terms, variables: Sequence[str]) -> str:
    if not terms:
        return "0"
    order = _display_order(variables)
    pieces = []
    for monom, coeff in terms:
        negative, text = _plain_coefficient(coeff)
        factors = []
        for i in order:
            e = monom[i]
            if e == 1:
                factors.append(variables[i])
            elif e > 1:
                factors.append(f"{variables[i]}^{e}")
        if factors:
            body = "*".join(([text] if text else []) + factors)
        else:
            body = text or "1"
        pieces.append((negative, body))
    first_negative, first_body = pieces[0]
    out = ("-" if first_negative else "") + first_body
    for negative, body in pieces[1:]:
        out += (" - " if negative else " + ") + body
    return out


def format_plain(f: RatSymbol) -> str:
    """Forma textual canônica; ``parse`` a lê de volta sem perda."""
    if f.den.is_constant:
        return _plain_polynomial(list(f.to_poly().terms.items()), f.variables)
    num_terms = list(f.num.terms.items())
    num = _plain_polynomial(num_terms, f.variables)
    if len(num_terms) > 1:
        num = f"({num})"
    den = _plain_polynomial(list(f.den.terms.items()), f.variables)
    return f"{num}/({den})"


_LATEX_NAMES = {HBAR: r"\hbar", GAMMA: r"\gamma"}


def latex_name(name: str) -> str:
    if name in _LATEX_NAMES:
        return _LATEX_NAMES[name]
    if "_" in name:
        head, _, tail = name.partition("_")
        return f"{latex_name(head)}_{{{tail}}}"
    if len(name) > 1:
        return rf"\mathrm{{{name}}}"
    return name


def _latex_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return rf"\frac{{{value.numerator}}}{{{value.denominator}}}"


def _latex_coefficient(coeff: GaussianRational) -> Tuple[bool, str]:
    re_part, im_part = re_im(coeff)
    if im_part == 0:
        magnitude = abs(re_part)
        return re_part < 0, "" if magnitude == 1 else _latex_rational(magnitude)
    if re_part == 0:
        magnitude = abs(im_part)
        return im_part < 0, "i" if magnitude == 1 else f"{_latex_rational(magnitude)} i"
    real = ("-" if re_part < 0 else "") + _latex_rational(abs(re_part))
    sign = " + " if im_part > 0 else " - "
    magnitude = abs(im_part)
    imag = "i" if magnitude == 1 else f"{_latex_rational(magnitude)} i"
    return False, rf"\left({real}{sign}{imag}\right)"


def _latex_polynomial(terms, variables: Sequence[str]) -> str:
    if not terms:
        return "0"
    # grau total crescente: 1 + \gamma p
    terms = sorted(terms, key=lambda kv: (sum(kv[0]), tuple(-e for e in kv[0])))
    order = _display_order(variables)
    pieces = []
    for monom, coeff in terms:
        negative, text = _latex_coefficient(coeff)
        factors = []
        for i in order:
            e = monom[i]
            if e == 1:
                factors.append(latex_name(variables[i]))
            elif e > 1:
                factors.append(f"{latex_name(variables[i])}^{{{e}}}")
        if factors:
            body = " ".join(([text] if text else []) + factors)
        else:
            body = text or "1"
        pieces.append((negative, body))
    first_negative, first_body = pieces[0]
    out = ("-" if first_negative else "") + first_body
    for negative, body in pieces[1:]:
        out += (" - " if negative else " + ") + body
    return out


def format_latex(f: RatSymbol) -> str:
    """Fragmento LaTeX para ambiente matemático."""
    if f.den.is_constant:
        return _latex_polynomial(list(f.to_poly().terms.items()), f.variables)
    num = _latex_polynomial(list(f.num.terms.items()), f.variables)
    den = _latex_polynomial(list(f.den.terms.items()), f.variables)
    return rf"\frac{{{num}}}{{{den}}}"


FORMATS = ("plain", "latex", "json")


def print_symbol(f: RatSymbol, fmt: str = "plain") -> str:
    if fmt == "plain":
        return format_plain(f)
    if fmt == "latex":
        return format_latex(f)
    if fmt == "json":
        return f.to_json()
    raise ValueError(f"Formato desconhecido: '{fmt}'")
