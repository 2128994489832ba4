import json

import pytest

from core.expressao import parse
from core.geradoras import sl2_T
from main import (
    COMMANDS,
    EXIT_DOMAIN,
    EXIT_OK,
    EXIT_USAGE,
    SCHEMA_VERSION,
    UsageError,
    main,
    parse_generator,
    run,
)

GAMMA_PAIR = ["--P", "p/(1+gamma*p)", "--Q", "q*(1+gamma*p)^2"]
LINEAR = ["--P", "p", "--Q", "q+a*p^2", "--params", "a"]
SL2 = ["--P", "a*p+b*q", "--Q", "c*p+d*q", "--det", "a,b,c,d"]


def test_produto_estrela(capsys):
    assert main(["star", "--lhs", "p", "--rhs", "q"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "star = p*q - (1/2)*i*hbar"


def test_colchetes():
    assert run(["bracket", "--lhs", "q", "--rhs", "p", "--kind", "poisson"]).lines == ["poisson = 1"]
    assert run(["bracket", "--lhs", "p", "--rhs", "q"]).lines == ["moyal = -i*hbar"]


def test_verifica_par_gama():
    result = run(["verify-ct", *GAMMA_PAIR, "--order", "8"])
    assert result.exit_code == EXIT_OK
    assert result.lines[0] == "poisson = -1 + O(gamma^9)"
    assert result.lines[-1] == "is_canonical = true"
    assert result.payload["is_canonical"] is True


def test_fluxo_com_forma_fechada():
    result = run(["flow", "--generator", "2,1:1", "--f", "p", "--sign", "-1",
                  "--order", "8", "--closed", "p/(1+gamma*p)"])
    assert result.exit_code == EXIT_OK
    assert "hbar_free = true" in result.lines
    assert "matches_closed_form = true" in result.lines
    assert result.lines[0].startswith("flow = p + (-p^2)*gamma^1 + (p^3)*gamma^2")
    assert result.lines[0].endswith("O(gamma^9)")


def test_ordenacao():
    result = run(["ordering", "--word", "pq", "--monomial", "2,1"])
    assert result.lines[:2] == ["word_symbol = p*q - (1/2)*i*hbar", "symmetrized = p*q"]
    assert result.lines[2].startswith("operator = ")
    assert len(result.payload["operator"]["value"]) == 3


def test_funcao_geradora_do_potencial_linear():
    result = run(["genfun", *LINEAR])
    assert result.exit_code == EXIT_OK
    assert result.lines[0] == "T = -(1/6)*a*p^3"
    assert result.lines[1] == "u = exp(-i*a*p^3/(3*hbar))"
    assert "residuals_zero = true" in result.lines
    assert result.payload["hbar_independent"] is True
    assert result.payload["covariance_conditions"] is True


def test_nucleo_misto_do_potencial_linear():
    result = run(["kernel", *LINEAR, "--kind", "mixed"])
    assert result.exit_code == EXIT_OK
    assert "F3" in result.payload
    assert result.lines[-1] == "classical_check = true"


def test_nucleo_sl2_simbolico():
    result = run(["kernel", *SL2])
    assert result.exit_code == EXIT_OK
    assert result.lines[0].startswith("kernel[position] = sqrt(1/(c))*exp(-i*pi/4)*(2*pi*hbar)^(-1/2)*exp(")
    assert result.lines[-1] == "classical_check = true"


def test_nucleo_com_delta_nao_tem_funcao_geradora():
    result = run(["kernel", "--P", "p", "--Q", "q"])
    assert result.exit_code == EXIT_OK
    assert "delta(" in result.lines[0]
    assert "classical_check" not in result.payload


def test_saida_json(capsys):
    assert main(["star", "--lhs", "p", "--rhs", "q", "--format", "json"]) == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["schema"] == SCHEMA_VERSION
    assert data["status"] == "ok"
    assert data["command"] == "star"
    assert data["payload"]["star"]["text"] == "p*q - (1/2)*i*hbar"
    assert data["diagnostics"] == []


def test_formato_latex():
    result = run(["star", "--lhs", "p", "--rhs", "q", "--format", "latex"])
    assert result.lines == [r"star = -\frac{1}{2} i \hbar + p q"]


@pytest.mark.parametrize("argv, code", [
    (["genfun", "--P=-p", "--Q=-q"], "SingularDenominator"),
    (["genfun", "--P", "2*p", "--Q", "q"], "NotCanonical"),
    (["star", "--lhs", "p +", "--rhs", "q"], "SyntaxError"),
    (["star", "--lhs", "p", "--rhs", "x"], "UnknownSymbol"),
    (["verify-ct", "--P", "p+hbar", "--Q", "q"], "HbarDependentInput"),
    (["kernel", *LINEAR, "--kind", "position"], "UnsupportedExponentDegree"),
    (["genfun", "--P", "p/(1+gamma*p)", "--Q", "q*(1+gamma*p)^2"], "ExactnessFailure"),
    (["star", "--lhs", "(" * 5000 + "p" + ")" * 5000, "--rhs", "q"], "SyntaxError"),
])
def test_erros_de_dominio(argv, code, capsys):
    assert main(argv) == EXIT_DOMAIN
    captured = capsys.readouterr()
    assert captured.out == ""
    assert captured.err.startswith(f"{code}:")


@pytest.mark.parametrize("argv", [
    [],
    ["desconhecido"],
    ["star", "--lhs", "p"],
    ["flow", "--generator", "2,1", "--f", "p"],
    ["flow", "--generator", "2,1:1", "--f", "p", "--sign", "2"],
    ["ordering"],
    ["ordering", "--monomial", "2"],
    ["star", "--lhs", "p", "--rhs", "q", "--format", "xml"],
    ["star", "--lhs", "p", "--rhs", "q", "--order", "-1"],
    ["verify-ct", "--P", "p", "--Q", "q", "--k-max", "-1"],
    ["star", "--lhs", "p", "--rhs", "q", "--params", "hbar"],
    ["genfun", "--P", "p", "--Q", "q", "--det", "a,b"],
    ["ordering", "--word", "pxq"],
])
def test_erros_de_uso(argv):
    result = run(argv)
    assert result.exit_code == EXIT_USAGE
    assert result.status == "error"
    assert result.diagnostics[0].startswith("UsageError:")


def test_erro_em_json_nao_tem_payload(capsys):
    assert main(["genfun", "--P", "2*p", "--Q", "q", "--format", "json"]) == EXIT_DOMAIN
    data = json.loads(capsys.readouterr().out)
    assert data["status"] == "error"
    assert data["payload"] == {}
    assert data["diagnostics"][0].startswith("NotCanonical:")


def test_ajuda():
    result = run(["--help"])
    assert result.exit_code == EXIT_OK
    assert result.fmt == "help"


def test_gerador_textual():
    A = parse_generator("2,1:1; 0,2:a; 2,1:1/2", ["a"])
    assert sorted(A.coeffs) == [(0, 2), (2, 1)]
    with pytest.raises(UsageError):
        parse_generator(";", [])
    with pytest.raises(UsageError):
        parse_generator("a,1:1", [])


def test_genfun_sl2_numerico():
    result = run(["genfun", "--P", "2*p+q", "--Q", "p+q"])
    assert result.exit_code == EXIT_OK
    assert parse(result.payload["T"]["text"]) == sl2_T(((2, 1), (1, 1)))
    assert "residuals_zero = true" in result.lines


def test_falha_interna_vira_diagnostico(monkeypatch, capsys):
    def quebra(args, result):
        raise RuntimeError("estado inesperado")

    monkeypatch.setitem(COMMANDS, "star", quebra)
    assert main(["star", "--lhs", "p", "--rhs", "q"]) == EXIT_DOMAIN
    captured = capsys.readouterr()
    assert captured.err.strip() == "InternalError: RuntimeError: estado inesperado"
    assert "Traceback" not in captured.err
