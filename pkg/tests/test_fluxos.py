from fractions import Fraction

import pytest

from core.algebra import GammaSeries, RatSymbol, series_expand, symbol
from core.erros import ResidualHbarPoleError
from core.estrela import check_canonical_pair
from core.fluxos import (
    FlowResult,
    compare_closed_form,
    compose_series,
    covariance_defect,
    flow,
    flow_invariant,
)
from core.operadores import DiffOperator, image_of_monomial

p, q, hbar, gamma = (symbol(n) for n in ("p", "q", "hbar", "gamma"))

S21 = image_of_monomial((2, 1))
ORDER = 8


def test_fluxo_de_p_e_geometrico():
    result = flow(S21, p, ORDER, sign=-1)
    assert result.series.coeffs[:3] == (p, -(p ** 2), p ** 3)
    assert compare_closed_form(result, p / (1 + gamma * p))
    assert result.hbar_free


def test_fluxo_de_q_termina():
    result = flow(S21, q, ORDER, sign=-1)
    assert compare_closed_form(result, q * (1 + gamma * p) ** 2)
    assert all(c.is_zero for c in result.series.coeffs[3:])


def test_sinal_inverte_o_fluxo():
    result = flow(S21, p, ORDER, sign=1)
    assert compare_closed_form(result, p / (1 - gamma * p))
    assert not compare_closed_form(result, p / (1 + gamma * p))


def test_invariante_do_fluxo():
    P = flow(S21, p, ORDER, sign=-1).series
    Q = flow(S21, q, ORDER, sign=-1).series
    assert flow_invariant(P, Q, (2, 1)).is_zero
    assert not flow_invariant(P, Q, (1, 1)).is_zero


def test_monomio_conservado_e_fixo():
    result = flow(S21, p ** 2 * q, 4)
    assert result.series == GammaSeries(4, [p ** 2 * q])


def test_defeito_de_covariancia():
    assert covariance_defect(S21, p, 4, sign=-1).is_zero
    assert covariance_defect(S21, p ** 2 * q, 4, sign=-1).is_zero
    defect = covariance_defect(S21, q ** 2, 3, sign=-1)
    assert defect.coeffs[0].is_zero and defect.coeffs[1].is_zero
    assert defect.coeffs[2] == hbar ** 2


def test_fluxo_de_q2_depende_de_hbar():
    result = flow(S21, q ** 2, 2, sign=-1)
    assert result.series.coeffs[2] == 6 * p ** 2 * q ** 2 + hbar ** 2
    assert not result.hbar_free


def test_composicao_de_series():
    P = series_expand(p / (1 + gamma * p), 5)
    Q = series_expand(q * (1 + gamma * p) ** 2, 5)
    assert compose_series(p ** 2 * q, P, Q) == GammaSeries(5, [p ** 2 * q])
    assert compose_series(1 / (1 + p), P, Q) == series_expand(1 / (1 + p / (1 + gamma * p)), 5)


def test_polo_residual_em_hbar():
    with pytest.raises(ResidualHbarPoleError):
        flow(DiffOperator.partial("q"), q, 2)


def test_parametros_invalidos():
    with pytest.raises(ValueError):
        flow(S21, p, -1)
    with pytest.raises(ValueError):
        flow(S21, p, 2, sign=2)


def test_ordem_zero_devolve_a_funcao():
    result = flow(S21, p * q, 0)
    assert result.series == GammaSeries(0, [p * q])
    assert isinstance(result, FlowResult)
    assert '"hbar_free": true' in result.to_json()


def _fluxo_em_duas_etapas(f, order, ratio):
    """Coeficientes de exp(γ'X) exp(γX) f com γ' = ratio·γ, agrupados por ordem total."""
    total = [RatSymbol.constant(0) for _ in range(order + 1)]
    for k, outer in enumerate(flow(S21, f, order, sign=-1).series.coeffs):
        for j, inner in enumerate(flow(S21, outer, order - k, sign=-1).series.coeffs):
            total[k + j] = total[k + j] + inner * ratio ** j
    return total


@pytest.mark.parametrize("f", [p, q, p * q])
@pytest.mark.parametrize("ratio", [Fraction(1), Fraction(1, 2), Fraction(-1)])
def test_lei_de_grupo_do_fluxo(f, ratio):
    direct = flow(S21, f, 5, sign=-1).series.coeffs
    composed = _fluxo_em_duas_etapas(f, 5, ratio)
    assert composed == [c * (1 + ratio) ** n for n, c in enumerate(direct)]


def test_fluxo_preserva_par_canonico():
    P = flow(S21, p, ORDER, sign=-1).series
    Q = flow(S21, q, ORDER, sign=-1).series
    report = check_canonical_pair(P, Q, k_max=2, gamma_order=ORDER)
    assert report.is_canonical
    assert report.poisson == GammaSeries(ORDER, [RatSymbol.constant(-1)])
