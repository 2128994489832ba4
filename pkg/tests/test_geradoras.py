import pytest

from core.algebra import IMAGINARY_UNIT, RatSymbol, symbol
from core.erros import (
    ExactnessFailureError,
    HbarDependentInputError,
    HbarDependentTError,
    NonPolynomialAntiderivativeError,
    NotCanonicalError,
    SingularDenominatorError,
    TracePlusTwoSingularError,
)
from core.fluxos import compare_closed_form, flow
from core.geradoras import (
    SL2_NUMERIC,
    CanonicalPair,
    DeterminantRelation,
    _normalize_constant,
    build_u,
    covariance_condition_check,
    ct_catalog,
    gradient_T,
    hbar_independence_check,
    integrate_gradient,
    lagrange_bracket,
    sl2_T,
    sl2_u,
    star_eigen_residuals,
    trace_plus_two,
)
from core.operadores import image_of_monomial

p, q, hbar = symbol("p"), symbol("q"), symbol("hbar")
a, b, c, d = (symbol(n) for n in "abcd")
i = RatSymbol.constant(IMAGINARY_UNIT)

LINEAR = CanonicalPair(p, q + a * p ** 2, name="potencial_linear")
MATRIX = [[a, b], [c, d]]


def _zero(pair) -> bool:
    return all(r.is_zero for r in pair)


# Relação de determinante ---------------------------------------------------------

def test_relacao_elimina_d():
    relation = DeterminantRelation()
    assert relation.reduce(a * d - b * c) == 1
    assert relation.reduce(None) is None
    assert relation.secondary().reduce(a * d - b * c) == 1
    assert relation.secondary().eliminate == "a"


def test_relacao_a_partir_de_texto():
    relation = DeterminantRelation.from_text("a, b, c, d")
    assert relation.names == ("a", "b", "c", "d")
    with pytest.raises(ValueError):
        DeterminantRelation.from_text("a,b,c")
    with pytest.raises(ValueError):
        DeterminantRelation(eliminate="b")


# Par canônico --------------------------------------------------------------------

def test_par_exige_independencia_de_hbar():
    with pytest.raises(HbarDependentInputError):
        CanonicalPair(p + hbar * q, q)


def test_par_nao_canonico():
    ct = CanonicalPair(2 * p, q)
    assert not ct.is_canonical()
    with pytest.raises(NotCanonicalError):
        ct.require_canonical()


def test_colchete_de_lagrange():
    assert lagrange_bracket(LINEAR) == 1
    symbolic = CanonicalPair.from_matrix(MATRIX, DeterminantRelation())
    assert symbolic.is_canonical()
    assert lagrange_bracket(symbolic) == 1


def test_par_json():
    ct = CanonicalPair.from_matrix(MATRIX, DeterminantRelation(), "sl2")
    again = CanonicalPair.from_json(ct.to_json())
    assert again.P == ct.P and again.Q == ct.Q
    assert again.relation == ct.relation


# Sistema de gradiente -------------------------------------------------------------

def test_gradiente_do_potencial_linear():
    assert gradient_T(LINEAR) == (-a * p ** 2 / 2, RatSymbol.constant(0))
    T = integrate_gradient(*gradient_T(LINEAR))
    assert T == -a * p ** 3 / 6
    assert hbar_independence_check(T)


def test_u_do_potencial_linear():
    u = build_u(-a * p ** 3 / 6)
    assert u.exponent == -i * a * p ** 3 / (3 * hbar)
    assert _zero(star_eigen_residuals(u, LINEAR))
    assert covariance_condition_check(u, LINEAR)


@pytest.mark.parametrize("g", SL2_NUMERIC)
def test_gradiente_linear_reproduz_sl2(g):
    ct = CanonicalPair.from_matrix(g)
    assert integrate_gradient(*gradient_T(ct)) == sl2_T(g)
    assert _zero(star_eigen_residuals(sl2_u(g), ct))


def test_sl2_simbolico():
    relation = DeterminantRelation()
    ct = CanonicalPair.from_matrix(MATRIX, relation)
    T = integrate_gradient(*gradient_T(ct))
    assert T == relation.reduce(sl2_T(MATRIX))
    u = sl2_u(MATRIX, relation)
    assert _zero(star_eigen_residuals(u, ct))
    assert relation.secondary().reduce(sl2_T(MATRIX)).free_of("a")


def test_sl2_exemplo_numerico():
    assert sl2_T(((2, 1), (1, 1))) == (q ** 2 - p ** 2 + p * q) / 5


def test_rotacao():
    u = sl2_u(((0, -1), (1, 0)))
    assert u.exponent == -i * (p ** 2 + q ** 2) / hbar
    assert u.prefactor.rational_part == 1
    assert u.prefactor.radicand == 2


def test_identidade_da_u_unitaria():
    u = sl2_u(((1, 0), (0, 1)))
    assert u == 1


def test_traco_menos_dois():
    g = ((-1, 0), (0, -1))
    with pytest.raises(TracePlusTwoSingularError):
        sl2_T(g)
    ct = CanonicalPair.from_matrix(g)
    assert trace_plus_two(ct).is_zero
    with pytest.raises(SingularDenominatorError):
        gradient_T(ct)


def test_falha_de_exatidao():
    with pytest.raises(ExactnessFailureError):
        integrate_gradient(q, 0)


def test_primitiva_fora_das_fracoes():
    with pytest.raises(NonPolynomialAntiderivativeError):
        integrate_gradient(1 / (1 + p), 0)


def test_t_com_hbar():
    with pytest.raises(HbarDependentTError):
        build_u(hbar * p)


def test_primitiva_do_potencial_linear():
    assert integrate_gradient(-a * p ** 2 / 2, 0) == -a * p ** 3 / 6
    assert integrate_gradient(0, 0) == 0


def test_constante_quando_origem_e_singular():
    assert _normalize_constant((p + 5 * q) / q) == p / q
    assert _normalize_constant(p ** 2 / 6 + 3) == p ** 2 / 6
    assert integrate_gradient(1 / q, -p / q ** 2) == p / q


# Covariância -----------------------------------------------------------------------

@pytest.mark.parametrize("g", SL2_NUMERIC)
def test_covariancia_sl2_numerico(g):
    assert covariance_condition_check(sl2_u(g), CanonicalPair.from_matrix(g))


def test_covariancia_sl2_simbolico():
    relation = DeterminantRelation()
    ct = CanonicalPair.from_matrix(MATRIX, relation)
    assert covariance_condition_check(sl2_u(MATRIX, relation), ct)


# Catálogo --------------------------------------------------------------------------

GRADIENTES = [ct for ct in ct_catalog() if ct.name != "fluxo_gamma"]


@pytest.mark.parametrize("ct", GRADIENTES, ids=lambda ct: ct.name)
def test_catalogo_independe_de_hbar(ct):
    gp, gq = gradient_T(ct)
    assert gq.diff("p") == gp.diff("q")
    T = integrate_gradient(gp, gq)
    assert hbar_independence_check(T)
    assert T.diff("p") == gp and T.diff("q") == gq


@pytest.mark.parametrize("ct", GRADIENTES, ids=lambda ct: ct.name)
def test_fechamento_do_pipeline(ct):
    T = integrate_gradient(*gradient_T(ct))
    assert _zero(star_eigen_residuals(build_u(T), ct))


def test_par_do_fluxo_nao_e_gradiente():
    ct = next(ct for ct in ct_catalog() if ct.name == "fluxo_gamma")
    assert ct.is_canonical()
    with pytest.raises(ExactnessFailureError):
        integrate_gradient(*gradient_T(ct))


def test_par_do_fluxo_independe_de_hbar_pelo_fluxo():
    S21 = image_of_monomial((2, 1))
    P = flow(S21, p, 8, sign=-1)
    Q = flow(S21, q, 8, sign=-1)
    assert P.hbar_free and Q.hbar_free
    ct = next(ct for ct in ct_catalog() if ct.name == "fluxo_gamma")
    assert compare_closed_form(P, ct.P) and compare_closed_form(Q, ct.Q)
