"""Hierarquia de erros do cálculo simbólico.

Todos os erros de domínio derivam de ``ErroCalculo`` (um ``ValueError``) e
carregam em ``code`` o nome estável usado nos diagnósticos da linha de comando.
"""


class ErroCalculo(ValueError):
    code = "DomainError"

    def diagnostic(self) -> str:
        return f"{self.code}: {self}"


# Álgebra
class ZeroDenominatorError(ErroCalculo):
    code = "ZeroDenominator"


class NotGammaAdicUnitError(ErroCalculo):
    code = "NotGammaAdicUnit"


class IncompatibleSymbolsError(ErroCalculo):
    code = "IncompatibleSymbols"


# Parser
class ExprSyntaxError(ErroCalculo):
    """Erro de leitura; ``offset`` conta bytes UTF-8, ``line`` e ``column`` contam caracteres."""

    code = "SyntaxError"

    def __init__(self, message: str, text: str = "", position: int = 0):
        self.message = message
        self.position = position
        before = text[:position]
        self.offset = len(before.encode("utf-8", "surrogatepass"))
        self.line = before.count("\n") + 1
        self.column = position - (before.rfind("\n") + 1) + 1
        super().__init__(f"{self.line}:{self.column}: {message}")


class UnknownSymbolError(ExprSyntaxError):
    code = "UnknownSymbol"


class NegativeExponentError(ExprSyntaxError):
    code = "NegativeExponent"


# Produto estrela e colchetes
class NonTerminatingSeriesError(ErroCalculo):
    code = "NonTerminatingSeries"


class HbarDependentInputError(ErroCalculo):
    code = "HbarDependentInput"


# Fluxos
class ResidualHbarPoleError(ErroCalculo):
    code = "ResidualHbarPole"


# Funções geradoras
class NotCanonicalError(ErroCalculo):
    code = "NotCanonical"


class SingularDenominatorError(ErroCalculo):
    code = "SingularDenominator"


class ExactnessFailureError(ErroCalculo):
    code = "ExactnessFailure"


class NonPolynomialAntiderivativeError(ErroCalculo):
    code = "NonPolynomialAntiderivative"


class HbarDependentTError(ErroCalculo):
    code = "HbarDependentT"


class TracePlusTwoSingularError(ErroCalculo):
    code = "TracePlusTwoSingular"


class UnsupportedExponentDegreeError(ErroCalculo):
    code = "UnsupportedExponentDegree"


class UnsupportedIntegrandError(ErroCalculo):
    code = "UnsupportedIntegrand"


class HbarResidueError(ErroCalculo):
    code = "HbarResidue"
