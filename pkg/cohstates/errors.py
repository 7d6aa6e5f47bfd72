# =========================
# Errores del paquete
# =========================


class CohStatesError(Exception):
    """Raíz de todos los errores de cohstates."""


class ConfigError(CohStatesError):
    """Configuración inválida (código de salida 2)."""


class NumericalError(CohStatesError):
    """Fallo numérico (código de salida 3)."""


class ContractError(CohStatesError):
    """Llamada fuera del contrato de una operación."""


# --------- Numéricos ----------
class DivergenceError(NumericalError):
    pass


class PoleError(NumericalError):
    pass


class GammaPole(PoleError):
    pass


class ContourError(NumericalError):
    pass


class NonConvergence(NumericalError):
    pass


QuadratureNonConvergence = NonConvergence


class NotNormalizable(NumericalError):
    pass


class TruncationTooSmall(NumericalError):
    pass


class TailTooFat(NumericalError):
    pass


class SingularWronskian(NumericalError):
    def __init__(self, x, detail=""):
        self.x = float(x)
        msg = f"Wronskiano singular cerca de x = {self.x:.6g}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class CutoffExceeded(NumericalError):
    pass


class ExpansionResidualTooLarge(NumericalError):
    pass


class GramNotPSD(NumericalError):
    pass


# --------- Contrato ----------
class BasisMismatch(ContractError):
    pass


class FamilyMismatch(ContractError):
    pass


class IndexOutOfRange(ContractError):
    pass


class UnsupportedBasis(ContractError):
    pass


class UnsupportedModel(ContractError):
    pass
