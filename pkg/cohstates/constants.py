# =========================
# Configuración / Constantes
# =========================
import math

APP_TITLE = "cohstates"
VERSION = "1.0.0"

# Bases (etiquetas de FockVector)
BASIS_TRUNC = "TRUNC"
BASIS_SUSY_ISO = "SUSY_ISO"
BASIS_SUSY_NEW = "SUSY_NEW"
BASIS_FULL_HO = "FULL_HO"
SUSY_BASES = (BASIS_SUSY_ISO, BASIS_SUSY_NEW)

# Familias de estados coherentes
FAMILY_L_MINUS = "L_MINUS"
FAMILY_DISPLACEMENT = "DISPLACEMENT"
FAMILY_LIN_L_MINUS = "LIN_L_MINUS"
FAMILY_LIN_DISPLACEMENT = "LIN_DISPLACEMENT"
FAMILY_DL_ISO = "DL_ISO"
FAMILY_DL_NEW = "DL_NEW"
TRUNC_FAMILIES = (FAMILY_L_MINUS, FAMILY_DISPLACEMENT,
                  FAMILY_LIN_L_MINUS, FAMILY_LIN_DISPLACEMENT)
SUSY_FAMILIES = (FAMILY_DL_ISO, FAMILY_DL_NEW)
EIGEN_FAMILIES = (FAMILY_L_MINUS, FAMILY_LIN_L_MINUS)

# Medidas
MU_TRUNC = "MU_TRUNC"
MU_TRUNC_CORRECTED = "MU_TRUNC_CORRECTED"
MU_ISO = "MU_ISO"
MU_NEW = "MU_NEW"

# Direcciones de escalera
LOWER = "lower"
RAISE = "raise"

# Subespacios SUSY
ISO = "ISO"
NEW = "NEW"

# Tipos de tabla y origen
KIND_X = "X"
KIND_X2 = "X2"
KIND_P = "P"
KIND_P2 = "P2"
KINDS = (KIND_X, KIND_X2, KIND_P, KIND_P2)
SOURCE_CLOSED_FORM = "CLOSED_FORM"
SOURCE_QUADRATURE = "QUADRATURE"

# Reglas de cuadratura
RULE_GAUSS = "GAUSS"
RULE_ADAPTIVE = "ADAPTIVE"
RULE_COMPOSITE = "COMPOSITE"

# Modelos
MODEL_TRUNC = "TRUNC"
MODEL_SUSY_Q4 = "SUSY_Q4"

# Comandos CLI
CMD_DENSITY = "density"
CMD_UNCERTAINTY = "uncertainty"
CMD_ENTROPY = "entropy"
CMD_VALIDATE = "validate"
CMD_POTENTIAL = "potential"
COMMANDS = (CMD_DENSITY, CMD_UNCERTAINTY, CMD_ENTROPY, CMD_VALIDATE, CMD_POTENTIAL)

# Códigos de salida
EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_INTERRUPT = 130

# =========================
# Funciones especiales
# =========================
SERIES_TOLERANCE = 1e-15
MAX_TERMS = 1000
MELLIN_NODES = 2048
MELLIN_HALF_RANGE = 60.0
MELLIN_TAIL_TOL = 1e-12

# Cuadratura en la semirrecta
GAUSS_DEGREE = 200
GAUSS_PANEL_WIDTH = 0.2
GAUSS_PANEL_NODES = 24
GAUSS_SUPPORT = 40.0
# regla compuesta de referencia para los autochequeos
REFERENCE_PANEL_WIDTH = 0.1
REFERENCE_PANEL_NODES = 32
ADAPTIVE_EPSREL = 1e-10
ADAPTIVE_LIMIT = 400
RULE_SELF_CHECK_TOL = 1e-10

# =========================
# Oscilador truncado
# =========================
BASIS_TRUNCATION = 64
MIN_TRUNCATION = 8
AMPLITUDE_TAIL_TOL = 1e-12
NORM_TOL = 1e-10
GRID_X_MIN = 1e-3
GRID_X_MAX = 12.0
GRID_POINTS = 2400

# Radio de convergencia de D_l(z) para f = g = 2k(2k+1)
TRUNC_DISPLACEMENT_RADIUS = 0.5
LIN_ALPHA = 2.0

# Chequeos de resolución de la identidad
R_MAX = 40.0
R_MAX_TRUNC = 80.0
TAIL_TOL = 1e-8
MOMENT_LOG_CUTOFF = 60.0

# =========================
# Observables
# =========================
UNCERTAINTY_TERMS = 30
CLOSED_FORM_CHECK_MAX = 8
CLOSED_FORM_TOL = 1e-8

# =========================
# Modelo SUSY q = 4
# =========================
Q4_EPSILONS = (-5.5, -4.5, -3.5, -2.5)
# [DERIVED] recuperados por ajuste del potencial de Wronski (susy.recover_nu)
Q4_NUS = (math.inf, 0.0, math.inf, 0.0)
Q4_NEW_ENERGIES = (-4.5, -2.5)
ISO_GROUND = 1.5
WRONSKIAN_CHECK_GRID = (0.1, 6.0, 60)
RESIDUAL_TOL = 1e-6
FIT_TOL = 1e-14

# =========================
# Entrelazamiento
# =========================
ENTROPY_TERMS = 20
ENTROPY_CUTOFF = 64
ENTROPY_CUTOFF_FACTOR = 1.5
ENTROPY_CONVERGENCE_TOL = 5e-3
BCH_MAX_BLOCK = 16
GRAM_PSD_TOL = 1e-10
EXPANSION_TOL = 1e-6
# corte creciente para estados SUSY cuya expansión no converge a 64
ENTROPY_CUTOFF_STEP = 16
ENTROPY_CUTOFF_MAX = 128
DEFAULT_THETA = math.pi / 2
DEFAULT_PHI = 0.0

# CLI
DEFAULT_Z_MIN = 0.0
DEFAULT_Z_MAX = 2.0
DEFAULT_Z_STEPS = 11
DEFAULT_OUT = "salida.csv"

# Reporte de validate
STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_SKIPPED = "skipped"
STATUS_EXPECTED = "expected"
EIGEN_TOL = 1e-10
ORTHO_TOL = 1e-8
OVERLAP_TOL = 1e-10
BCH_TOL = 1e-8
HOM_TOL = 1e-12
UNCERTAINTY_SLACK = 5e-3
FLATNESS_BAND = 0.15
NEW_ENTROPY_BAND = 0.2
