# PSD acceptance: lambda_min >= -EPS_PSD * (1 + ||M||_inf)
EPS_PSD = 1e-9
EPS_MU = 1e-10
EPS_ZERO = 1e-14
RANGE_TOL = 1e-9
FEASIBILITY_TOL = 1e-10
CERTIFICATE_REL_TOL = 1e-12

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 60

MU_CAP = 1e12
MU_TOL = 1e-10
GOLDEN_MAX_ITER = 200
BISECTION_MAX_ITER = 200
TIE_BREAK_ITER = 80

SLATER_MARGIN = 1e-6
RICQ_MAX_EXPONENT = 60

RECOVERY_FEAS_TOL = 1e-8
RECOVERY_GAP_TOL = 1e-6

PRODUCT_BISECTION_ITER = 100
PRODUCT_BRACKET_DOUBLINGS = 60

ORACLE_RADII = (10.0, 100.0, 1000.0)
ORACLE_MAX_SWEEPS = 60
ORACLE_RESTORE_ATTEMPTS = 24
ORACLE_NEGATIVE_LEVEL = 1e-10
# consecutive drops across the radius ladder must grow at least this much
UNBOUNDED_GROWTH = 5.0

DUAL_FEASIBILITY_SCAN = 17
