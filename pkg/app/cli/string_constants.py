SOLVE_COMMAND = "solve"
SLEMMA_COMMAND = "slemma"
ASSUMPTIONS_COMMAND = "assumptions"
ORACLE_COMPARE_COMMAND = "oracle-compare"
CERTIFY_COMMAND = "certify"

KIND_OPTION = "--kind"
SEED_OPTION = "--seed"
BUDGET_OPTION = "--budget"
JSON_OPTION = "--json"

EXIT_OK = 0
EXIT_CERTIFICATE_REJECTED = 1
EXIT_PARSE_ERROR = 2
EXIT_PRECONDITION = 3
EXIT_NUMERICAL_FAILURE = 4
