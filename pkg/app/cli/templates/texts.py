from app.exceptions import ParseError, PreconditionViolation

############
#  Solve   #
############
route_line = "route: {route} ({description})"
value_line = "value: {value}"
x_star_line = "x*: {x_star}"
x_star_missing = "x*: not recovered"
dual_line = (
    "dual: {status}, mu* = {mu_star}, psd interval [{lo}, {hi}]{capped}, "
    "hard case: {hard_case}"
)
gap_line = "gap: {gap_note}"
product_line = "product reformulation value: {value}"
diagnostic_line = "diagnostic: {diagnostic}"
boundary_ambiguous_note = "warning: data within the Slater margin of a bound"
certificates_header = "certificates:"
no_certificates = "certificates: none"
notes_header = "notes:"
seed_line = "seed: {seed}"

###############
# Assumptions #
###############
assumptions_header = "assumptions:"
item_line = "  {name} ({title}): {verdict} - {note}"
item_titles = {
    "item1": "B != 0",
    "item2": "feasible",
    "item3": "RICQ",
    "item4": "bounded below",
    "item5": "dual feasible",
}

##################
#  Certificates  #
##################
multiplier_text = "multiplier mu={mu} (mu+={mu_plus}, mu-={mu_minus}) level={level}"
exception_text = "exception nu={nu} (lambda_min {matrix_min_eig})"
counterexample_text = "counterexample x={x} f={f_value} h={h_value}"
infeasible_text = "infeasible primal"
unbounded_ray_text = "unbounded below along {direction} from {point}"
unbounded_evidence_text = "unbounded below, {count} escalating feasible points"

##########
# Slemma #
##########
slemma_verdict_line = "{verdict} {summary}"
slemma_case_line = "case: {case}"

##########
# Oracle #
##########
oracle_compare_header = "solver vs oracle"
oracle_row = "  {name:<8}{value}"
oracle_gap_line = "  gap     abs {absolute} rel {relative}"
oracle_unavailable = "  oracle  no feasible start found"
oracle_suspected = "  oracle suspects the objective is unbounded below"

###########
# Certify #
###########
certificate_accepted = "certificate {kind}: valid"
certificate_rejected = "certificate {kind}: rejected"


###########
#  Error  #
###########
def show_parse_error(exception: ParseError) -> str:
    return f"parse error: {exception}"


def show_precondition_violation(exception: PreconditionViolation) -> str:
    return f"{exception}"


def show_numerical_failure(exception: Exception) -> str:
    return f"numerical failure: {exception}"
