"""Exact arithmetic for generalized quadratic forms over real quadratic fields."""

from .analysis import DeltaCertificate, ScaledTarget, delta_lower_bound, generalized_delta, unit_scale_down
from .constructions import (
    CounterexampleBundle,
    TheoremOutcome,
    build_counterexample,
    represent_indecomposable,
    twist,
    twist_and_square,
    twist_preimage,
    universal_subform_pipeline,
    verify_counterexample,
)
from .errors import (
    BudgetExceededError,
    ContractFailure,
    GenquadError,
    ParseError,
    PreconditionError,
)
from .field import (
    FieldContext,
    FieldElement,
    TotallyPositiveListing,
    enumerate_totally_positive,
    fundamental_unit,
    get_context,
    sqrt_element,
)
from .forms import (
    AssociatedForm,
    Atom,
    Definiteness,
    GeneralizedForm,
    QuadraticForm,
    associated_form,
    classify_definiteness,
    classify_generalized,
    direct_sum,
    is_quadratic,
    proper_variables,
    subform,
    subform_index_map,
)
from .parser import format_element, format_form, parse_element, parse_form
from .search import (
    BoundedStrategy,
    DefiniteStrategy,
    IndecomposableListing,
    RepresentationWitness,
    SearchVerdict,
    UniversalityReport,
    decompose,
    indecomposables_up_to,
    represent_bounded,
    represent_definite,
    universality_report,
)

__all__ = [
    "AssociatedForm",
    "Atom",
    "BoundedStrategy",
    "BudgetExceededError",
    "ContractFailure",
    "CounterexampleBundle",
    "DefiniteStrategy",
    "Definiteness",
    "DeltaCertificate",
    "FieldContext",
    "FieldElement",
    "GeneralizedForm",
    "GenquadError",
    "IndecomposableListing",
    "ParseError",
    "PreconditionError",
    "QuadraticForm",
    "RepresentationWitness",
    "ScaledTarget",
    "SearchVerdict",
    "TheoremOutcome",
    "TotallyPositiveListing",
    "UniversalityReport",
    "associated_form",
    "build_counterexample",
    "classify_definiteness",
    "classify_generalized",
    "decompose",
    "delta_lower_bound",
    "direct_sum",
    "enumerate_totally_positive",
    "format_element",
    "format_form",
    "fundamental_unit",
    "generalized_delta",
    "get_context",
    "indecomposables_up_to",
    "is_quadratic",
    "parse_element",
    "parse_form",
    "proper_variables",
    "represent_bounded",
    "represent_definite",
    "represent_indecomposable",
    "sqrt_element",
    "subform",
    "subform_index_map",
    "twist",
    "twist_and_square",
    "twist_preimage",
    "unit_scale_down",
    "universal_subform_pipeline",
    "universality_report",
    "verify_counterexample",
]

__version__ = "0.1.0"
