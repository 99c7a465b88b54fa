"""forcinglab: finite forcing posets, names, the forcing relation, Boolean
completions, generic filters, and the combinatorial searches built on them."""

from .completion import RegularOpenAlgebra, boolean_completion
from .errors import ForcingLabError, InputError, SizeCapError
from .forcing import (
    FORCES,
    FORCES_NEGATION,
    UNDECIDED,
    decide_name_value,
    decides,
    forces,
    forces_atomic,
    forces_set,
    oracle_forces,
    oracle_set,
    soundness_disagreements,
    truth_value,
)
from .formulas import (
    And,
    Eq,
    ExistsIn,
    ForallIn,
    Imp,
    Mem,
    Not,
    Or,
    parse_formula,
    print_formula,
)
from .generic import GenericRequest, build_generic, enumerate_ultrafilters, is_generic_for
from .names import (
    Name,
    check_name,
    generic_name,
    interpret,
    rank,
    validate_name,
    von_neumann,
)
from .poset import (
    ConditionFamily,
    Filter,
    Poset,
    compatible,
    extend_to_maximal_antichain,
    is_antichain,
    is_dense,
    is_exhaustive,
    is_filter,
    is_separative,
    leq,
    make_family,
    separative_quotient,
)

__all__ = [name for name in dir() if not name.startswith("_")]
