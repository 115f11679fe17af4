"""A workbench for modal logics with memory, nominals and jumps: shared
syntax, Kripke-style semantics, first-order translations, simulation and
bisimulation engines with distinguishing formulas, comparison games, and
model analysis tools."""

from .errors import (
    BudgetExceededError,
    IllegalMoveError,
    InvariantViolationError,
    ModalkitError,
    ModelFormatError,
    OperatorNotInDialectError,
    ParseError,
    ShapeMismatchError,
    StateSpaceExceededError,
    UnassignedNominalError,
    UnboundVariableError,
    UnknownNameError,
    UnknownSymbolError,
    UnknownWorldError,
    UnsupportedFeaturesError,
)
from .syntax import (
    DIALECTS,
    And,
    At,
    Bottom,
    Box,
    DBox,
    DDiamond,
    Diamond,
    Erase,
    Forget,
    Formula,
    Iff,
    Implies,
    Known,
    LogicSpec,
    Nom,
    Not,
    Or,
    Prop,
    Remember,
    Signature,
    Top,
    formula_size,
    get_dialect,
    modal_depth,
    parse_formula,
    print_formula,
    validate_formula,
)
from .kripke import (
    GenParams,
    KripkeModel,
    PointedModel,
    SplitMix64,
    load_model,
    mem_add,
    mem_remove,
    mem_wipe,
    random_model,
    save_model,
)
from .semantics import EvalConfig, check, check_global, satisfying_set
from .fo import FOStructure, back_and_forth, fo_check, fo_print, quantifier_rank
from .translate import translate_formula, translate_model, untranslate_model
from .equivalence import (
    Config,
    SimConditions,
    SimulationOutcome,
    bisimilar,
    bml_partition_refinement,
    conditions_for,
    directed_conditions,
    serialize_witness,
    simulated_by,
    verify_relation,
)
from .enumeration import (
    EvalContext,
    JointPartition,
    enumerate_formulas,
    equivalent_up_to,
    joint_theories,
    separating_formula,
)
from .games import (
    ClosureMove,
    DuplicatorMove,
    Game,
    GameResult,
    GameState,
    SpoilerMove,
    format_transcript,
    solve_game,
)
from .analysis import (
    DefinabilityResult,
    ProbeReport,
    Universe,
    bounded_theory,
    definability_check,
    invariance_probe,
    load_universe,
    minimize,
    minimize_map,
)

__version__ = "0.1.0"
