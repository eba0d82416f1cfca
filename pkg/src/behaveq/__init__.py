"""behaveq: behavioural equivalences, liftings, quotients, and modal
logics for finite systems with side effects, over exact arithmetic."""

from .core import (
    BitRel,
    CapExceeded,
    Carrier,
    DimensionMismatch,
    GfpResult,
    MalformedFunction,
    Rational,
    Semilattice,
    Subspace,
    echelonize,
    gfp,
    parse_subset_label,
    powerset_carrier,
    rel_pullback,
    subset_label,
    subspace_contains,
)
from .equivalence import (
    CondRel,
    CtsBisimResult,
    MachineEquiv,
    build_output_lts,
    cts_conditional_bisim,
    cts_slice_bisim_oracle,
    lwa_equiv,
    lwa_trace,
    lwa_unobservable_subspace,
    moore_equiv,
    moore_pair_oracle,
    nda_language_equiv,
    nda_pair_oracle,
    ready_output,
    refusal_output,
)
from .liftings import (
    LawReport,
    NdaStepTable,
    Step,
    STOP,
    check_lifting_laws,
    cts_box,
    cts_dist_law,
    cts_rel_lift,
    lwa_det_step,
    lwa_dist_law,
    lwa_modality,
    nda_det_step,
    nda_dist_law,
    nda_modality,
    nda_rel_lift,
)
from .logic import (
    CtsFormula,
    EquivReport,
    check_adequacy_expressivity,
    eval_cts,
    eval_word_nda,
    parse_cts_formula,
    parse_word,
    render_word,
    theory_word,
)
from .quotient import (
    BackwardDfa,
    ClosureViolation,
    RespectingAutomaton,
    backward_determinize,
    build_respecting_automaton,
    cts_quotient,
    redundant_members,
    respecting_subsets,
    verify_witness_homomorphism,
)
from .systems import (
    Cts,
    DeterminizedMachine,
    Lwa,
    Nda,
    OutputLts,
    forward_determinize,
    lwa_output,
    lwa_step,
    moore_determinize,
    validate,
)

__version__ = "0.1.0"
