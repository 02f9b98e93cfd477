"""Bilateral parking procedures on the integer line: deterministic and
probabilistic rules, exhaustive enumeration and cyclic-orbit audits,
exact-rational parking probabilities, and the labeled binary-forest
encoding of runs."""

from .words import (
    Block,
    CyclicOrbit,
    SpotSet,
    Word,
    as_word,
    block_of,
    blocks,
    cyclic_orbit,
    iter_shuffles,
    multinomial,
    orbit_representative,
    rotate,
    shift,
    shuffle_count,
)
from .procedures import (
    DirTable,
    Direction,
    FlagReport,
    Procedure,
    RunResult,
    builtin,
    check_flags,
    dir_of,
    dir_of_set,
    index_rule_procedure,
    is_parking,
    last_spot,
    load_dir_table,
    outcome,
    parse_proc_spec,
    run,
    table_procedure,
)
from .enumeration import (
    CapExceededError,
    OrbitReport,
    StrictTableError,
    UniversalityReport,
    check_universal,
    count_parking,
    count_words_to_set,
    expected_parking_count,
    orbit_audit,
)
from .probabilistic import (
    INFINITY,
    AbelianReport,
    Measure,
    ProbProcedure,
    UniquenessReport,
    abelian_uniqueness_check,
    from_procedure,
    is_abelian,
    kw_procedure,
    kw_sequence_procedure,
    measure,
    orbit_parking_mass,
    parking_probability,
    parse_prob_spec,
    parse_q,
    pq_procedure,
    pq_right_prob,
    q_integer,
    right_prob_table,
    total_parking_mass,
)
from .forests import (
    ForestPair,
    GoodnessReport,
    IndexedForest,
    Tree,
    decreasing_labelings_count,
    decreasing_tree,
    encode,
    fiber_count,
    fiber_counts_brute,
    is_good_correspondence,
    iter_decreasing_labelings,
    iter_tree_shapes,
    label_set,
    pair_from_json,
    pair_to_json,
    project,
    shape_count,
    total_displacement,
    weighted_pairs,
    word_of_pair,
)
from .colored import (
    ColoredLetter,
    ColoredProcedure,
    Language,
    LanguageClosureError,
    UndefinedRuleError,
    colored_lbs_procedure,
    colored_orbit_audit,
    colored_run,
    colored_word,
    distinct_letters_language,
)

__version__ = "0.1.0"
