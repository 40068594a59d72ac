"""Abelian complexity automata for fixed points of Parikh-collinear morphisms.

The pipeline turns a (possibly erasing) Parikh-collinear morphism f that is
prolongable on a letter a into a deterministic finite automaton with output
computing the abelian complexity of the fixed point, entirely through base-k
automata for the eigenvalue k of f, and verifies every stage against
brute-force oracles.
"""

from .abelian import (
    ComplexityDescription,
    DifferenceProfile,
    PipelineConfig,
    PipelineReport,
    PrefixCountRelation,
    abelian_dfao,
    attainable_vectors,
    attained_difference_set,
    decide_ultimate_periodicity,
    describe_sequence,
    factor_count_relation,
    is_aperiodic,
    is_ultimately_periodic,
    run_pipeline,
)
from .automata import Automaton, Dfao, builtin_relation, combine, project_exists
from .cutting import CutEnumeration, cut_automaton, enumerate_cuts, ne_pr_relations
from .errors import (
    AbelcompError,
    ClassificationError,
    InconclusiveError,
    InputError,
    OracleMismatchError,
    ParseError,
    ResourceLimitError,
)
from .logic import Environment, compile_formula, decide, parse_formula, witness
from .morphisms import Alphabet, LetterPartition, Morphism, Word, parikh
from .recog import (
    BoundReport,
    RecognizabilityCertificate,
    bound_K_f,
    bound_linear_recurrence,
    bound_recognizability,
    certify_recognizability,
    factors_of_length,
    power_free_check,
    return_words,
)
from .uniform import UniformPresentation, dfao_of_word, minimize_presentation, uniformize

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "Automaton",
    "AbelcompError",
    "BoundReport",
    "ClassificationError",
    "ComplexityDescription",
    "CutEnumeration",
    "Dfao",
    "DifferenceProfile",
    "Environment",
    "InconclusiveError",
    "InputError",
    "LetterPartition",
    "Morphism",
    "OracleMismatchError",
    "ParseError",
    "PipelineConfig",
    "PipelineReport",
    "PrefixCountRelation",
    "RecognizabilityCertificate",
    "ResourceLimitError",
    "UniformPresentation",
    "Word",
    "abelian_dfao",
    "attainable_vectors",
    "attained_difference_set",
    "bound_K_f",
    "bound_linear_recurrence",
    "bound_recognizability",
    "builtin_relation",
    "certify_recognizability",
    "combine",
    "compile_formula",
    "cut_automaton",
    "decide",
    "decide_ultimate_periodicity",
    "describe_sequence",
    "dfao_of_word",
    "enumerate_cuts",
    "factor_count_relation",
    "factors_of_length",
    "is_aperiodic",
    "is_ultimately_periodic",
    "minimize_presentation",
    "ne_pr_relations",
    "parikh",
    "parse_formula",
    "power_free_check",
    "project_exists",
    "return_words",
    "run_pipeline",
    "uniformize",
    "witness",
]
