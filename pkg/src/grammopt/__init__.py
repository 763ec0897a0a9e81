"""Grammar-shaped configuration search.

Component configuration spaces are written as labeled-BNF grammars
(or as constructor registries compiled to them) and explored by a
MIN-MAX ant system, grammatical evolution, and random search under
exact evaluation budgets.
"""

from .grammar import (
    DerivationTree,
    EnumerationLimitError,
    Grammar,
    GrammarError,
    GrammarIndex,
    GrammarSymbol,
    RewriteRule,
    TreeReport,
    enumerate_trees,
    format_bnf,
    min_depth,
    min_depth_tree,
    nonterminal,
    parse_bnf,
    productive_sorts,
    random_tree,
    rules_used,
    terminal,
    validate_tree,
)
from .semantics import (
    CountingObjective,
    EvaluationError,
    SemanticMap,
    SemanticValue,
    compose_objective,
    evaluate,
)
from .registry import (
    ComponentModule,
    ConstantEntry,
    ConstructorEntry,
    CreateResult,
    compile_grammar,
    create,
    greedy_instantiate,
)
from .heuristics import (
    GENE_DOMAIN,
    HEURISTIC_NAMES,
    Genotype,
    GrantParams,
    GrevoParams,
    PheromoneTable,
    SearchBudget,
    SearchResult,
    ant_construct,
    genotype_to_tree,
    grant,
    grevo,
    pheromone_select,
    random_search,
    run_heuristic,
)
from .benchmarks import CASE_NAMES, BenchmarkCase, get_case
from .harness import (
    ExperimentSpec,
    RunRecord,
    SummaryStats,
    derive_seed,
    emit_results,
    parse_results,
    rank_test,
    run_experiment,
    summarize,
)

__version__ = "0.1.0"
