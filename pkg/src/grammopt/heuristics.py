"""Search heuristics over derivation trees.

Three strategies share one budget contract: `grant`, a MIN-MAX ant
system with a hard pheromone floor and a soft, fitness-raised ceiling;
`grevo`, grammatical evolution with fixed-length integer genotypes; and
plain random search. All are deterministic given their random stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from random import Random
from typing import Callable, Sequence

import numpy as np

from .grammar import (
    DerivationTree,
    Grammar,
    GrammarError,
    GrammarIndex,
    random_tree,
    rules_used,
)

Objective = Callable[[DerivationTree], float]

#: Gene values are sampled from [0, GENE_DOMAIN); selection reduces them
#: modulo the number of applicable rules, so the domain just has to be
#: comfortably larger than any realistic rule count.
GENE_DOMAIN = 1 << 16


@dataclass
class SearchBudget:
    """Hard cap on objective invocations; search halts when used == max."""

    max_evaluations: int
    used: int = 0

    def __post_init__(self) -> None:
        if self.max_evaluations < 1:
            raise ValueError("budget must allow at least one evaluation")
        if not 0 <= self.used <= self.max_evaluations:
            raise ValueError("used evaluations out of range")

    @property
    def exhausted(self) -> bool:
        return self.used >= self.max_evaluations

    @property
    def remaining(self) -> int:
        return self.max_evaluations - self.used

    def spend(self) -> None:
        if self.exhausted:
            raise RuntimeError("evaluation budget exhausted")
        self.used += 1


@dataclass(frozen=True)
class Genotype:
    genes: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "genes", tuple(self.genes))
        if any(g < 0 for g in self.genes):
            raise ValueError("genes must be non-negative integers")

    def __len__(self) -> int:
        return len(self.genes)


@dataclass(frozen=True)
class SearchResult:
    best_tree: DerivationTree
    best_fitness: float
    evaluations_used: int
    history: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class GrantParams:
    tau_min: float = 0.2
    tau_init: float = 1.0
    rho: float = 0.1
    #: Fraction of the budget after which the best-so-far tree deposits
    #: instead of the iteration's ant (standard MIN-MAX intensification).
    elite_switch: float = 0.8
    depth_cap: int | None = None


@dataclass(frozen=True)
class GrevoParams:
    population_size: int | None = None
    generations: int | None = None
    genotype_length: int = 64
    crossover_prob: float = 0.9
    mutation_prob: float | None = None  # defaults to 1/genotype_length
    tournament_size: int = 2
    depth_cap: int | None = None


class PheromoneTable:
    """Per-rule pheromone levels bounded below by tau_min and above by a
    soft maximum that only ever moves up (when a fitness exceeds it)."""

    def __init__(self, grammar: Grammar, tau_min: float = 0.01, tau_init: float = 1.0):
        if tau_min <= 0:
            raise ValueError("tau_min must be positive")
        if tau_init < tau_min:
            raise ValueError("tau_init must be at least tau_min")
        self.grammar = grammar
        self.tau_min = float(tau_min)
        self.tau_max = float(tau_init)
        self._position = {r.label: i for i, r in enumerate(grammar.rules)}
        self._levels = np.full(len(grammar.rules), float(tau_init))

    def level(self, label: str) -> float:
        return float(self._levels[self._position[label]])

    @property
    def levels(self) -> dict[str, float]:
        values = self._levels.tolist()
        return {label: values[i] for label, i in self._position.items()}

    def evaporate(self, rho: float) -> None:
        self._levels *= 1.0 - rho
        np.maximum(self._levels, self.tau_min, out=self._levels)

    def add(self, label: str, amount: float) -> None:
        self._levels[self._position[label]] += amount

    def raise_ceiling(self, fitness: float) -> None:
        if fitness > self.tau_max:
            self.tau_max = float(fitness)

    def clamp(self) -> None:
        np.clip(self._levels, self.tau_min, self.tau_max, out=self._levels)

    def bounds_ok(self, tolerance: float = 1e-9) -> bool:
        lv = self._levels
        return bool(
            (lv >= self.tau_min - tolerance).all() and (lv <= self.tau_max + tolerance).all()
        )

    def choose(self, positions: np.ndarray, rng: Random) -> int:
        """Pheromone-proportional draw; returns an offset into `positions`."""
        weights = self._levels.take(positions)
        total = float(weights.sum())
        r = rng.random() * total
        n = int(positions.size)
        if n <= 16:
            acc = 0.0
            for offset, w in enumerate(weights.tolist()):
                acc += w
                if r < acc:
                    return offset
            return n - 1
        cumulative = np.cumsum(weights)
        offset = int(np.searchsorted(cumulative, r, side="right"))
        return offset if offset < n else n - 1


def pheromone_select(table: PheromoneTable, candidates: Sequence[str], rng: Random) -> str:
    """Select a label with probability proportional to its pheromone level."""
    if not candidates:
        raise ValueError("no candidate rules to select from")
    if len(candidates) == 1:
        return candidates[0]
    try:
        positions = np.asarray([table._position[c] for c in candidates], dtype=np.int64)
    except KeyError as exc:
        raise ValueError(f"unknown rule label {exc.args[0]!r}") from None
    return candidates[table.choose(positions, rng)]


def ant_construct(
    grammar: Grammar,
    sort: str,
    table: PheromoneTable,
    depth_cap: int,
    rng: Random,
    *,
    _index: GrammarIndex | None = None,
    _positions: dict[str, np.ndarray] | None = None,
) -> DerivationTree:
    """Depth-first tree construction with pheromone-proportional choices.

    At the depth frontier candidates shrink to the rules that can still
    finish within the cap, which guarantees termination.
    """
    idx = _index or GrammarIndex(grammar)
    idx.check_sort(sort, depth_cap)
    pos_arrays = _positions
    if pos_arrays is None:
        pos_arrays = {
            s: np.asarray(p, dtype=np.int64) for s, p in idx.full_positions.items()
        }

    def build(s: str, remaining: int) -> DerivationTree:
        if remaining >= idx.max_rule_depth[s]:
            rules = idx.full_rules[s]
            positions = pos_arrays[s]
        else:
            rules = idx.feasible(s, remaining)
            positions = np.asarray([idx.position[r.label] for r in rules], dtype=np.int64)
        rule = rules[0] if len(rules) == 1 else rules[table.choose(positions, rng)]
        return DerivationTree(rule.label, tuple(build(c, remaining - 1) for c in rule.child_sorts))

    return build(sort, depth_cap)


def grant(
    grammar: Grammar,
    objective: Objective,
    budget: SearchBudget,
    params: GrantParams | None = None,
    rng: Random | None = None,
    *,
    on_iteration: Callable[[PheromoneTable], None] | None = None,
) -> SearchResult:
    """MIN-MAX ant system: one ant per iteration builds a tree, all levels
    evaporate toward the floor, a deposit adds the depositing tree's
    fitness to each of its rule occurrences, and the soft ceiling rises
    whenever a fitness exceeds it.

    During the first `elite_switch` fraction of the budget the iteration's
    own ant deposits; after that the best-so-far tree does. Negative or
    sentinel fitness is never deposited.
    """
    p = params or GrantParams()
    rng = rng or Random(0)
    idx = GrammarIndex(grammar)
    start = grammar.start
    cap = p.depth_cap if p.depth_cap is not None else None
    if not idx.is_productive(start):
        raise GrammarError(f"start sort {start!r} is unproductive")
    if cap is None:
        cap = idx.default_depth_cap(start)
    idx.check_sort(start, cap)
    table = PheromoneTable(grammar, tau_min=p.tau_min, tau_init=p.tau_init)
    pos_arrays = {s: np.asarray(v, dtype=np.int64) for s, v in idx.full_positions.items()}
    switch_point = p.elite_switch * budget.max_evaluations

    best_tree: DerivationTree | None = None
    best_fitness = float("-inf")
    history: list[tuple[int, float]] = []
    while not budget.exhausted:
        tree = ant_construct(
            grammar, start, table, cap, rng, _index=idx, _positions=pos_arrays
        )
        budget.spend()
        fitness = objective(tree)
        if best_tree is None or fitness > best_fitness:
            best_tree, best_fitness = tree, fitness
            history.append((budget.used, fitness))
        table.evaporate(p.rho)
        if budget.used <= switch_point:
            deposit_fitness, deposit_tree = fitness, tree
        else:
            deposit_fitness, deposit_tree = best_fitness, best_tree
        deposit = max(deposit_fitness, 0.0)
        if deposit > 0.0:
            for label, count in rules_used(deposit_tree).items():
                table.add(label, deposit * count)
        table.raise_ceiling(deposit_fitness)
        table.clamp()
        if on_iteration is not None:
            on_iteration(table)
    assert best_tree is not None
    return SearchResult(best_tree, best_fitness, budget.used, tuple(history))


def genotype_to_tree(
    grammar: Grammar,
    genotype: Genotype,
    sort: str,
    depth_cap: int,
    *,
    _index: GrammarIndex | None = None,
) -> DerivationTree:
    """Total genotype-to-tree mapping.

    Genes are consumed in depth-first order; at a node with k applicable
    rules the gene selects index gene mod k in declaration order. Reading
    wraps over the genotype once; beyond the wrap, or at the depth
    frontier, selection falls back to the first minimal-depth rule.
    """
    idx = _index or GrammarIndex(grammar)
    idx.check_sort(sort, depth_cap)
    genes = genotype.genes
    limit = 2 * len(genes)
    cursor = 0

    def build(s: str, remaining: int) -> DerivationTree:
        nonlocal cursor
        if remaining <= idx.min_depth[s] or cursor >= limit:
            rule = idx.first_minimal(s)
        else:
            rules = idx.feasible(s, remaining)
            if len(rules) == 1:
                rule = rules[0]
            else:
                rule = rules[genes[cursor % len(genes)] % len(rules)]
                cursor += 1
        return DerivationTree(rule.label, tuple(build(c, remaining - 1) for c in rule.child_sorts))

    return build(sort, depth_cap)


def default_grevo_dimensions(max_evaluations: int) -> tuple[int, int]:
    """Population and generation counts whose product fits the budget."""
    population = min(100, max(2, max_evaluations // 10))
    generations = max(1, max_evaluations // population)
    return population, generations


def grevo(
    grammar: Grammar,
    objective: Objective,
    budget: SearchBudget,
    params: GrevoParams | None = None,
    rng: Random | None = None,
) -> SearchResult:
    """Generational GA on genotypes: tournament selection, one-point
    crossover, per-gene uniform-reset mutation, elitism of one.

    Consumes exactly population_size * generations evaluations.
    """
    p = params or GrevoParams()
    rng = rng or Random(0)
    pop_size, generations = p.population_size, p.generations
    if pop_size is None or generations is None:
        default_pop, default_gens = default_grevo_dimensions(budget.max_evaluations)
        pop_size = pop_size if pop_size is not None else default_pop
        generations = generations if generations is not None else default_gens
    if pop_size < 2:
        raise ValueError("population size must be at least 2")
    if generations < 1:
        raise ValueError("generation count must be at least 1")
    if pop_size * generations > budget.max_evaluations:
        raise ValueError(
            f"population {pop_size} x generations {generations} exceeds "
            f"budget {budget.max_evaluations}"
        )
    length = p.genotype_length
    if length < 1:
        raise ValueError("genotype length must be at least 1")
    mutation_prob = p.mutation_prob if p.mutation_prob is not None else 1.0 / length

    idx = GrammarIndex(grammar)
    start = grammar.start
    if not idx.is_productive(start):
        raise GrammarError(f"start sort {start!r} is unproductive")
    cap = p.depth_cap if p.depth_cap is not None else idx.default_depth_cap(start)
    idx.check_sort(start, cap)

    def random_genotype() -> Genotype:
        return Genotype(tuple(rng.randrange(GENE_DOMAIN) for _ in range(length)))

    def tournament(fitnesses: list[float]) -> int:
        best = rng.randrange(pop_size)
        for _ in range(p.tournament_size - 1):
            contender = rng.randrange(pop_size)
            if fitnesses[contender] > fitnesses[best]:
                best = contender
        return best

    def crossover(a: Genotype, b: Genotype) -> tuple[Genotype, Genotype]:
        if length >= 2 and rng.random() < p.crossover_prob:
            cut = rng.randrange(1, length)
            return (
                Genotype(a.genes[:cut] + b.genes[cut:]),
                Genotype(b.genes[:cut] + a.genes[cut:]),
            )
        return a, b

    def mutate(geno: Genotype) -> Genotype:
        return Genotype(
            tuple(
                rng.randrange(GENE_DOMAIN) if rng.random() < mutation_prob else g
                for g in geno.genes
            )
        )

    population = [random_genotype() for _ in range(pop_size)]
    best_tree: DerivationTree | None = None
    best_fitness = float("-inf")
    history: list[tuple[int, float]] = []
    for generation in range(generations):
        fitnesses: list[float] = []
        for geno in population:
            tree = genotype_to_tree(grammar, geno, start, cap, _index=idx)
            budget.spend()
            fitness = objective(tree)
            fitnesses.append(fitness)
            if best_tree is None or fitness > best_fitness:
                best_tree, best_fitness = tree, fitness
                history.append((budget.used, fitness))
        if generation == generations - 1:
            break
        elite = 0
        for i in range(1, pop_size):
            if fitnesses[i] > fitnesses[elite]:
                elite = i
        offspring = [population[elite]]
        while len(offspring) < pop_size:
            first = population[tournament(fitnesses)]
            second = population[tournament(fitnesses)]
            child_a, child_b = crossover(first, second)
            offspring.append(mutate(child_a))
            if len(offspring) < pop_size:
                offspring.append(mutate(child_b))
        population = offspring
    assert best_tree is not None
    return SearchResult(best_tree, best_fitness, budget.used, tuple(history))


def random_search(
    grammar: Grammar,
    objective: Objective,
    budget: SearchBudget,
    depth_cap: int | None = None,
    rng: Random | None = None,
) -> SearchResult:
    """Budget-many independent samples; best kept."""
    rng = rng or Random(0)
    idx = GrammarIndex(grammar)
    start = grammar.start
    if not idx.is_productive(start):
        raise GrammarError(f"start sort {start!r} is unproductive")
    cap = depth_cap if depth_cap is not None else idx.default_depth_cap(start)
    idx.check_sort(start, cap)

    best_tree: DerivationTree | None = None
    best_fitness = float("-inf")
    history: list[tuple[int, float]] = []
    while not budget.exhausted:
        tree = random_tree(grammar, start, cap, rng, _index=idx)
        budget.spend()
        fitness = objective(tree)
        if best_tree is None or fitness > best_fitness:
            best_tree, best_fitness = tree, fitness
            history.append((budget.used, fitness))
    assert best_tree is not None
    return SearchResult(best_tree, best_fitness, budget.used, tuple(history))


HEURISTIC_NAMES = ("grant", "grevo", "random")


def run_heuristic(
    name: str,
    grammar: Grammar,
    objective: Objective,
    budget: SearchBudget,
    rng: Random,
    *,
    grant_params: GrantParams | None = None,
    grevo_params: GrevoParams | None = None,
    depth_cap: int | None = None,
) -> SearchResult:
    """Dispatch by heuristic name with per-heuristic parameter bundles."""
    if name == "grant":
        params = grant_params or GrantParams()
        if depth_cap is not None and params.depth_cap is None:
            params = GrantParams(params.tau_min, params.tau_init, params.rho, depth_cap)
        return grant(grammar, objective, budget, params, rng)
    if name == "grevo":
        params = grevo_params or GrevoParams()
        if depth_cap is not None and params.depth_cap is None:
            params = GrevoParams(
                params.population_size,
                params.generations,
                params.genotype_length,
                params.crossover_prob,
                params.mutation_prob,
                params.tournament_size,
                depth_cap,
            )
        return grevo(grammar, objective, budget, params, rng)
    if name == "random":
        return random_search(grammar, objective, budget, depth_cap, rng)
    raise ValueError(f"unknown heuristic {name!r}")
