"""Search for more reliable input variants.

Three strategies share this module: an evolutionary search over transform
lineages with the validity score as fitness, greedy decoding constrained to
grammatically viable prefixes, and a window-revision decoder that re-decodes
low-confidence windows and keeps the better variant.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

from .adapters.base import Adapter
from .adapters.generator import END
from .errors import (
    AdapterError, ConfigError, MissingCapability, NoViableToken, ParseError,
)
from .metrics import GenerationResult, ProbVector
from .minilang import Program, parse_tokens, token_from_text
from .scoring import Scorer
from .transforms import (
    PROMPT_KINDS, PromptText, TransformSite, apply_transform,
    enumerate_applicable, nl_perturb,
)
from .validator import ValidatorConfig


@dataclass(frozen=True)
class Candidate:
    """An input variant: the payload, the transform lineage that produced it
    (with the per-step seeds needed to replay it), and its fitness V.

    fitness None means not yet evaluated.  flagged marks a degenerate search
    that could not mutate the input at all.
    """
    payload: Program | PromptText
    lineage: tuple[TransformSite, ...] = ()
    seeds: tuple[int, ...] = ()
    fitness: float | None = None
    flagged: bool = False

    def __post_init__(self):
        if len(self.lineage) != len(self.seeds):
            raise ConfigError("lineage and seeds must have equal length")

    def describe(self) -> str:
        if not self.lineage:
            return "original"
        return " + ".join(site.ident() for site in self.lineage)


@dataclass(frozen=True)
class GenerationStats:
    """Fitness summary of one evaluated generation."""
    generation: int
    best: float
    mean: float
    worst: float
    best_so_far: float


@dataclass(frozen=True)
class SearchConfig:
    population: int = 8
    generations: int = 5
    elites: int = 2
    mutations: int = 1
    seed: int = 0
    eval_budget: int | None = None

    def __post_init__(self):
        if self.elites < 1 or self.population < self.elites:
            raise ConfigError("need population >= elites >= 1")
        if self.generations < 1:
            raise ConfigError("need at least one generation")
        if self.mutations < 1:
            raise ConfigError("need at least one mutation per child")
        if self.eval_budget is not None and self.eval_budget < 1:
            raise ConfigError("evaluation budget must be positive")


# --- lineage machinery -------------------------------------------------------

def apply_step(payload, site: TransformSite, seed: int):
    if isinstance(payload, Program):
        return apply_transform(payload, site, seed)
    return nl_perturb(payload, site.kind, seed)


def replay_lineage(original, lineage, seeds):
    """Reproduce a candidate payload from the untouched input."""
    payload = original
    for site, seed in zip(lineage, seeds):
        payload = apply_step(payload, site, seed)
    return payload


def _mutation_sites(payload):
    if isinstance(payload, Program):
        return enumerate_applicable(payload)
    return tuple(TransformSite(kind, ()) for kind in PROMPT_KINDS)


def _mutate(parent: Candidate, rng: random.Random, mutations: int) -> Candidate | None:
    payload, lineage, seeds = parent.payload, parent.lineage, parent.seeds
    for _ in range(mutations):
        sites = _mutation_sites(payload)
        if not sites:
            return None
        site = sites[rng.randrange(len(sites))]
        seed = rng.randrange(1 << 32)
        payload = apply_step(payload, site, seed)
        lineage = lineage + (site,)
        seeds = seeds + (seed,)
    return Candidate(payload, lineage, seeds)


def _site_key(site: TransformSite):
    return (site.kind, site.path, -1 if site.index is None else site.index)


def _candidate_key(c: Candidate):
    # Fitness first, then shortest lineage, then a stable lexicographic id.
    return (-c.fitness, len(c.lineage),
            tuple(_site_key(s) for s in c.lineage), c.seeds)


def _stats(generation: int, population, best_so_far: float) -> GenerationStats:
    fits = [c.fitness for c in population]
    return GenerationStats(generation, max(fits),
                           math.fsum(fits) / len(fits), min(fits),
                           best_so_far)


def evolve(input_payload, adapter: Adapter, validator_cfg: ValidatorConfig,
           search_cfg: SearchConfig | None = None, *,
           scorer: Scorer | None = None):
    """Evolutionary search; returns (best Candidate, per-generation stats).

    Generation 0 is the original plus population-1 single-parent mutants; the
    original is always retained among generation-0 elites, so the winner is
    never worse than it.  Fully deterministic for a given seed.
    """
    cfg = search_cfg or SearchConfig()
    if isinstance(input_payload, str) and not isinstance(input_payload, PromptText):
        input_payload = PromptText(input_payload)
    scorer = scorer or Scorer(adapter, validator_cfg, seed=cfg.seed)

    evals = 0

    def evaluated(candidate: Candidate) -> Candidate:
        nonlocal evals
        evals += 1
        try:
            v = scorer.validity(candidate.payload).v
        except AdapterError as exc:
            raise AdapterError(
                f"fitness evaluation failed on {candidate.describe()}: {exc}",
                code=exc.code) from exc
        return replace(candidate, fitness=v)

    def budget_left() -> bool:
        return cfg.eval_budget is None or evals < cfg.eval_budget

    original = evaluated(Candidate(input_payload))
    best_so_far = original.fitness

    if not _mutation_sites(input_payload):
        stats = _stats(0, [original], best_so_far)
        return replace(original, flagged=True), [stats]

    population = [original]
    for slot in range(cfg.population - 1):
        rng = random.Random(f"evolve:{cfg.seed}:0:{slot}")
        child = _mutate(original, rng, cfg.mutations)
        if child is not None and budget_left():
            population.append(evaluated(child))
    population.sort(key=_candidate_key)

    elites = population[:cfg.elites]
    if all(c.lineage for c in elites):
        elites = sorted(elites[:-1] + [original], key=_candidate_key)
    best_so_far = max(best_so_far, population[0].fitness)
    history = [_stats(0, population, best_so_far)]

    for gen in range(1, cfg.generations):
        if not budget_left():
            break
        fresh = []
        for slot in range(cfg.population - len(elites)):
            rng = random.Random(f"evolve:{cfg.seed}:{gen}:{slot}")
            parent = elites[rng.randrange(len(elites))]
            child = _mutate(parent, rng, cfg.mutations)
            if child is not None and budget_left():
                fresh.append(evaluated(child))
        population = sorted(elites + fresh, key=_candidate_key)
        elites = population[:cfg.elites]
        best_so_far = max(best_so_far, population[0].fitness)
        history.append(_stats(gen, population, best_so_far))

    return elites[0], history


# --- constrained decoding ----------------------------------------------------

def _vocab_tokens(vocabulary):
    """Pre-lex each vocabulary entry; None marks entries the grammar can
    never accept (including the end marker, which is handled separately)."""
    toks = []
    for text in vocabulary:
        if text == END:
            toks.append(None)
            continue
        try:
            toks.append(token_from_text(text))
        except ValueError:
            toks.append(None)
    return toks


def _parses(toks) -> bool:
    try:
        parse_tokens(list(toks))
        return True
    except ParseError:
        return False


def _viable(toks) -> bool:
    # Same rule as prefix_viable, applied to an already-lexed stream.
    try:
        parse_tokens(list(toks))
        return True
    except ParseError as exc:
        return exc.index >= len(toks)


def _draw(rng: random.Random, probs, temperature: float) -> int:
    if temperature != 1.0:
        scaled = [p ** (1.0 / temperature) if p > 0.0 else 0.0 for p in probs]
        total = math.fsum(scaled)
        probs = [p / total for p in scaled]
    target = rng.random()
    acc = 0.0
    for i, p in enumerate(probs):
        acc += p
        if target < acc:
            return i
    return len(probs) - 1


class _DecodeState:
    """Mutable prefix state shared by the decoders."""

    def __init__(self, adapter: Adapter):
        caps = adapter.capabilities()
        if not caps.supports("step"):
            raise MissingCapability("adapter exposes no per-step distributions")
        if not caps.vocabulary:
            raise MissingCapability("adapter declares an empty vocabulary")
        self.adapter = adapter
        self.vocab = caps.vocabulary
        self.lexed = _vocab_tokens(caps.vocabulary)
        self.end_index = (caps.vocabulary.index(END)
                          if END in caps.vocabulary else -1)
        self.texts: list[str] = []
        self.toks: list = []
        self.complete = False

    def clone(self) -> "_DecodeState":
        twin = object.__new__(_DecodeState)
        twin.adapter, twin.vocab = self.adapter, self.vocab
        twin.lexed, twin.end_index = self.lexed, self.end_index
        twin.texts, twin.toks = list(self.texts), list(self.toks)
        twin.complete = self.complete
        return twin

    def masked_distribution(self) -> list[float]:
        dist = self.adapter.step(list(self.texts))
        masked = []
        for i, p in enumerate(dist.probs):
            if i == self.end_index:
                ok = self.complete
            else:
                tok = self.lexed[i]
                ok = tok is not None and _viable(self.toks + [tok])
            masked.append(p if ok else 0.0)
        total = math.fsum(masked)
        if total <= 0.0:
            raise NoViableToken("no vocabulary token keeps the prefix viable")
        return [p / total for p in masked]

    def push(self, index: int, renorm) -> tuple[str, float, ProbVector]:
        text = self.vocab[index]
        self.texts.append(text)
        self.toks.append(self.lexed[index])
        self.complete = _parses(self.toks)
        return text, math.log(renorm[index]), ProbVector(tuple(renorm))


def _argmax(probs) -> int:
    return max(range(len(probs)), key=lambda i: (probs[i], -i))


def constrained_decode(adapter: Adapter, max_len: int = 160, seed: int = 0, *,
                       mode: str = "greedy",
                       temperature: float = 1.0) -> GenerationResult:
    """Decode keeping every prefix grammatically viable.

    Each step masks tokens that no completion could follow, renormalizes, and
    takes the argmax (ties to the lower vocabulary index); the end marker is
    only ever unmasked once the prefix parses as a complete program.  With
    mode="sample" the masked distribution is sampled instead, seeded for
    reproducibility.
    """
    if mode not in ("greedy", "sample"):
        raise ConfigError(f"unknown decode mode {mode!r}")
    state = _DecodeState(adapter)
    rng = random.Random(f"cdecode:{seed}")
    tokens, logprobs, dists = [], [], []
    ended = False
    while len(tokens) < max_len:
        renorm = state.masked_distribution()
        if mode == "greedy":
            choice = _argmax(renorm)
        else:
            choice = _draw(rng, renorm, temperature)
        if choice == state.end_index:
            ended = True
            break
        text, lp, dist = state.push(choice, renorm)
        tokens.append(text)
        logprobs.append(lp)
        dists.append(dist)
    return GenerationResult(tokens, logprobs, dists, complete=ended)


def _mean(logprobs) -> float:
    if not logprobs:
        return float("-inf")
    return math.fsum(logprobs) / len(logprobs)


def _decode_window(state: _DecodeState, budget: int, first_rank: int):
    """Greedy-decode up to budget tokens from a copy of state.

    first_rank selects which viable token starts the window (0 = argmax,
    1 = runner-up).  Returns None when the requested rank does not exist;
    otherwise (tokens, logprobs, dists, ended, new_state)."""
    twin = state.clone()
    tokens, logprobs, dists = [], [], []
    ended = False
    for position in range(budget):
        renorm = twin.masked_distribution()
        if position == 0 and first_rank > 0:
            ranked = sorted((i for i in range(len(renorm)) if renorm[i] > 0.0),
                            key=lambda i: (-renorm[i], i))
            if len(ranked) <= first_rank:
                return None
            choice = ranked[first_rank]
        else:
            choice = _argmax(renorm)
        if choice == twin.end_index:
            ended = True
            break
        text, lp, dist = twin.push(choice, renorm)
        tokens.append(text)
        logprobs.append(lp)
        dists.append(dist)
    return tokens, logprobs, dists, ended, twin


def revise_decode(adapter: Adapter, window: int = 8,
                  logprob_floor: float = -3.0, max_len: int = 160,
                  seed: int = 0) -> GenerationResult:
    """Constrained greedy decoding with one-shot window revision.

    Decodes in windows of `window` tokens; when a window's mean token
    logprob lands below the floor, that window is re-decoded once starting
    from the second-ranked viable token and the better-scoring variant is
    kept.  The final output is additionally compared against the plain
    constrained decode, so its mean logprob is never worse.
    """
    if window < 1:
        raise ConfigError("window must be at least 1")
    plain = constrained_decode(adapter, max_len, seed)

    state = _DecodeState(adapter)
    tokens, logprobs, dists = [], [], []
    ended = False
    while len(tokens) < max_len and not ended:
        budget = min(window, max_len - len(tokens))
        attempt = _decode_window(state, budget, 0)
        w_tokens, w_lps, w_dists, w_ended, w_state = attempt
        if w_tokens and _mean(w_lps) < logprob_floor:
            retry = _decode_window(state, budget, 1)
            if retry is not None and _mean(retry[1]) > _mean(w_lps):
                w_tokens, w_lps, w_dists, w_ended, w_state = retry
        tokens.extend(w_tokens)
        logprobs.extend(w_lps)
        dists.extend(w_dists)
        ended = w_ended
        state = w_state
        if not w_tokens and not w_ended:
            break
    revised = GenerationResult(tokens, logprobs, dists, complete=ended)

    if _mean(revised.logprobs) > _mean(plain.logprobs):
        return revised
    return plain
