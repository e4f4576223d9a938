"""Deterministic synthetic multi-source championship corpora.

Every round each source publishes one document (linear, synchronous
emission). Sentences are realized from per-type cue words that no other
type uses, so a bag-of-words classifier can separate the types perfectly
when no noise is applied. Slot values are realized through the argument
filling rules (NE spans, keyword and degree tokens), which keeps gold
messages recoverable by construction.

Noise channels draw from their own seeded streams and consume the same
number of draws whatever their probability, so raising one probability only
ever adds corrupted items on top of the ones a lower setting corrupted.
"""
from __future__ import annotations

import random
import string
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .argfill import RuleSet
from .corpus import (AnnotatedSentence, Corpus, Document, GoldAnnotation, NESpan,
                     gold_messages, make_corpus)
from .errors import CorpusError
from .ontology import Ontology
from .relations import RelationConfig, brute_force_relations
from .schema import (DEGREE, NONE_TYPE, TIMESPAN, Message, SchemaRegistry,
                     validate_message)

CUES = {
    "absent": ("absent", "missing", "unavailable"),
    "behavior": ("behavior", "conduct", "attitude"),
    "block": ("blocked", "save", "denied"),
    "card": ("booked", "cautioned", "shown"),
    "change": ("substituted", "replaced", "bench"),
    "comeback": ("comeback", "recovered", "deficit"),
    "conditions": ("pitch", "weather", "rain"),
    "expectations": ("expected", "expectations", "predicted"),
    "final_score": ("final", "score", "ended"),
    "foul": ("foul", "tackle", "tripped"),
    "goal_cancelation": ("disallowed", "offside", "cancelled"),
    "hope_for": ("hopes", "hoping", "aspire"),
    "injured": ("injured", "injury", "hamstring"),
    "opportunity_lost": ("missed", "chance", "wasted"),
    "penalty": ("penalty", "spot", "kick"),
    "performance": ("performance", "performed", "display"),
    "refereeship": ("refereeing", "whistle", "officiating"),
    "satisfaction": ("satisfied", "pleased", "content"),
    "scorer": ("scored", "goal", "netted"),
    "successive_victories": ("consecutive", "streak", "unbeaten"),
    "superior": ("superior", "dominated", "outclassed"),
    "system_selection": ("formation", "lineup", "tactics"),
    "win": ("won", "victory", "beat"),
}
FILLER = ("stadium", "tickets", "sold", "anniversary", "club", "museum", "sponsor",
          "broadcast", "president", "season", "crowd", "coverage")
CONNECTORS = ("the", "was", "in", "of", "with", "a")
DEGREE_VALUES = (0, 25, 40, 50, 60, 75, 90, 100)
FOCUS_TEAM = "PAOK"
STAR_PLAYER = "Nalitzis"


@dataclass(frozen=True)
class NoiseConfig:
    drop_ne: float = 0.0
    wrong_label: float = 0.0
    drop_sentence: float = 0.0


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    rounds: int = 30
    sources: object = 3  # a count, or explicit source names
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    emission: str = "linear"
    first_round: int = 1
    report_probability: float = 0.85
    type_probability: float = 0.35

    def __post_init__(self):
        if self.rounds < 1:
            raise CorpusError("rounds must be >= 1")
        if self.first_round < 0:
            raise CorpusError("first_round must be >= 0")
        if self.emission != "linear":
            raise CorpusError("only linear emission is supported")
        names = self.source_names
        if not names or len(set(names)) != len(names):
            raise CorpusError("sources must be a positive count or distinct names")
        for name in ("drop_ne", "wrong_label", "drop_sentence"):
            p = getattr(self.noise, name)
            if not 0.0 <= p <= 1.0:
                raise CorpusError(f"noise.{name} must lie in [0, 1], got {p}")
        for name in ("report_probability", "type_probability"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise CorpusError(f"{name} must lie in [0, 1]")

    @property
    def source_names(self) -> tuple:
        if isinstance(self.sources, int):
            if not 1 <= self.sources <= 26:
                raise CorpusError("sources must be between 1 and 26")
            return tuple(string.ascii_uppercase[:self.sources])
        return tuple(self.sources)


@dataclass(frozen=True)
class SyntheticCorpus:
    corpus: Corpus
    gold_messages: tuple
    gold_relations: tuple
    config: GeneratorConfig


class _Realizer:
    """Turns slot values into tokens and NE spans using the filling rules."""

    def __init__(self, registry: SchemaRegistry, ontology: Ontology, rules: RuleSet):
        self.registry, self.ontology, self.rules = registry, ontology, rules
        self._inverse = {}
        for t in registry.message_types:
            for slot in registry[t].slot_names:
                rule = rules.lexicon(t, slot)
                if rule is None:
                    raise CorpusError(f"no realizable rule for {t}.{slot}")
                if rule.extractor in ("keyword", "degree"):
                    inv = {}
                    for tok, v in rule.mapping:
                        inv.setdefault(v, []).append(tok)
                    self._inverse[(t, slot)] = {v: sorted(ts) for v, ts in inv.items()}

    def domain(self, type_name: str, slot: str) -> list:
        """Values the generator may draw for a slot."""
        arg = self.registry[type_name].arg(slot)
        inv = self._inverse.get((type_name, slot))
        if inv is not None:
            vals = sorted(inv, key=str)
        else:
            vals = sorted({i for c in arg.value_type if c not in (DEGREE, TIMESPAN)
                           for i in self.ontology.instances_under(c)})
        if arg.value_type == (DEGREE,):
            vals = [v for v in DEGREE_VALUES if v in vals]
        return vals

    def tokens(self, type_name: str, slot: str, value, rng: random.Random):
        """(tokens, is_ne) realizing one slot value."""
        inv = self._inverse.get((type_name, slot))
        if inv is not None:
            return [rng.choice(inv[value])], False
        return [value], True


def _sample_message(t: str, realizer: _Realizer, registry: SchemaRegistry, ontology: Ontology,
                    rng: random.Random, fixed: Optional[dict] = None) -> dict:
    schema = registry[t]
    for _ in range(50):
        values = {}
        for slot in schema.slot_names:
            if fixed and slot in fixed:
                values[slot] = fixed[slot]
            else:
                values[slot] = rng.choice(realizer.domain(t, slot))
        # NE slots sharing a concept must hold distinct entities or the
        # index-based filling rules cannot tell them apart
        ne_vals = [v for s, v in values.items() if realizer._inverse.get((t, s)) is None]
        if len(set(ne_vals)) != len(ne_vals):
            continue
        probe = Message.create(t, values, 0, "probe")
        if validate_message(probe, registry, ontology).ok:
            return values
    raise CorpusError(f"could not sample a valid {t} message")


def _perturb_degree(v: int, rng: random.Random) -> int:
    u = rng.random()
    if u < 0.6:
        return v
    if u < 0.85:
        i = DEGREE_VALUES.index(v) + rng.choice((-1, 1))
        return DEGREE_VALUES[min(max(i, 0), len(DEGREE_VALUES) - 1)]
    return rng.choice(DEGREE_VALUES)


def generate_synthetic(config: GeneratorConfig, registry: SchemaRegistry, ontology: Ontology,
                       rules: Optional[RuleSet] = None, specs: Optional[Sequence] = None,
                       relation_config: RelationConfig = RelationConfig()) -> SyntheticCorpus:
    """Corpus of rounds x sources documents with gold messages and gold relations."""
    if rules is None or specs is None:
        from .pack import football_pack
        pack = football_pack()
        rules = pack.rules if rules is None else rules
        specs = pack.relations if specs is None else specs
    types = [t for t in registry.message_types if t in CUES]
    if len(types) != len(registry.message_types):
        missing = sorted(set(registry.message_types) - set(CUES))
        raise CorpusError(f"no cue vocabulary for message types {missing}")
    realizer = _Realizer(registry, ontology, rules)
    sources = config.source_names
    seed = config.seed
    world = random.Random(f"{seed}:world")
    report = random.Random(f"{seed}:report")
    noise_rng = {ch: random.Random(f"{seed}:noise:{ch}")
                 for ch in ("drop_ne", "wrong_label", "drop_sentence")}
    teams = sorted(ontology.instances_under("Team")) if "Team" in ontology else []
    opponents = [t for t in teams if t != FOCUS_TEAM]
    players = sorted(ontology.instances_under("Player")) if "Player" in ontology else []

    star_value = 50
    docs = []
    for k in range(config.rounds):
        rnd = config.first_round + k
        incidents = []  # (type, values, temporal offset)
        # performance of the star, two more players and sometimes the team
        if "performance" in types and players:
            star_value = DEGREE_VALUES[min(max(
                DEGREE_VALUES.index(star_value) + world.choice((-1, 0, 0, 1)), 0),
                len(DEGREE_VALUES) - 1)]
            cast = [STAR_PLAYER] if STAR_PLAYER in players else []
            cast += world.sample([p for p in players if p not in cast], 2)
            if FOCUS_TEAM in teams and world.random() < 0.5:
                cast.append(FOCUS_TEAM)
            for ent in cast:
                fixed = {"entity": ent}
                if ent == STAR_PLAYER:
                    fixed.update(in_what="general", time_span="whole_match", value=star_value)
                incidents.append(("performance",
                                  _sample_message("performance", realizer, registry, ontology,
                                                  world, fixed), None))
        for i, t in enumerate(types):
            if t == "performance":
                continue
            if (k + i) % 3 != 0 and world.random() >= config.type_probability:
                continue
            fixed = {}
            slots = registry[t].slot_names
            if opponents and "opponent" in slots:
                opp = opponents[k % len(opponents)]
                fixed = {"entity": FOCUS_TEAM, "opponent": opp}
                if world.random() < 0.3:
                    fixed = {"entity": opp, "opponent": FOCUS_TEAM}
            offset = None
            if t == "injured" and k > 0 and world.random() < 0.3:
                offset = -1
            incidents.append((t, _sample_message(t, realizer, registry, ontology, world, fixed),
                              offset))

        for src in sources:
            doc_id = f"{src}-r{rnd:02d}"
            pieces = []  # (type or None, [values...], offset)
            perf = []
            for t, values, offset in incidents:
                if report.random() >= config.report_probability:
                    continue
                values = dict(values)
                for slot in registry[t].slot_names:
                    if registry[t].arg(slot).value_type == (DEGREE,):
                        values[slot] = _perturb_degree(values[slot], report)
                if t == "performance" and values["entity"] != STAR_PLAYER \
                        and report.random() < 0.15:
                    values["in_what"] = "general"
                if t == "performance":
                    perf.append(values)
                else:
                    pieces.append((t, [values], offset))
            # now and then one sentence reports two players at once
            if len(perf) >= 3 and report.random() < 0.3:
                a, b = perf[1], perf[2]
                b.update({s: a[s] for s in ("in_what", "time_span", "value")})
                pieces.append(("performance", [perf[0]], None))
                pieces.append(("performance", [a, b], None))
            else:
                pieces.extend(("performance", [v], None) for v in perf)
            for _ in range(report.randint(1, 3)):
                pieces.append((None, [], None))
            report.shuffle(pieces)

            sentences = []
            for t, vals, offset in pieces:
                drop = noise_rng["drop_sentence"].random() < config.noise.drop_sentence
                sent = _realize(t, vals, offset, realizer, report, noise_rng, config.noise, types)
                if drop:
                    continue
                tokens, nes, gold = sent
                sentences.append(AnnotatedSentence(doc_id, len(sentences), tuple(tokens),
                                                   tuple(nes), tuple(gold)))
            docs.append(Document(doc_id, src, rnd, tuple(sentences)))

    corpus = make_corpus(docs, sources)
    gold = tuple(gold_messages(corpus))
    gold_rel = tuple(brute_force_relations(gold, specs, relation_config, ontology, sources))
    return SyntheticCorpus(corpus, gold, gold_rel, config)


def _realize(t, vals, offset, realizer: _Realizer, rng: random.Random, noise_rng: dict,
             noise: NoiseConfig, types: list):
    """Tokens, NE spans and gold annotations for one sentence."""
    wrong = noise_rng["wrong_label"]
    flip = wrong.random() < noise.wrong_label
    decoy = wrong.choice(types)
    if t is None:
        words = rng.sample(FILLER, 3)
        tokens = [rng.choice(CONNECTORS)] + words
        nes = []
        if realizer.ontology.has_instance(FOCUS_TEAM) and rng.random() < 0.3:
            nes.append(NESpan(len(tokens), len(tokens) + 1, FOCUS_TEAM,
                              realizer.ontology.concept_of_instance(FOCUS_TEAM)))
            tokens.append(FOCUS_TEAM)
        return tokens, _drop_nes(nes, noise_rng, noise), []

    cue_type = t
    if flip:
        cue_type = decoy if decoy != t else types[(types.index(t) + 1) % len(types)]
    cues = CUES[cue_type]
    tokens = [cues[0]]
    nes = []
    schema = realizer.registry[t]
    for slot in schema.slot_names:
        if slot == "entity" and len(vals) > 1:
            entity_values = [v["entity"] for v in vals]
        else:
            entity_values = [vals[0][slot]]
        for j, value in enumerate(entity_values):
            if j:
                tokens.append("and")
            toks, is_ne = realizer.tokens(t, slot, value, rng)
            if is_ne:
                concept = realizer.ontology.concept_of_instance(value)
                nes.append(NESpan(len(tokens), len(tokens) + len(toks), value, concept))
            tokens.extend(toks)
        tokens.append(rng.choice(CONNECTORS))
    tokens.extend(cues[1:])
    if offset == -1:
        tokens.extend(["previous", "round"])
    gold = [GoldAnnotation.create(t, v, offset) for v in vals]
    return tokens, _drop_nes(nes, noise_rng, noise), gold


def _drop_nes(nes, noise_rng, noise) -> list:
    rng = noise_rng["drop_ne"]
    return [ne for ne in nes if not rng.random() < noise.drop_ne]
