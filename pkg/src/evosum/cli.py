"""Command-line entry point.

Every subcommand works inside an output directory (``--out``). A subcommand
always recomputes its own artifact; artifacts it depends on are read from
the output directory when present and computed (and written) otherwise.

Exit status: 0 on success, 1 on usage errors, 2 on data or validation errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional

from .classifier import MessageClassifier, VectorizerConfig, cross_validate
from .corpus import Corpus, gold_messages, load_corpus, write_corpus, write_json
from .errors import EvosumError
from .evaluation import accuracy, evaluate_messages, evaluate_relations, format_report
from .grid import Grid, build_grid
from .pack import DomainPack, load_pack
from .pipeline import extract_messages, train_classifier
from .query import Query, Subgrid, render_summary, run_query
from .relations import RelationConfig, RelationInstance, brute_force_relations, extract_relations
from .schema import Message
from .synthetic import GeneratorConfig, NoiseConfig, generate_synthetic

log = logging.getLogger("evosum")

ARTIFACTS = {
    "corpus": "corpus/manifest.json",
    "gold_messages": "gold_messages.json",
    "gold_relations": "gold_relations.json",
    "model": "model.json",
    "cv": "cv_report.json",
    "messages": "messages.json",
    "grid": "grid.json",
    "relations": "relations.json",
    "subgrid": "subgrid.json",
    "summary": "summary.txt",
    "eval": "eval.json",
}

DEFAULTS = {
    "seed": 0, "rounds": 30, "sources": 3, "wrong_label": 0.0, "drop_ne": 0.0,
    "drop_sentence": 0.0, "window": 0, "max_distance": 1, "delta": 10, "ne_features": True,
    "stemming": False, "min_frequency": 5, "alpha": 1.0, "folds": 10, "workers": 1,
    "include_partial": False, "out": "evosum-out",
}
PATH_KEYS = ("ontology", "schemas", "rules", "relations", "templates", "corpus", "out", "query")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _on_off(v: str) -> bool:
    if v not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return v == "on"


def _time_range(v: str) -> tuple:
    try:
        if ":" in v:
            lo, hi = v.split(":", 1)
            return int(lo), int(hi)
        return int(v), int(v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ROUND or FIRST:LAST, got {v!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("inputs and outputs")
    g.add_argument("--config", help="JSON run configuration; flags override its values")
    for name in ("ontology", "schemas", "rules", "relations", "templates"):
        g.add_argument(f"--{name}", help=f"{name} file (default: bundled football pack)")
    g.add_argument("--corpus", help="corpus manifest")
    g.add_argument("--out", help="output directory (default: evosum-out)")
    g.add_argument("--seed", type=int)
    g.add_argument("--workers", type=int, help="threads for cross-validation and relations")
    g.add_argument("-v", "--verbose", action="store_true")

    gen = argparse.ArgumentParser(add_help=False)
    g = gen.add_argument_group("synthetic corpus")
    g.add_argument("--rounds", type=int)
    g.add_argument("--sources", type=int)
    g.add_argument("--wrong-label", dest="wrong_label", type=float)
    g.add_argument("--drop-ne", dest="drop_ne", type=float)
    g.add_argument("--drop-sentence", dest="drop_sentence", type=float)

    clf = argparse.ArgumentParser(add_help=False)
    g = clf.add_argument_group("classifier")
    g.add_argument("--ne-features", dest="ne_features", type=_on_off, metavar="{on,off}")
    g.add_argument("--stemming", type=_on_off, metavar="{on,off}")
    g.add_argument("--min-frequency", dest="min_frequency", type=int)
    g.add_argument("--alpha", type=float)
    g.add_argument("--folds", type=int, help="cross-validation folds (0 disables)")

    rel = argparse.ArgumentParser(add_help=False)
    g = rel.add_argument_group("relations")
    g.add_argument("--window", type=int)
    g.add_argument("--max-distance", dest="max_distance", type=int)
    g.add_argument("--delta", type=int)
    g.add_argument("--include-partial", dest="include_partial", action="store_const", const=True)

    qry = argparse.ArgumentParser(add_help=False)
    g = qry.add_argument_group("query")
    g.add_argument("--query", help="JSON query file")
    g.add_argument("--entity", action="append")
    g.add_argument("--type", dest="types", action="append")
    g.add_argument("--source", dest="query_sources", action="append")
    g.add_argument("--time", type=_time_range, metavar="ROUND|FIRST:LAST")
    g.add_argument("--relation", action="append")
    g.add_argument("--language")

    parser = _Parser(prog="evosum", description="Multi-source, time-aware news summarization")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    spec = {
        "gen": ([common, gen], "generate a synthetic corpus"),
        "train": ([common, gen, clf], "train the classifier and write a CV report"),
        "extract": ([common, gen, clf], "extract messages"),
        "grid": ([common, gen, clf, rel], "build the time x source grid"),
        "relations": ([common, gen, clf, rel], "extract relations"),
        "query": ([common, gen, clf, rel, qry], "select a subgrid"),
        "summarize": ([common, gen, clf, rel, qry], "render a subgrid as text"),
        "eval": ([common, gen, clf, rel], "score against gold annotations"),
        "pipeline": ([common, gen, clf, rel, qry], "run every stage end to end"),
    }
    for name, (parents, text) in spec.items():
        sub.add_parser(name, parents=parents, help=text, description=text)
    return parser


class Run:
    """Resolved settings plus lazily computed pipeline stages."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        cfg = {}
        if args.config:
            path = Path(args.config)
            try:
                cfg = json.loads(path.read_text(encoding="utf-8"))
            except FileNotFoundError:
                raise EvosumError(f"config file not found: {path}") from None
            except json.JSONDecodeError as exc:
                raise EvosumError(f"{path}: invalid JSON: {exc}") from exc
            if not isinstance(cfg, dict):
                raise EvosumError(f"{path}: config must be a JSON object")
            # relative paths in a config file are relative to that file
            for key in PATH_KEYS:
                if isinstance(cfg.get(key), str):
                    cfg[key] = str(path.parent / cfg[key])
            noise = cfg.pop("noise", {}) or {}
            for k, v in noise.items():
                cfg.setdefault(k, v)
        self.cfg = cfg
        self.out = Path(self.get("out"))
        self._cache = {}

    def get(self, key: str, default=None):
        v = getattr(self.args, key, None)
        if v is not None:
            return v
        if key in self.cfg:
            return self.cfg[key]
        return DEFAULTS.get(key, default)

    def path(self, artifact: str) -> Path:
        return self.out / ARTIFACTS[artifact]

    # -- settings --

    @property
    def pack(self) -> DomainPack:
        if "pack" not in self._cache:
            self._cache["pack"] = load_pack(**{k: self.get(k) for k in
                                               ("ontology", "schemas", "rules", "relations",
                                                "templates")})
        return self._cache["pack"]

    def vectorizer(self) -> VectorizerConfig:
        return VectorizerConfig(use_stemming=bool(self.get("stemming")),
                                include_ne_types=bool(self.get("ne_features")),
                                min_frequency=int(self.get("min_frequency")))

    def relation_config(self) -> RelationConfig:
        return RelationConfig(window=int(self.get("window")),
                              max_diachronic_distance=int(self.get("max_distance")),
                              delta=int(self.get("delta")))

    def generator_config(self) -> GeneratorConfig:
        noise = NoiseConfig(drop_ne=float(self.get("drop_ne")),
                            wrong_label=float(self.get("wrong_label")),
                            drop_sentence=float(self.get("drop_sentence")))
        return GeneratorConfig(seed=int(self.get("seed")), rounds=int(self.get("rounds")),
                               sources=int(self.get("sources")), noise=noise)

    def query(self) -> Optional[Query]:
        a = self.args
        d = {}
        qfile = self.get("query")
        if isinstance(qfile, dict):
            d = dict(qfile)
        elif qfile:
            try:
                d = json.loads(Path(qfile).read_text(encoding="utf-8"))
            except FileNotFoundError:
                raise EvosumError(f"query file not found: {qfile}") from None
            except json.JSONDecodeError as exc:
                raise EvosumError(f"{qfile}: invalid JSON: {exc}") from exc
        if getattr(a, "entity", None):
            d["entities"] = a.entity
        if getattr(a, "types", None):
            d["types"] = a.types
        if getattr(a, "query_sources", None):
            d["sources"] = a.query_sources
        if getattr(a, "time", None):
            d["time_range"] = list(a.time)
        if getattr(a, "relation", None):
            d["relations"] = a.relation
        return Query.from_dict(d) if d else None

    # -- stages --

    def generate(self):
        syn = generate_synthetic(self.generator_config(), self.pack.registry, self.pack.ontology,
                                 self.pack.rules, self.pack.relations, self.relation_config())
        manifest = write_corpus(syn.corpus, self.path("corpus").parent)
        write_json(self.path("gold_messages"), [m.to_dict() for m in syn.gold_messages])
        write_json(self.path("gold_relations"), [r.to_dict() for r in syn.gold_relations])
        log.info("generated %d documents into %s", len(syn.corpus), manifest)
        self._cache["corpus"] = syn.corpus
        return syn.corpus

    def corpus(self, generate_missing: bool = False) -> Corpus:
        if "corpus" in self._cache:
            return self._cache["corpus"]
        given = self.get("corpus")
        if given:
            corpus = load_corpus(given, self.pack.ontology)
        elif self.path("corpus").exists():
            corpus = load_corpus(self.path("corpus"), self.pack.ontology)
        elif generate_missing:
            return self.generate()
        else:
            raise EvosumError(f"no corpus: pass --corpus or run 'evosum gen --out {self.out}'")
        self._cache["corpus"] = corpus
        return corpus

    def train(self, fresh: bool = False) -> MessageClassifier:
        if "model" in self._cache:
            return self._cache["model"]
        p = self.path("model")
        if not fresh and p.exists():
            clf = MessageClassifier.from_dict(json.loads(p.read_text(encoding="utf-8")))
        else:
            clf = train_classifier(self.corpus(), self.pack, self.vectorizer(),
                                   float(self.get("alpha")))
            write_json(p, clf.to_dict())
        self._cache["model"] = clf
        return clf

    def cross_validate(self):
        k = int(self.get("folds"))
        if k == 0:
            return None
        sentences = self.corpus().sentences()
        report = cross_validate(sentences, k, int(self.get("seed")), config=self.vectorizer(),
                                alpha=float(self.get("alpha")), workers=int(self.get("workers")))
        d = report.to_dict()
        d.update(seed=int(self.get("seed")), k=k, vectorizer=self.vectorizer().to_dict())
        write_json(self.path("cv"), d)
        log.info("cross-validation: mean accuracy %.4f%%", report.mean_accuracy)
        return report

    def messages(self, fresh: bool = False) -> tuple:
        if "messages" in self._cache:
            return self._cache["messages"]
        p = self.path("messages")
        if not fresh and p.exists():
            d = json.loads(p.read_text(encoding="utf-8"))
            result = ([Message.from_dict(m) for m in d["messages"]], d["predicted_labels"])
        else:
            msgs, labels = extract_messages(self.corpus(), self.train(), self.pack)
            refs = [(s.document, s.index) for s in self.corpus().sentences()]
            write_json(p, {
                "messages": [m.to_dict() for m in msgs],
                "predicted_labels": [{"document": d, "sentence": i, "label": lab}
                                     for (d, i), lab in zip(refs, labels)],
            })
            result = (msgs, [{"document": d, "sentence": i, "label": lab}
                             for (d, i), lab in zip(refs, labels)])
        self._cache["messages"] = result
        return result

    def grid(self, fresh: bool = False) -> Grid:
        if "grid" in self._cache:
            return self._cache["grid"]
        p = self.path("grid")
        if not fresh and p.exists():
            grid = Grid.from_dict(json.loads(p.read_text(encoding="utf-8")))
        else:
            msgs, _ = self.messages()
            sources = self.corpus().sources
            grid = build_grid(msgs, sources, include_partial=bool(self.get("include_partial")))
            write_json(p, grid.to_dict())
        self._cache["grid"] = grid
        return grid

    def relations(self, fresh: bool = False) -> list:
        if "relations" in self._cache:
            return self._cache["relations"]
        p = self.path("relations")
        if not fresh and p.exists():
            d = json.loads(p.read_text(encoding="utf-8"))
            rels = [RelationInstance.from_dict(r) for r in d["relations"]]
        else:
            cfg = self.relation_config()
            rels = extract_relations(self.grid(), self.pack.relations, cfg, self.pack.ontology,
                                     int(self.get("workers")))
            write_json(p, {"config": {"window": cfg.window,
                                      "max_distance": cfg.max_diachronic_distance,
                                      "delta": cfg.delta},
                           "relations": [r.to_dict() for r in rels]})
        self._cache["relations"] = rels
        return rels

    def subgrid(self, fresh: bool = False) -> Subgrid:
        p = self.path("subgrid")
        q = self.query()
        if not fresh and q is None and p.exists():
            return Subgrid.from_dict(json.loads(p.read_text(encoding="utf-8")))
        if q is None:
            raise UsageError("a query needs at least one of --entity, --type, --source, "
                             "--time, --relation or --query")
        sg = run_query(self.grid(), self.relations(), q, self.pack.ontology, self.pack.registry,
                       relation_names=self.pack.relation_names)
        d = sg.to_dict()
        d["query"] = q.to_dict()
        write_json(p, d)
        return sg

    def summarize(self, subgrid: Subgrid) -> str:
        text = render_summary(subgrid, self.pack.templates, getattr(self.args, "language", None))
        p = self.path("summary")
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text, encoding="utf-8")
        return text

    def evaluate(self) -> dict:
        corpus = self.corpus()
        gold = gold_messages(corpus)
        gold_rels = brute_force_relations(gold, self.pack.relations, self.relation_config(),
                                          self.pack.ontology, corpus.sources)
        msgs, labels = self.messages()
        placed = list(self.grid().messages())
        rels = self.relations()
        report = {
            "messages_type_only": evaluate_messages(gold, placed, "type"),
            "messages_exact": evaluate_messages(gold, placed, "exact"),
            "relations": evaluate_relations(gold_rels, rels),
            "partial_messages": sum(m.partial for m in msgs),
        }
        gold_labels = [s.label for s in corpus.sentences()]
        predicted = [rec["label"] for rec in labels]
        if len(predicted) == len(gold_labels) and predicted:
            report["classification_accuracy"] = round(accuracy(gold_labels, predicted), 4)
        write_json(self.path("eval"), report)
        return report


def _cmd_gen(run: Run):
    run.generate()


def _cmd_train(run: Run):
    run.train(fresh=True)
    run.cross_validate()


def _cmd_extract(run: Run):
    run.messages(fresh=True)


def _cmd_grid(run: Run):
    run.grid(fresh=True)


def _cmd_relations(run: Run):
    run.relations(fresh=True)


def _cmd_query(run: Run):
    sg = run.subgrid(fresh=True)
    sys.stdout.write(render_summary(sg, run.pack.templates, run.args.language))


def _cmd_summarize(run: Run):
    sys.stdout.write(run.summarize(run.subgrid()))


def _cmd_eval(run: Run):
    sys.stdout.write(format_report(run.evaluate()))


def _cmd_pipeline(run: Run):
    run.corpus(generate_missing=True)
    run.train(fresh=True)
    run.cross_validate()
    run.messages(fresh=True)
    run.grid(fresh=True)
    run.relations(fresh=True)
    report = run.evaluate()
    if run.query() is not None:
        run.summarize(run.subgrid(fresh=True))
    sys.stdout.write(format_report(report))


COMMANDS = {
    "gen": _cmd_gen, "train": _cmd_train, "extract": _cmd_extract, "grid": _cmd_grid,
    "relations": _cmd_relations, "query": _cmd_query, "summarize": _cmd_summarize,
    "eval": _cmd_eval, "pipeline": _cmd_pipeline,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            parser.print_usage(sys.stderr)
            raise UsageError("evosum: error: a subcommand is required")
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return 0 if exc.code in (0, None) else 1
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
                        level=logging.INFO if args.verbose else logging.WARNING)
    try:
        run = Run(args)
        COMMANDS[args.command](run)
    except UsageError as exc:
        print(f"evosum {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (EvosumError, KeyError, ValueError, OSError) as exc:
        print(f"evosum {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
