"""Message extraction, time x source grids, cross-document relations and
template summaries over multi-source, time-stamped news."""
from .argfill import HeuristicRule, RuleSet, fill_arguments, load_rules, merge_spanning
from .classifier import (CVReport, MessageClassifier, NaiveBayes, NBModel, VectorizerConfig,
                         build_vocabulary, classify, cross_validate, stratified_folds, train_nb,
                         vectorize)
from .corpus import (AnnotatedSentence, Corpus, Document, GoldAnnotation, NESpan, gold_messages,
                     load_corpus, make_corpus, write_corpus)
from .errors import EvosumError
from .evaluation import PRF, accuracy, evaluate_messages, evaluate_relations, f_measure, prf
from .grid import Grid, build_grid, horizontal_slice, vertical_slice
from .ontology import Concept, Ontology, load_ontology, load_ontology_file
from .pack import DomainPack, football_pack, load_pack
from .pipeline import PipelineResult, run_pipeline
from .query import Query, Subgrid, TemplatePack, load_templates, render_summary, run_query
from .relations import (RelationConfig, RelationInstance, RelationSpec, brute_force_relations,
                        extract_relations, load_relation_specs)
from .schema import (UNFILLED, Message, MessageSchema, SchemaRegistry, load_schemas,
                     resolve_time, validate_message)
from .synthetic import GeneratorConfig, NoiseConfig, SyntheticCorpus, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "AnnotatedSentence", "Concept", "Corpus", "CVReport", "Document", "DomainPack",
    "EvosumError", "GeneratorConfig", "GoldAnnotation", "Grid", "HeuristicRule", "Message",
    "MessageClassifier", "MessageSchema", "NaiveBayes", "NBModel", "NESpan", "NoiseConfig",
    "Ontology", "PipelineResult", "PRF", "Query", "RelationConfig", "RelationInstance",
    "RelationSpec", "RuleSet", "SchemaRegistry", "Subgrid", "SyntheticCorpus", "TemplatePack",
    "UNFILLED", "VectorizerConfig", "accuracy", "brute_force_relations", "build_grid",
    "build_vocabulary", "classify", "cross_validate", "evaluate_messages", "evaluate_relations",
    "extract_relations", "f_measure", "fill_arguments", "football_pack", "generate_synthetic",
    "gold_messages", "horizontal_slice", "load_corpus", "load_ontology", "load_ontology_file",
    "load_pack", "load_relation_specs", "load_rules", "load_schemas", "load_templates",
    "make_corpus", "merge_spanning", "prf", "render_summary", "resolve_time", "run_pipeline",
    "run_query", "stratified_folds", "train_nb", "validate_message", "vectorize",
    "vertical_slice", "write_corpus",
]
