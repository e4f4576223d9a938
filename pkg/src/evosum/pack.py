"""Domain packs: ontology, message schemas, filling rules, relation specs, templates."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Optional

from .argfill import RuleSet, load_rules
from .ontology import Ontology, load_ontology
from .query import TemplatePack, load_templates
from .relations import load_relation_specs
from .schema import SchemaRegistry, load_schemas

BUNDLED = {
    "ontology": "football_ontology.json",
    "schemas": "football_schemas.json",
    "rules": "football_rules.json",
    "relations": "football_relations.json",
    "templates": "football_templates_en.json",
}


@dataclass(frozen=True)
class DomainPack:
    ontology: Ontology
    registry: SchemaRegistry
    rules: RuleSet
    relations: tuple
    templates: TemplatePack

    @property
    def relation_names(self) -> tuple:
        return tuple(dict.fromkeys(s.name for s in self.relations))


DATA_DIR = Path(__file__).resolve().parent / "data"


def bundled_path(kind: str) -> Path:
    return DATA_DIR / BUNDLED[kind]


def fixture_path(name: str) -> Path:
    return DATA_DIR / "fixtures" / name


def _read(kind: str, path) -> str:
    p = bundled_path(kind) if path is None else Path(path)
    return p.read_text(encoding="utf-8")


def load_pack(ontology=None, schemas=None, rules=None, relations=None,
              templates=None) -> DomainPack:
    """Load a pack from files; any path left as None uses the bundled football file."""
    onto = load_ontology(_read("ontology", ontology))
    reg = load_schemas(_read("schemas", schemas), onto)
    return DomainPack(
        ontology=onto,
        registry=reg,
        rules=load_rules(_read("rules", rules), reg, onto),
        relations=tuple(load_relation_specs(_read("relations", relations), reg)),
        templates=load_templates(_read("templates", templates)),
    )


@lru_cache(maxsize=1)
def football_pack() -> DomainPack:
    return load_pack()
