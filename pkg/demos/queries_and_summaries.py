"""
Asking the grid questions
=========================

A query filters messages by entity, type, time, source or relation and
keeps every relation between the selected messages. Concept names in the
entity filter match all of their instances.
"""

from evosum import GeneratorConfig, Query, football_pack, generate_synthetic, run_pipeline
from evosum import render_summary, run_query

pack = football_pack()
syn = generate_synthetic(GeneratorConfig(seed=3, rounds=8), pack.registry, pack.ontology)
res = run_pipeline(syn.corpus, pack)
print(len(res.grid), "messages in the grid,", len(res.relations), "relations")

queries = {
    "Nalitzis, rounds 2-4": Query(entities={"Nalitzis"}, time_range=(2, 4)),
    "any player, source A, round 5": Query(entities={"Player"}, sources={"A"},
                                           time_range=(5, 5)),
    "disagreements only": Query(relations={"Disagreement"}, time_range=(1, 3)),
    "injuries": Query(types={"injured"}),
}
for title, q in queries.items():
    sub = run_query(res.grid, res.relations, q, pack.ontology, pack.registry,
                    relation_names=pack.relation_names)
    print(f"\n## {title}: {len(sub.messages)} messages, {len(sub.relations)} relations")
    print(render_summary(sub, pack.templates), end="")
