"""
One player, two rounds, two sources
===================================

Three short match reports mention the player Nalitzis. Source A calls the
round 1 display mediocre and the round 2 display excellent; source B
describes round 1 as modest. The pipeline should find that A and B agree
about round 1 and that A reports an improvement.
"""

from evosum import Query, football_pack, load_corpus, render_summary, run_pipeline, run_query
from evosum.pack import fixture_path

pack = football_pack()
corpus = load_corpus(fixture_path("nalitzis") / "manifest.json", pack.ontology)

for doc in corpus:
    print(doc.id, "|", " ".join(doc.sentences[0].tokens))

# train on the three documents, extract messages and relations
result = run_pipeline(corpus, pack)
print()
for m in result.messages:
    print(m)

print()
for r in result.relations:
    print(r)

# the query selects a subgrid; the summary renders its relations
sub = run_query(result.grid, result.relations, Query(entities={"Nalitzis"}), pack.ontology)
print()
print(render_summary(sub, pack.templates), end="")
