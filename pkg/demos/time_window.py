"""
Sources that report late
========================

When sources publish at irregular times, two reports of the same incident
can carry different time tags. A synchronic time window lets them still be
compared; a larger diachronic distance links rounds further apart.
"""

from evosum import Message, RelationConfig, build_grid, extract_relations, football_pack

pack = football_pack()


def perf(value, time, source):
    return Message.create("performance", {"entity": "Zagorakis", "in_what": "midfield",
                                          "time_span": "whole_match", "value": value},
                          time, source, f"{source}-{time}", (0,))


# B files its report one round after A
msgs = [perf(75, 4, "A"), perf(75, 5, "B"), perf(90, 6, "A")]
grid = build_grid(msgs, sources=["A", "B"])

for window in (0, 1):
    for distance in (1, 2):
        cfg = RelationConfig(window=window, max_diachronic_distance=distance)
        rels = extract_relations(grid, pack.relations, cfg, pack.ontology)
        print(f"window={window} distance={distance}:", [r.name for r in rels] or "-")
