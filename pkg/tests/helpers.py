"""Random inputs shared by property tests and the acceptance suite."""
import random

from hypothesis import strategies as st

from evosum.ontology import Concept, Ontology
from evosum.schema import DEGREE, TEMPORAL_ROOT, TIMESPAN, UNFILLED, Message

SOURCES = ("A", "B", "C", "D")


@st.composite
def taxonomies(draw, max_size=25):
    """Random single-parent forest; parent always precedes child."""
    n = draw(st.integers(0, max_size))
    concepts = []
    for i in range(n):
        parent = None
        if i and draw(st.booleans()):
            parent = f"c{draw(st.integers(0, i - 1))}"
        concepts.append(Concept(f"c{i}", f"C{i}", parent, frozenset({f"i{i}"})))
    order = draw(st.permutations(range(n))) if n else []
    return Ontology([concepts[i] for i in order])


def slot_domain(arg, onto):
    vt = arg.value_type
    if vt == (DEGREE,):
        return [0, 40, 50, 60, 100]
    values = []
    for ref in vt:
        root = TEMPORAL_ROOT if ref == TIMESPAN else ref
        values.append(root)
        values.extend(sorted(onto.instances_under(root))[:3])
        values.extend(sorted(onto.children(root))[:2])
    return sorted(set(values), key=str)


def random_messages(rng: random.Random, registry, onto, n, *, types=None, times=6,
                    sources=SOURCES, unfilled=0.1):
    """`n` messages of a few types with values drawn from tiny domains so
    that related pairs are frequent."""
    types = types or ("performance", "card", "injured", "absent", "final_score")
    out = []
    for i in range(n):
        t = rng.choice(types)
        schema = registry[t]
        values = {}
        for arg in schema.args:
            if rng.random() < unfilled:
                values[arg.name] = UNFILLED
            else:
                values[arg.name] = rng.choice(slot_domain(arg, onto))
        out.append(Message.create(t, values, rng.randrange(times), rng.choice(sources),
                                  f"d{i}", (0,)))
    return out
