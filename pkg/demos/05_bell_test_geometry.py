"""Checking that a Bell-test layout closes the locality loophole.

Events are (t, x) in units with c = 1.  Run: python demos/05_bell_test_geometry.py
"""
from bellarrow.spacetime import Event, ExperimentGeometry, validate_config


def show(title, pts):
    g = ExperimentGeometry({k: Event(k, t, x) for k, (t, x) in pts.items()})
    print(title)
    for k, cond in enumerate(validate_config(g), 1):
        pairs = ", ".join(f"{a}-{b}: s2={s2:+.3f} {kind}" for a, b, s2, kind in cond.pairs)
        print(f"  ({k}) {'pass' if cond.passed else 'FAIL'}  {cond.name}  [{pairs}]")


good = {"E_S": (0, 0), "C_A": (0.1, -0.9), "C_B": (0.1, 0.9), "M_A": (1, -0.5), "M_B": (1, 0.5)}
show("symmetric layout:", good)

# Alice picks her setting too early: the choice sits in the source's past light cone.
show("\nearly setting choice:", {**good, "C_A": (-0.5, -0.1)})

# Bob measures late enough that Alice's choice can reach him.
show("\nlate measurement at Bob:", {**good, "M_B": (2.5, 0.5)})
