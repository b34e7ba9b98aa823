import math
import random

import pytest

from goodpants import assembly as asm
from goodpants import lattice as lat
from goodpants import pants as pa
from goodpants import synthetic as sy
from goodpants.moebius import GroupElement


def random_element(rng) -> GroupElement:
    while True:
        try:
            return GroupElement(
                complex(rng.uniform(-2, 2), rng.uniform(-2, 2)),
                complex(rng.uniform(-2, 2), rng.uniform(-2, 2)),
                complex(rng.uniform(-2, 2), rng.uniform(-2, 2)),
                complex(rng.uniform(-2, 2), rng.uniform(-2, 2)),
            )
        except ValueError:
            continue


@pytest.fixture(scope="session")
def rng():
    return random.Random(20260810)


DEMO_R = 2.0
DEMO_EPS = 0.1
DEMO_LEN = 2

MIRROR_KEYS = (pa.pants_word_key((1,), (2,)), pa.pants_word_key((-1,), (2, 1)))


@pytest.fixture(scope="session")
def demo_pipeline():
    presentation = sy.demo_presentation(DEMO_R)
    curves = lat.enumerate_conjugacy_classes(presentation, DEMO_LEN, DEMO_R, DEMO_EPS)
    pants_list, index = pa.enumerate_good_pants(
        curves, presentation, DEMO_LEN, DEMO_EPS, DEMO_R
    )
    ends_by = {}
    for key in index.curves():
        for e in index.minus(key) + index.plus(key):
            ends_by.setdefault(e.pants.key, []).append(e)
    for k in ends_by:
        ends_by[k].sort(key=lambda e: e.marked_cuff)
    return presentation, curves, pants_list, index, ends_by


@pytest.fixture(scope="session")
def mirror_surface(demo_pipeline):
    _, _, pants_list, index, ends_by = demo_pipeline
    selected = [p for p in pants_list if p.key in MIRROR_KEYS]
    mu = asm.PantsMeasure.of({p: 1 for p in selected})
    surface = asm.build_surface(mu, index, ends_by, DEMO_EPS, DEMO_R, threshold=10.0)
    return mu, surface
