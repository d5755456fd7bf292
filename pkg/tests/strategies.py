"""Hypothesis strategies built on the package's random samplers."""

import random

from hypothesis import strategies as st

from gfodd.core import AggOp
from gfodd.sampling import PLAIN_SIGNATURE, SAMPLE_SIGNATURE, random_gfodd, random_interpretation

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def gfodds(draw, binary=False, sig=SAMPLE_SIGNATURE, fodd=False):
    rng = random.Random(draw(seeds))
    return random_gfodd(rng, sig, binary=binary, ops=[AggOp.MAX] if fodd else None)


@st.composite
def interpretations(draw, sig=SAMPLE_SIGNATURE, max_objects=3):
    return random_interpretation(random.Random(draw(seeds)), sig, max_objects)


__all__ = ["gfodds", "interpretations", "seeds", "PLAIN_SIGNATURE", "SAMPLE_SIGNATURE"]
