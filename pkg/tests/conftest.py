import random

import pytest

from trackscore.model import Box2D, Detection, SequencePair


def box(slot: float = 0.0, size: float = 10.0) -> Box2D:
    return Box2D(100.0 * slot, 0.0, size, size)


def det(frame: int, det_id: int, slot: float = 0.0, **kw) -> Detection:
    return Detection(frame=frame, id=det_id, geometry=box(slot), **kw)


def make_seq(num_frames, gt, pr, name="test") -> SequencePair:
    return SequencePair(name, num_frames, tuple(gt), tuple(pr))


@pytest.fixture
def rng():
    return random.Random(1234)
