import json

import numpy as np
import pytest

from causalgeom.bitmap import decode, dumps, encode, loads
from causalgeom.regions import DoubleCone
from causalgeom.window import GridWindow


def test_round_trip():
    G = GridWindow(1, 1, 0.1, 2)
    m = G.evaluate(DoubleCone((-1, 0, 0), (1, 0, 0)))
    m2, G2 = loads(dumps(m, G))
    assert np.array_equal(m, m2) and G2 == G


def test_hash_mismatch():
    G = GridWindow(1, 1, 0.5, 1)
    doc = encode(np.eye(5, dtype=bool), G)
    doc["runs"][0] += 1
    doc["runs"][1] -= 1
    with pytest.raises(ValueError):
        decode(doc)
    with pytest.raises(ValueError):
        decode({**doc, "schema": "other"})


def test_deterministic_text():
    G = GridWindow(1, 1, 0.5, 1)
    m = np.eye(5, dtype=bool)
    assert dumps(m, G) == dumps(m.copy(), G)
    assert json.loads(dumps(m, G))["shape"] == [5, 5]
