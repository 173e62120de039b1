import json

import numpy as np
import pytest

from data.matrix_generators import gen_default, gen_glued


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(1234)))


@pytest.fixture
def well_conditioned():
    return gen_default(60, 5, 3, 1.0, seed=3)


@pytest.fixture
def glued_1e4():
    return gen_glued(80, 6, 3, 2.0, 2.0, seed=5)


@pytest.fixture
def tiny_config_dict():
    return {
        "matrix": {"class": "glued", "m": 30, "p": 3, "s": 2, "knob_sweep": [{"t1": 1, "t2": 1}], "seed": 9},
        "algorithms": ["BCGS_PIP"],
        "ios": ["HouseQR"],
        "output_dir": "results/tiny",
    }


@pytest.fixture
def write_config(tmp_path):
    def _write(data, name="config.json"):
        path = tmp_path / name
        path.write_text(data if isinstance(data, str) else json.dumps(data), encoding="utf-8")
        return str(path)
    return _write
