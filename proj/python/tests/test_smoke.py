import json
import math
from pathlib import Path

import numpy as np
import pytest

import catglm

DATA = Path(__file__).resolve().parents[2] / "data"


@pytest.fixture(scope="module")
def german():
    return catglm.load(DATA / "german.csv", DATA / "german.schema.json")


def test_enumeration():
    assert catglm.enumerate_feasible_clusterings(2, 2) == [[0, 1], [0, 0]]
    assert len(catglm.enumerate_feasible_clusterings(15, 2)) == 15
    assert catglm.count_feasible_clusterings(5, 3) == 11


def test_relative_complexity():
    schema = catglm.load_schema(DATA / "car.schema.json")
    names = catglm.eligible_predictors(schema, 2)
    assert len(names) == 6
    assert round(catglm.relative_complexity(schema, names), 2) == 40.0


def test_fit_and_predict(german):
    schema, data = german
    assert data.n_rows == 1000
    train, test = catglm.split(data, 0.7, seed=1)
    assert (train.n_rows, test.n_rows) == (700, 300)
    model = catglm.fit_one_hot(train, schema)
    assert model.labels[0] == "(intercept)"
    assert model.coefficients.shape == (len(model.labels),)
    mu = catglm.predict_one_hot(model, test, schema)
    assert 0.6 < catglm.ccr(mu, test.response) < 0.9
    assert json.loads(model.to_json())["family"] == "bernoulli_logit"


def test_grasp_and_proximity(german):
    schema, data = german
    train, test = catglm.split(data, 0.7, seed=2)
    res = catglm.grasp_run(train, test, schema, m=2, seed=5, rcl=1)
    doc = json.loads(res.to_json())
    assert len(doc["iterations"]) == 2
    prox = res.proximity("status")
    assert prox.shape == (4, 4)
    assert np.allclose(prox, prox.T)
    assert np.all(np.diag(prox) == 1.0)
    assert res.proximity_dot("status").startswith('graph "status" {')
    # rcl 1 is greedy: both repeats agree.
    assert doc["iterations"][0]["clusterings"] == doc["iterations"][1]["clusterings"]
    assert 0.5 < res.test_metric <= 1.0


def test_benchmark_is_deterministic(german):
    schema, data = german
    a = catglm.run_benchmark("german", data, schema, m=2, reshuffles=2, seed=3)
    b = catglm.run_benchmark("german", data, schema, m=2, reshuffles=2, seed=3)
    assert a == b
    assert math.isclose(a["mean_original"], sum(r["original"] for r in a["reshuffles"]) / 2)


def test_errors():
    with pytest.raises(catglm.DataError):
        catglm.load_csv(DATA / "missing.csv", catglm.load_schema(DATA / "german.schema.json"))
    dup = {"predictors": [{"name": "a", "kind": "continuous"}, {"name": "a", "kind": "continuous"}],
           "response": {"name": "y", "type": "binary"}}
    with pytest.raises(ValueError):
        catglm.Schema.from_json(json.dumps(dup))
