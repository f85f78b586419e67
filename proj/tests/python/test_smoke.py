from pathlib import Path

import pytest

import nn2rules

ROOT = Path(__file__).resolve().parents[2]
FIX = ROOT / "tests" / "fixtures"


@pytest.fixture
def tomato():
    return nn2rules.Schema.load(FIX / "tomato.schema"), nn2rules.Network.load(FIX / "tomato_weights.json")


def test_schema(tomato):
    schema, _ = tomato
    assert schema.feature_names == ["color", "size"]
    assert schema.value_counts == [2, 3]
    assert schema.assignment_count == 6
    assert schema.encode(["red", "big"]) == [1, 0, 0, 0, 1]


def test_tomato_extract_and_verify(tomato):
    schema, net = tomato
    rules = nn2rules.extract(net, schema)
    assert rules.positive_rules() == ["color=red AND size=medium", "color=red AND size=big"]
    assert rules.predict(["red", "medium"]) == 1
    assert rules.predict(["yellow", "big"]) == 0
    assert net.predict(schema.encode(["red", "small"])) == 0
    result = nn2rules.verify(rules, net)
    assert result["passed"] and result["exhaustive"] and result["checked"] == 6
    assert nn2rules.extract(net, schema, strategy="literal").entries() == rules.entries()


def test_corrupted_rules_fail_verification(tomato):
    schema, net = tomato
    text = nn2rules.extract(net, schema).to_text().replace("size=big => 1", "size=big => 0")
    result = nn2rules.verify(nn2rules.RuleList.parse(text, schema), net)
    assert not result["passed"]
    assert result["counterexamples"] == [(["red", "big"], 0, 1)]


def test_errors_surface_as_python_exceptions(tomato):
    schema, _ = tomato
    with pytest.raises(nn2rules.Error):
        nn2rules.Schema.parse("color: red, red\n")
    with pytest.raises(nn2rules.Error):
        schema.encode(["purple", "big"])
    with pytest.raises(nn2rules.InvariantViolation):
        nn2rules.RuleList.parse("color=red => 1\n", schema)


def test_weights_round_trip(tomato, tmp_path):
    _, net = tomato
    net.save(tmp_path / "w.json")
    assert nn2rules.Network.load(tmp_path / "w.json").to_json() == net.to_json()


@pytest.mark.skipif(not (ROOT / "data" / "cars").exists(), reason="prepared data missing")
def test_cars_pipeline():
    train, test = nn2rules.load_prepared(ROOT / "data" / "cars")
    net = nn2rules.train(train, [6, 3], epochs=10)
    rules = nn2rules.extract(net, train.schema, threads=2)
    assert nn2rules.verify(rules, net)["passed"]
    report = nn2rules.evaluate("cars", net, rules, train, test)
    full = report["methods"]["nn2rules_full"]
    assert full["fidelity"] == 1.0
    assert full["accuracy"] == report["network_test_accuracy"]
    assert report["num_rules_max"] == 1728
    assert report["curve"][-1]["fidelity"] == 1.0
