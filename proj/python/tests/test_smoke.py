import json
import math

import pytest

import shortcut

SMALL = json.dumps(
    {
        "seed": 11,
        "generator": {"n_nodes": 20, "n_items": 50, "n_orders": 200},
        "cv": {"n_repeats": 1, "n_outer_folds": 3, "n_inner_folds": 2},
        "grid": {"logistic_lambda": [0.1], "tree_min_leaf": [10], "boost_iterations": [20]},
    }
)


@pytest.fixture(scope="module")
def stream():
    network, orders = shortcut.generate(SMALL)
    labels = shortcut.label(network, orders, SMALL)
    features = shortcut.featurize(network, orders, SMALL)
    return network, orders, labels, features


def test_metrics():
    assert shortcut.accuracy([0.9, 0.2, 0.6], [1, 0, 0]) == pytest.approx(2 / 3)
    assert shortcut.log_loss([0.5], [1]) == pytest.approx(math.log(2))
    curve = shortcut.coverage_accuracy_curve([0.99, 0.6, 0.02], [1, 0, 0], [0.97])
    assert curve[0]["coverage"] == pytest.approx(2 / 3)
    with pytest.raises(shortcut.ShortcutError):
        shortcut.accuracy([0.5], [1, 0])


def test_generation_is_deterministic(stream):
    network, orders, _, _ = stream
    assert shortcut.generate(SMALL) == (network, orders)
    assert network.startswith("# format=network")


def test_labels_match_solver(stream):
    network, orders, labels, _ = stream
    ids, y = shortcut.read_labels(labels)
    solved = shortcut.solve(network, orders, SMALL)
    assert [s["order_id"] for s in solved] == ids
    for s, label in zip(solved, y):
        assert label == (1 if s["nodes_used"] > 1 else 0)
        if s["no_split_objective"] is not None:
            assert s["no_split_objective"] >= s["objective"]


def test_train_predict_route(stream):
    network, orders, labels, features = stream
    ids, rows = shortcut.read_features(features)
    _, y = shortcut.read_labels(labels)
    assert len(rows[0]) == len(shortcut.feature_names())
    model = shortcut.train("Ensemble", rows, y, {"min_leaf": 10, "n_iters": 30}, shortcut.feature_names())
    p = shortcut.predict(model, rows)
    assert all(0.0 < v < 1.0 for v in p)
    assert shortcut.accuracy(p, y) > 0.7
    tree = shortcut.train("DecisionTree", rows, y, {"min_leaf": 10}, shortcut.feature_names())
    assert shortcut.extract_rules(tree)
    outcomes, summary = shortcut.route(network, orders, model, threshold=0.5)
    assert json.loads(summary.split("\n", 1)[1])["n_orders"] == len(ids)
    assert outcomes.count("\n") == len(ids) + 2


def test_nested_cv_cells():
    x = [[float(i), float(i % 7)] for i in range(90)]
    y = [1 if i % 7 > 3 else 0 for i in range(90)]
    report = json.loads(shortcut.nested_cv(x, y, SMALL, ["LogisticL1"]).split("\n", 1)[1])
    assert len(report["models"][0]["cells"]) == 3


def test_pipeline(tmp_path):
    shortcut.run_pipeline(str(tmp_path), SMALL)
    report = (tmp_path / "report.txt").read_text()
    for kind in ("LogisticL1", "DecisionTree", "LogitBoost", "Ensemble"):
        assert kind in report
