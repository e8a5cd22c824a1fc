"""Smoke tests for the python bindings."""

import json
import math

import pytest

import distresslab as dl


@pytest.fixture(scope="module")
def corpus():
    return dl.generate_synthetic(seed=7, n=55, distress_fraction=18 / 55)


@pytest.fixture(scope="module")
def dataset(corpus):
    return dl.load_dataset(corpus)


def test_synth_is_deterministic(corpus):
    again = dl.generate_synthetic(seed=7, n=55, distress_fraction=18 / 55)
    assert corpus == again
    assert corpus.splitlines()[0].startswith("company_id,year,turnover")


def test_dataset_shape_and_labels(dataset):
    assert dataset.n_rows == 55
    assert dataset.count_distressed() == 18
    assert dataset.feature_names == dl.ratio_codes()
    assert len(dataset.matrix()) == 55
    assert set(dataset.labels) == {"healthy", "distressed"}


def test_pca_and_varimax(dataset):
    model = dl.fit_pca(dataset)
    assert len(model.eigenvalues) == 14
    assert math.isclose(sum(model.eigenvalues), 14.0, abs_tol=1e-8)
    assert math.isclose(model.cumulative_share[-1], 1.0, abs_tol=1e-8)

    k = dl.select_components(model, rule="kaiser")
    assert k >= 1
    rotated = dl.varimax_rotate(model, k)
    assert len(rotated.rotated_loadings) == 14
    assert len(rotated.rotated_loadings[0]) == k
    assert len(rotated.score_coefficients) == 14

    # communalities preserved by the rotation
    for row_before, row_after in zip(model.loadings, rotated.rotated_loadings):
        before = sum(v * v for v in row_before[:k])
        after = sum(v * v for v in row_after)
        assert math.isclose(before, after, abs_tol=1e-10)


def test_cluster_assignment(dataset):
    result = dl.cluster(dataset, linkage="ward", k=2)
    assert len(result["assignment"]) == 55
    assert set(result["assignment"]) == {0, 1}
    assert len(result["merges"]) == 54
    assert result["dot"].startswith("digraph")


def test_chaid_tree(dataset):
    tree = dl.fit_chaid(dataset)
    assert tree.n_nodes >= 1
    label, leaf = tree.classify({code: 0.0 for code in dl.ratio_codes()})
    assert label in ("healthy", "distressed")
    assert leaf >= 0
    parsed = json.loads(tree.to_json())
    assert parsed["nodes"][0]["healthy"] + parsed["nodes"][0]["distressed"] == 55


def test_logit_fit_and_statistics(dataset):
    fit = dl.fit_logit(dataset, features=["I1", "I7"])
    assert fit.converged
    assert fit.n_obs == 55 and fit.n_dep1 == 18
    assert math.isclose(fit.restricted_log_likelihood, -34.77267, abs_tol=1e-4)

    stats = fit.statistics()
    assert math.isclose(stats["mean_dep"], 18 / 55, abs_tol=1e-9)
    assert math.isclose(stats["sd_dep"], 0.473542, abs_tol=1e-6)
    assert stats["mcfadden_r2"] == pytest.approx(
        1.0 - fit.log_likelihood / fit.restricted_log_likelihood
    )

    prob = dl.predict_prob(fit, {"I1": 0.0, "I7": 0.0})
    assert 0.0 < prob < 1.0
    assert dl.classify_cutoff(0.9, 0.5) == "distressed"
    assert dl.classify_cutoff(0.1, 0.5) == "healthy"

    assert "McFadden R-squared" in fit.text()


def test_single_class_error():
    csv = dl.generate_synthetic(seed=3, n=20, distress_fraction=0.5)
    healthy_only_rows = []
    header, *rows = csv.splitlines()
    # keep only healthy companies (positive profit both years, no flags)
    by_company = {}
    for row in rows:
        by_company.setdefault(row.split(",")[0], []).append(row)
    for company, pair in by_company.items():
        if all(float(r.split(",")[3]) > 0 and r.split(",")[12] == "0" for r in pair):
            healthy_only_rows.extend(pair)
    csv_healthy = "\n".join([header] + healthy_only_rows) + "\n"
    with pytest.raises(dl.DistressError, match="SingleClassDataset"):
        dl.load_dataset(csv_healthy, require_both_labels=True)


def test_pipeline_roundtrip(tmp_path, corpus):
    input_path = tmp_path / "corpus.csv"
    input_path.write_text(corpus)
    report_json, warnings = dl.run_pipeline(
        str(input_path), str(tmp_path / "out"), analyses=["ratios", "pca", "logit"]
    )
    report = json.loads(report_json)
    assert "ratios" in report and "pca" in report and "logit" in report
    assert "cluster" not in report
    assert (tmp_path / "out" / "report.json").exists()
    assert (tmp_path / "out" / "logit_fit.json").exists()
