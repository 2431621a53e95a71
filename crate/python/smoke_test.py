"""Smoke test for the benflow Python module.

Build and install first:
    pip install maturin
    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/benflow-*.whl
"""

import math

import benflow


def main():
    ref = benflow.benford_reference()
    assert len(ref) == 9 and abs(sum(ref) - 1.0) < 1e-12
    assert abs(ref[0] - math.log10(2)) < 1e-15
    assert benflow.first_digit(4071) == 4

    hist = benflow.digit_histogram([0, 12, 150, 9, 0], "count")
    assert len(hist) == 10 and hist[0] == 0.4

    on_one = [1.0] + [0.0] * 8
    assert abs(benflow.metric("chi2", on_one) - 2.321928) < 1e-5
    assert benflow.anomaly_score("cosine", 1.0) == 0.0
    assert benflow.difference_sequence([100, 250, 40]) == [150, 210]
    assert benflow.windows(10, 4, 2) == [(0, 4), (2, 6), (4, 8), (6, 10)]
    assert benflow.label_window([True, False, True], 0, 3, 2)

    auc, points = benflow.roc_auc([0.9, 0.1, 0.5], [True, False, False])
    assert auc == 1.0 and points[0][1:] == (0.0, 0.0)

    ds = benflow.FlowDataset.generate(7, 20_000, (1, 7), [(8_000, 4_000, 1500)])
    assert len(ds) == 24_000 and ds.malicious_count == 4_000
    back = benflow.FlowDataset.from_csv(ds.to_csv())
    assert back.labels() == ds.labels()

    scores = benflow.run_detector(ds, window=1000, step=500, metric="chi2", tl=0.2)
    assert len(scores) == 47
    auc, _ = benflow.roc_auc([s["score"] for s in scores], [s["truth"] for s in scores])
    stats = benflow.divergence_stats([s["score"] for s in scores])
    print(f"{ds!r}: {len(scores)} windows, AUC {auc:.4f}, mean chi2 {stats['average']:.4f}")
    assert auc > 0.95

    try:
        benflow.run_detector(ds, window=0)
    except ValueError:
        pass
    else:
        raise AssertionError("window=0 must be rejected")
    try:
        benflow.FlowDataset.from_csv("not,a,flow,file\n")
    except benflow.BenflowError:
        pass
    else:
        raise AssertionError("bad header must be rejected")
    print("smoke test passed")


if __name__ == "__main__":
    main()
