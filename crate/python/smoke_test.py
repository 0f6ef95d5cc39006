"""Smoke test for the sigcount Python extension.

Build and run from the repository root:

    cargo build -p sigcount-py --release --features extension-module
    cp target/release/libsigcount_py.so python/sigcount.so
    python3 python/smoke_test.py
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import numpy as np

import sigcount


def main():
    assert set(sigcount.METHODS) == {"aic", "mdl", "maic", "rmt", "srmt", "sns"}

    # one spike at its large-sample position above a flat bulk
    p, n = 50, 100
    eigs = [sigcount.spike_limit(15.0, 1.0, p / n)] + [1.0] * (p - 1)
    spec = sigcount.Spectrum(eigs, n)
    assert (spec.p, spec.n, len(spec)) == (p, n, p)
    for method in sigcount.METHODS:
        est = sigcount.estimate(spec, method)
        assert est.q_hat == 1, (method, est)
    trace = sigcount.estimate(spec, "sns").trace_csv()
    assert trace.startswith("k,l_k,") and len(trace.splitlines()) == 3

    fit = sigcount.estimate_noise(spec, 1)
    assert fit.converged and abs(fit.lambda_hat[0] - 15.0) < 1.5, fit

    # snapshots go through the same eigen-decomposition as numpy's
    rng = np.random.default_rng(4)
    x = rng.standard_normal((6, 40))
    x[0] *= 5.0
    from_rows = sigcount.Spectrum.from_snapshots(x.tolist())
    expected = np.sort(np.linalg.eigvalsh(x @ x.T / 40))[::-1]
    assert np.allclose(from_rows.eigenvalues, expected, rtol=1e-10, atol=1e-12)

    s = sigcount.tw_quantile(0.05)
    assert abs(sigcount.tw_cdf(s) - 0.95) < 1e-6
    assert abs(sigcount.detection_limit(1.0, 0.25) - 0.5) < 1e-15

    csv = sigcount.run_scenario("p = 20\nn = 40\nlambda = 5\ntrials = 20\nmethods = mdl, sns\n")
    lines = csv.strip().splitlines()
    assert lines[0].startswith("sweep_value,method") and len(lines) == 3

    for bad in (lambda: sigcount.Spectrum([1.0, -1.0], 10),
                lambda: sigcount.estimate(spec, "nope"),
                lambda: sigcount.run_scenario("width = 3\n")):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
