"""Empirical error against the certified bound.

Runs small sweeps through the same harness the acceptance tests use and
prints how tight the certified bound is as the noise level changes.  The
ratio empirical_error / predicted_bound must never exceed one.

    python demos/03_bound_sweep.py [out_dir]
"""

import sys

from sparsesep.experiments import ExperimentSpec, run_sweep

out_dir = sys.argv[1] if len(sys.argv) > 1 else None
for snr in (10, 20, 30, 40):
    spec = ExperimentSpec(m=32, d=32, n=32, k1=1, k2=1, snr_db=snr, trials=20,
                          dictionary_family="identity_plus_dct", tail=0.02, seed=5)
    sweep = run_sweep(spec)
    agg = sweep.aggregate()
    print(f"SNR {snr:2d} dB: certified {agg['certified']}/{agg['trials']}, "
          f"violations {agg['bound_violations']}, mean error {agg['mean_error']:.3e}, "
          f"mean ratio {agg['mean_ratio']:.3f}, max ratio {agg['max_ratio']:.3f}")
    if out_dir:
        sweep.write(f"{out_dir}/snr{snr}")
