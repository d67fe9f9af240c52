#!/usr/bin/env python3
"""
Change-point detection CLI for fdpv-changepoint.

Examples
--------
# Piecewise-mean sample (reference configuration, N=5000, sigma=1)
python scripts/changepoints.py simulate mean -n 5000 --sigma 1 --seed 1 -o x.txt

# FDpV detection, with the hat function and the fitted means as plot data
python scripts/changepoints.py detect x.txt --method fdpv -A 300 --alpha 1e-4 \
    -o fdpv.json --emit-hat hat.csv --emit-fit fit.csv

# PLSC detection with the default penalty 2 sigma^2 ln N
python scripts/changepoints.py detect x.txt --method plsc -o plsc.json

# Score a result against the simulation's truth sidecar
python scripts/changepoints.py score fdpv.json x.txt.truth.json

# Piecewise Hurst path, log-squared wavelet coefficients at 1/a = 0.2, FDpV
python scripts/changepoints.py simulate hurst -n 20000 --boundaries 7000,14000 \
    --levels 0.55,0.7,0.55 -o fbm.txt
python scripts/changepoints.py wavelet fbm.txt --frequency 0.2 --wavelet daubechies-6 -o y.txt
python scripts/changepoints.py detect y.txt --pipeline wavelet -o y.json      # A=500, alpha=1e-11

# External record (e.g. interbeat intervals), mean removed first
python scripts/changepoints.py wavelet rr.txt --demean --frequency 0.2 -o rr_y.txt

# Monte-Carlo study and complexity sweep
python scripts/changepoints.py bench -m 200 -A 300 --jobs 4 -o report.json
python scripts/changepoints.py bench --no-monte-carlo --sweep 2000,4000,8000 -o sweep.json

Common flags
------------
-v / -vv           INFO / DEBUG logging on stderr.
--seed N           All randomness derives from this seed (default: 20090101).
"""

from fdpv_changepoint.cli import main

if __name__ == "__main__":
    main()
