"""Capacity samples for the ray model, full correlation and Kronecker model (16x16, 10^4 trials)."""
import sys

from kron3d.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "."
    sys.exit(main(["capacity", "--m-elev", "16", "--n-az", "16", "--trials", "10000", "--seed", "7",
                   "--snr-db", "0", "10", "20", "--workers", "4", "--out", f"{out}/capacity_16x16.csv"]))
