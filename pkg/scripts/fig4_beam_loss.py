"""One-at-a-time beamforming-loss sweeps around the default angles on a 4x4 array."""
import sys

from kron3d.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "."
    sys.exit(main(["beam-loss", "--out", f"{out}/beam_loss.csv"]))
