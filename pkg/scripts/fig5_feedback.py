"""Limited-feedback comparison on a 2x2 array: 3+3-bit product codebook vs 6-bit joint codebook."""
import sys

from kron3d.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "."
    sys.exit(main(["feedback", "--m-elev", "2", "--n-az", "2", "--sigma", "1/12pi", "--xi", "1/36pi",
                   "--trials", "10000", "--out", f"{out}/feedback_2x2.csv"]))
