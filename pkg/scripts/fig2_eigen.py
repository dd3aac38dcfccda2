"""Eigenvalue spectra of R and R_az kron R_el for the 4x4 moderate and 16x16 large-spread arrays."""
import sys

from kron3d.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "."
    code = main(["eig-compare", "--sigma", "1/12pi", "--xi", "1/36pi", "--out", f"{out}/eig_4x4_moderate.csv"])
    code = code or main(["eig-compare", "--m-elev", "16", "--n-az", "16", "--out", f"{out}/eig_16x16.csv"])
    sys.exit(code)
