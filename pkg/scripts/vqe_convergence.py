"""Energy and Gauss-violation traces of two-objective VQE for N = 2, 3 (curve.csv per run)."""
import sys

from _common import run

sys.exit(run([("vqe", "vqe_n2.yaml"), ("vqe", "vqe_n3.yaml")], __doc__))
