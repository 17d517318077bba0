"""Free-energy and Gauss-violation traces of two-objective VQT at T = 1 (curve.csv)."""
import sys

from _common import run

sys.exit(run([("vqt", "vqt_n2.yaml")], __doc__))
