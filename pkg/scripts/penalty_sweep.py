"""Converged energy of the penalty method against the penalty strength mu (penalty.csv)."""
import sys

from _common import run

sys.exit(run([("penalty-sweep", "penalty_n2.yaml")], __doc__))
