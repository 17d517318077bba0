"""Variational against exact free energy over a temperature grid (temperature.csv)."""
import sys

from _common import run

sys.exit(run([("temp-sweep", "temp_sweep_n2.yaml")], __doc__))
