"""Print exact ground and free energies and the physical-dimension count for N = 2, 3."""
import sys

from _common import run

sys.exit(run([("ed", "ed_n2.yaml"), ("ed", "ed_n3.yaml")], __doc__))
