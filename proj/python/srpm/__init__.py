"""Entangled prediction market simulator."""

from ._srpm import *  # noqa: F401,F403
from ._srpm import SrpmError, load_scenario, run_market

__all__ = ["SrpmError", "load_scenario", "run_market"]
