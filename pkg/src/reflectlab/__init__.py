"""Random walks reflected at their maximum: passage over power-law boundaries.

The package is organised as

* :mod:`reflectlab.distributions`: step laws with closed-form tails and moments;
* :mod:`reflectlab.walker`: exact path engine (reflection, passage, ladders);
* :mod:`reflectlab.criteria`: finiteness criteria and the classification tree;
* :mod:`reflectlab.validation`: martingale and distributional identity checks;
* :mod:`reflectlab.montecarlo`: reproducible passage-time experiments;
* :mod:`reflectlab.cli`: the ``reflectlab`` command.
"""

__version__ = "0.1.0"

from .criteria import classify  # noqa: E402
from .distributions import make_distribution  # noqa: E402
from .rng import RngStream, derive_stream  # noqa: E402
from .walker import Boundary, passage_time, simulate_path  # noqa: E402

__all__ = ["__version__", "classify", "make_distribution", "RngStream", "derive_stream",
           "Boundary", "passage_time", "simulate_path"]
