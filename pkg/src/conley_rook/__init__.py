"""Combinatorial dynamics on cubical complexes.

From a wall labeling (or ramp-system parameters that induce one) the package
builds the multivalued models F0-F3, their Morse graphs with Conley indices
over GF(2), and connection matrices.
"""

from __future__ import annotations

from .blowup import *  # noqa: F401,F403
from .conley import *  # noqa: F401,F403
from .cubical import *  # noqa: F401,F403
from .dynamics import *  # noqa: F401,F403
from .pipeline import Analysis, analyze  # noqa: F401
from .ramp import *  # noqa: F401,F403
from .walls import *  # noqa: F401,F403

__version__ = "0.1.0"
