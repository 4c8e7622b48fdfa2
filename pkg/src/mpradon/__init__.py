"""mpradon: multi-parameter singular Radon transform analysis.

Decides L^p boundedness for the two decidable curve families (translation
invariant on the line, left invariant on the first Heisenberg group),
constructs the explicit kernels and moment bump functions behind the
unboundedness examples, and reproduces the bounded/unbounded operator-norm
dichotomy numerically.
"""

__version__ = "0.1.0"
