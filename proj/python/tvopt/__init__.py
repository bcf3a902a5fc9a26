"""Streaming first-order optimization toolkit.

Python surface over the C++ core: proximal/projection primitives, the
problem-specific operations (robust PCA gradient, self-expressive
projection, consensus weights), batch solvers, tracking-error bounds and
the experiment harness (run_config / run_preset / report).
"""

try:
    from ._tvopt import *  # noqa: F401,F403
    from ._tvopt import __version__  # noqa: F401
except ImportError:  # in-tree builds put the extension on sys.path directly
    from _tvopt import *  # noqa: F401,F403
    from _tvopt import __version__  # noqa: F401
