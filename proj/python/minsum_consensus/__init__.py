"""Consensus by min-sum splitting: graphs, spectra, protocols, experiment runs."""

try:
    from ._core import *  # noqa: F401,F403
except ImportError:
    # build-tree layout: the extension sits on PYTHONPATH next to this package
    from _core import *  # noqa: F401,F403
