"""Exact pole-sum dynamics of a packet trapped between two barriers under a linear drive."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0"
