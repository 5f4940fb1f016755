"""Weblog ranking engine: enhanced link graph, feature-weighted PageRank,
blind-search evaluation service and click-log scoring."""

__version__ = "0.1.0"
