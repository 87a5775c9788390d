"""FCIT*: anytime informed search over fully connected sample graphs, with baseline planners and a benchmark harness."""

__version__ = "0.1.0"
