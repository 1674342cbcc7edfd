"""Stability analysis and simulation of deformed Laplacian consensus.

Graphs can be given as a family spec (``"cycle:5"``, ``"mtree:2:3"``), a path to a
graph JSON file, or a ``dict`` holding a graph document.
"""

from __future__ import annotations

import json
from typing import Any, Mapping, Sequence, Union

import numpy as np

from . import _core
from ._core import DclError, Server

__all__ = [
    "DclError",
    "Server",
    "analyze",
    "builtin_scenarios",
    "classify_at",
    "family_spectrum",
    "format_report",
    "graph_document",
    "predicted_limit",
    "q_poly",
    "qep_eigenvalues",
    "run_scenario",
    "scenario_document",
    "spectrum",
    "sweep_threshold",
    "system_matrix",
]

GraphLike = Union[str, Mapping[str, Any]]


def _graph(graph: GraphLike) -> tuple[str, bool]:
    if isinstance(graph, str):
        return graph, False
    return json.dumps(dict(graph)), True


def analyze(graph: GraphLike, method: str = "auto") -> dict:
    """Stability report as a dict: stable/unstable intervals, marginal points, q(s)."""
    return json.loads(_core.analyze_json(*_graph(graph), method))


def format_report(report: Mapping[str, Any]) -> str:
    """Human-readable rendering of a report returned by :func:`analyze`."""
    return _core.format_report_json(json.dumps(dict(report)))


def graph_document(graph: GraphLike) -> dict:
    """Explicit edge-list document for any graph input."""
    return json.loads(_core.graph_json(*_graph(graph)))


def q_poly(graph: GraphLike) -> np.ndarray:
    """Coefficients of q(s) = det(-Delta(s)), constant term first."""
    return np.asarray(_core.q_poly(*_graph(graph)))


def classify_at(graph: GraphLike, s: float) -> str:
    return _core.classify_at(*_graph(graph), float(s))


def system_matrix(graph: GraphLike, s: float) -> np.ndarray:
    """The matrix -Delta(s) driving dx/dt = -Delta(s) x."""
    return _core.system_matrix(*_graph(graph), float(s))


def spectrum(graph: GraphLike, s: float) -> np.ndarray:
    return _core.spectrum(*_graph(graph), float(s))


def family_spectrum(spec: str, s: float) -> dict:
    """Closed-form eigenvalues (with multiplicities) for a named family."""
    return json.loads(_core.family_spectrum_json(spec, float(s)))


def sweep_threshold(graph: GraphLike, lo: float, hi: float, step: float = 0.01) -> float:
    """Parameter in [lo, hi] where the stability verdict changes."""
    return _core.sweep_threshold(*_graph(graph), float(lo), float(hi), float(step))


def qep_eigenvalues(graph: GraphLike) -> tuple[np.ndarray, int]:
    """Finite eigenvalues of the quadratic eigenproblem and the number of infinite ones."""
    finite, infinite = _core.qep_eigenvalues(*_graph(graph))
    return np.asarray(finite, dtype=complex), infinite


def predicted_limit(graph: GraphLike, s: float, x0: Sequence[float]) -> dict:
    return json.loads(_core.predicted_limit_json(*_graph(graph), float(s), np.asarray(x0, dtype=float)))


def builtin_scenarios() -> list[str]:
    return list(_core.builtin_scenario_names())


def scenario_document(name: str) -> dict:
    return json.loads(_core.builtin_scenario_json(name))


def run_scenario(scenario: Union[str, Mapping[str, Any]]) -> dict:
    """Run a built-in scenario by name or a scenario document.

    Returns ``times``, ``s_values`` and ``states`` arrays (one row per sample), the
    run ``status`` and the ``summary`` dict.
    """
    if isinstance(scenario, str):
        result = _core.run_scenario(scenario, False)
    else:
        result = _core.run_scenario(json.dumps(dict(scenario)), True)
    result["summary"] = json.loads(result["summary"])
    return result
