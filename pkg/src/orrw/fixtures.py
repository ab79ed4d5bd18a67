"""Small graphs shipped with the package, with their usual start vertex."""
from __future__ import annotations

from importlib import resources

from .graphs import FiniteGraph, read_edge_file

STARTS = {
    "star3": "0",
    "path3": "0",
    "path4": "1",
    "triangle": "1",
    "star4": "0",
    "cycle4": "0",
    "lollipop": "0",
    "path5": "0",
}


def fixture_path(name: str):
    if name not in STARTS:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(STARTS)}")
    return resources.files("orrw") / "fixtures" / f"{name}.txt"


def fixture(name: str, start: str | None = None) -> FiniteGraph:
    with resources.as_file(fixture_path(name)) as p:
        return read_edge_file(p, STARTS[name] if start is None else start)
