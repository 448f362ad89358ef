"""Presentations drawn in the worked examples, shipped as .lg files."""

from importlib import resources

from ..graph import LabeledGraph, parse_lg

NAMES = ("ev2", "ev3", "ev4", "nr3", "nr3_krieger", "mx5", "mx5_follower", "ex1", "ex2")
FIGURES = ("ev2_gprime", "ev3_gprime", "ex1_underline", "ex1_gprime", "ex2_underline")


def text(name: str) -> str:
    base = resources.files(__name__)
    path = base / f"{name}.lg" if name in NAMES else base / "figures" / f"{name}.lg"
    return path.read_text(encoding="utf-8")


def load(name: str) -> LabeledGraph:
    return parse_lg(text(name))


def all_fixtures() -> dict[str, LabeledGraph]:
    return {n: load(n) for n in NAMES}
