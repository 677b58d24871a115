"""Bundled grid diagrams and certificates."""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import List

from ..grid import GridDiagram, parse_grid

GRIDS = ("unknot2", "unknot4a", "unknot4b", "trefoil5", "trefoil5-unknotted", "figure8-6")
PAIRS = (("unknot4a", "unknot4b"), ("trefoil5", "trefoil5-unknotted"))

DESCRIPTIONS = {
    "unknot2": "unknot, the 2x2 grid",
    "unknot4a": "unknot; cross-commutation partner of unknot4b (columns 1,2)",
    "unknot4b": "unknot; cross-commutation partner of unknot4a",
    "trefoil5": "right-handed trefoil",
    "trefoil5-unknotted": "unknot obtained from trefoil5 by swapping columns 1,2",
    "figure8-6": "figure-eight knot",
}


def directory() -> Path:
    return Path(str(resources.files(__name__)))


def names() -> List[str]:
    return list(GRIDS)


def path(name: str) -> Path:
    stem = name[:-5] if name.endswith(".grid") else name
    p = directory() / f"{stem}.grid"
    if not p.exists():
        p = directory() / name
    if not p.exists():
        raise KeyError(f"no catalog entry {name!r}")
    return p


def text(name: str) -> str:
    return path(name).read_text()


def load(name: str) -> GridDiagram:
    return parse_grid(text(name))


def certificate_path(name: str) -> Path:
    p = directory() / (name if name.endswith(".json") else f"{name}.json")
    if not p.exists():
        raise KeyError(f"no catalog certificate {name!r}")
    return p
