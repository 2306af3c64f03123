"""Named models: a shape family plus whichever counting routes apply to it."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import formulas
from .density import BlockSpec, builtin_block, load_block, validate_block
from .errors import UsageError
from .shapes import ShapeSpec, every_row_walls_shape, polyomino_shape, two_column_shape


@dataclass(frozen=True)
class Model:
    name: str
    description: str
    shape: Callable[..., ShapeSpec] | None = None
    formula: Callable[..., int] | None = None
    block: BlockSpec | None = None
    needs_m: bool = False
    min_n: int = 1

    def check_n(self, n: int, m: int | None = None):
        if n < self.min_n:
            raise UsageError(f"model {self.name} needs n >= {self.min_n}")
        if self.needs_m and (m is None or m < 1):
            raise UsageError(f"model {self.name} needs --m")

    def shape_for(self, n: int, m: int | None = None) -> ShapeSpec:
        if self.shape is None:
            raise UsageError(f"model {self.name} has no explicit shape; use the density method")
        self.check_n(n, m)
        return self.shape(n, m) if self.needs_m else self.shape(n)

    def formula_count(self, n: int, m: int | None = None) -> int:
        if self.formula is None:
            raise UsageError(f"model {self.name} has no closed-form count")
        self.check_n(n, m)
        return self.formula(n, m) if self.needs_m else self.formula(n)

    @property
    def methods(self) -> tuple[str, ...]:
        out = []
        if self.formula is not None:
            out.append("formula")
        if self.shape is not None or self.block is not None:
            out.append("oracle")
        if self.block is not None:
            out.append("density")
        return tuple(out)


def _two_col(pattern: str, description: str, name: str) -> Model:
    return Model(
        name,
        description,
        shape=lambda n: two_column_shape(n, pattern),
        formula=lambda n: formulas.two_col_intro_count(n, pattern),
    )


MODELS: dict[str, Model] = {
    "polyo-2nx3": Model(
        "polyo-2nx3",
        "2n x 3 tableau with outer-column walls at even heights, plus one cell below the middle column",
        shape=polyomino_shape,
        block=builtin_block("polyo-2nx3"),
        min_n=0,
    ),
    "nx2-no-walls": _two_col("no-walls", "n x 2 rectangle without walls", "nx2-no-walls"),
    "nx2-vertical-all": _two_col("vertical-everywhere", "n x 2 with a wall inside every row", "nx2-vertical-all"),
    "nx2-horizontal-all": _two_col(
        "horizontal-everywhere", "n x 2 with walls between all rows in both columns", "nx2-horizontal-all"
    ),
    "nx2-left-col": _two_col(
        "one-column-horizontal", "n x 2 with walls between all rows of the left column", "nx2-left-col"
    ),
    "nx2-walls-all": _two_col("walls-everywhere", "n x 2 with every edge a wall", "nx2-walls-all"),
    "nxm-rowwalls": Model(
        "nxm-rowwalls",
        "n x m with walls between all rows in every column but the last",
        shape=every_row_walls_shape,
        formula=formulas.every_row_walls_count,
        needs_m=True,
    ),
}


def get_model(name: str) -> Model:
    """A registered model, or an ad-hoc density model from a block JSON file."""
    if name in MODELS:
        return MODELS[name]
    path = Path(name)
    if path.suffix == ".json" and path.exists():
        try:
            block = load_block(path)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: not valid JSON ({exc})") from exc
        validate_block(block).raise_for_problems()
        return Model(str(path), f"density block from {path}", block=block, min_n=0)
    raise UsageError(f"unknown model {name!r}; choose from {sorted(MODELS)} or a block .json file")
