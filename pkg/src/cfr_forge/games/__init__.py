"""Benchmark game generators and canonical game specs."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..efg import GameError, GameTree, TreeStats
from .battleship import build_battleship
from .goofspiel import build_goofspiel
from .kuhn import build_kuhn
from .leduc import build_leduc
from .liars_dice import build_liars_dice

__all__ = [
    "GameSpec",
    "PAPER_SIZES",
    "build_battleship",
    "build_game",
    "build_goofspiel",
    "build_kuhn",
    "build_leduc",
    "build_liars_dice",
    "parse_game_spec",
]


@dataclass(frozen=True)
class GameSpec:
    family: str
    params: tuple[int, ...] = ()

    @property
    def name(self) -> str:
        if self.family == "leduc" and self.params == (3,):
            return "leduc"
        return "_".join([self.family, *map(str, self.params)])

    def build(self) -> GameTree:
        return _BUILDERS[self.family](*self.params)

    def __str__(self) -> str:
        return self.name


_BUILDERS = {
    "kuhn": build_kuhn,
    "leduc": build_leduc,
    "goofspiel": build_goofspiel,
    "liars_dice": build_liars_dice,
    "battleship": build_battleship,
}

_PATTERNS = [
    (re.compile(r"kuhn"), "kuhn", lambda m: ()),
    (re.compile(r"leduc(?:[:_](\d+))?"), "leduc", lambda m: (int(m[1]) if m[1] else 3,)),
    (re.compile(r"goofspiel[:_](\d+)"), "goofspiel", lambda m: (int(m[1]),)),
    (re.compile(r"liars_dice[:_](\d+)"), "liars_dice", lambda m: (int(m[1]),)),
    (re.compile(r"battleship[:_](\d+)[x_](\d+)[:_](\d+)"), "battleship",
     lambda m: (int(m[1]), int(m[2]), int(m[3]))),
]


def parse_game_spec(text: str) -> GameSpec:
    """Parse ``kuhn``, ``leduc``, ``leduc:5``, ``goofspiel:4``, ``liars_dice:5``,
    ``battleship:3x2:3`` (canonical names such as ``leduc_9`` are accepted too)."""
    s = text.strip().lower().replace("-", "_")
    for pattern, family, params in _PATTERNS:
        m = pattern.fullmatch(s)
        if m:
            spec = GameSpec(family, params(m))
            _check_params(spec)
            return spec
    raise GameError(f"unknown game spec {text!r}")


def _check_params(spec: GameSpec) -> None:
    p = spec.params
    if spec.family == "leduc" and p[0] < 3:
        raise GameError(f"leduc needs at least 3 ranks, got {p[0]}")
    if spec.family == "goofspiel" and not 3 <= p[0] <= 5:
        raise GameError(f"goofspiel supports 3..5 cards, got {p[0]}")
    if spec.family == "liars_dice" and not 2 <= p[0] <= 6:
        raise GameError(f"liar's dice supports 2..6 sides, got {p[0]}")
    if spec.family == "battleship" and min(p) < 1:
        raise GameError(f"invalid battleship parameters {p}")


def build_game(spec: str | GameSpec) -> GameTree:
    if isinstance(spec, str):
        spec = parse_game_spec(spec)
    return spec.build()


# Published sizes (histories, infosets, terminals, depth, max infoset size).
PAPER_SIZES: dict[str, TreeStats] = {
    name: TreeStats(*row)
    for name, row in {
        "kuhn": (58, 12, 30, 6, 2),
        "leduc": (9457, 936, 5520, 12, 5),
        "leduc_5": (55361, 2760, 32760, 12, 9),
        "leduc_9": (371809, 9288, 221544, 12, 17),
        "leduc_13": (1179777, 19656, 704600, 12, 25),
        "goofspiel_4": (1077, 162, 576, 7, 14),
        "goofspiel_5": (26931, 2124, 14400, 9, 46),
        "liars_dice_4": (8181, 1024, 4080, 12, 4),
        "liars_dice_5": (51181, 5120, 25575, 14, 5),
        "battleship_3_2_3": (732607, 81027, 552132, 9, 7),
        "battleship_4_3_2": (5462407, 58159, 4966176, 7, 17),
    }.items()
}
