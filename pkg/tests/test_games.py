import numpy as np
import pytest

from cfr_forge.efg import GameError, NodeKind, tree_stats, validate
from cfr_forge.engine import StrategyProfile
from cfr_forge.exploitability import exploitability
from cfr_forge.games import PAPER_SIZES, GameSpec, build_game, parse_game_spec
from cfr_forge.games.battleship import placements
from cfr_forge.games.goofspiel import TIE, _outcome
from cfr_forge.games.liars_dice import bid_met

FAST = ["kuhn", "leduc", "leduc_5", "goofspiel_4", "goofspiel_5", "liars_dice_4", "liars_dice_5"]
MEDIUM = ["leduc_9", "leduc_13", "battleship_3_2_3"]


@pytest.mark.parametrize("name", FAST)
def test_sizes_and_validity(name):
    tree = build_game(name)
    assert tree_stats(tree) == PAPER_SIZES[name]
    assert validate(tree) == []


@pytest.mark.parametrize("name", MEDIUM)
def test_sizes_medium(name):
    assert tree_stats(build_game(name)) == PAPER_SIZES[name]


@pytest.mark.parametrize("text, spec", [
    ("kuhn", GameSpec("kuhn")),
    ("leduc", GameSpec("leduc", (3,))),
    ("leduc:5", GameSpec("leduc", (5,))),
    ("leduc_9", GameSpec("leduc", (9,))),
    ("goofspiel:4", GameSpec("goofspiel", (4,))),
    ("liars_dice:5", GameSpec("liars_dice", (5,))),
    ("battleship:3x2:3", GameSpec("battleship", (3, 2, 3))),
    ("battleship_4_3_2", GameSpec("battleship", (4, 3, 2))),
])
def test_parse_game_spec(text, spec):
    assert parse_game_spec(text) == spec


def test_canonical_names():
    assert parse_game_spec("leduc:3").name == "leduc"
    assert parse_game_spec("leduc:9").name == "leduc_9"
    assert parse_game_spec("battleship:3x2:3").name == "battleship_3_2_3"


@pytest.mark.parametrize("text", ["chess", "leduc:2", "goofspiel:7", "liars_dice:9", "battleship:1x1:1"])
def test_bad_specs(text):
    with pytest.raises(GameError):
        build_game(text)


def test_every_kuhn_infoset_has_two_actions(kuhn):
    assert np.all(kuhn.infoset_num_actions == 2)


def test_deterministic_builds():
    a, b = build_game("goofspiel_4"), build_game("goofspiel_4")
    for attr in ("parent", "action", "kind", "player", "infoset", "payoff"):
        assert np.array_equal(getattr(a, attr), getattr(b, attr))


def test_kuhn_payoffs_raw(kuhn):
    raw = kuhn.payoff[kuhn.kind == NodeKind.TERMINAL] * kuhn.payoff_scale
    assert sorted(set(raw.tolist())) == [-2.0, -1.0, 1.0, 2.0]


def test_leduc_scale(leduc):
    # Two raises per round at 2 and 4 on top of the ante: 1 + 4 + 8.
    assert leduc.payoff_scale == 13.0


# Uniform-profile exploitability in raw units, cross-checked once against an
# independent implementation of the same rules.
@pytest.mark.parametrize("name, expected", [
    ("kuhn", 0.45833333333333326),
    ("leduc", 2.373611111111111),
    ("liars_dice_4", 0.6550595238095238),
    ("goofspiel_4", 0.7083333333333333),
])
def test_uniform_exploitability_reference(name, expected):
    tree = build_game(name)
    eps = exploitability(tree, StrategyProfile.uniform(tree)) * tree.payoff_scale
    assert eps == pytest.approx(expected, abs=1e-12)


def test_liars_dice_wild_face():
    # bid index = (quantity - 1) * sides + (face - 1)
    assert bid_met(1 * 4 + 0, (1, 4), 4)      # two 1s: the 4 is wild
    assert not bid_met(1 * 4 + 1, (1, 4), 4)  # two 2s: only one counts
    assert bid_met(0 * 4 + 3, (2, 3), 4) is False


def test_goofspiel_outcomes():
    assert _outcome(3, 1) == 0
    assert _outcome(1, 3) == 1
    assert _outcome(2, 2) == TIE


def test_battleship_placements():
    cells = placements(3, 2)
    assert len(cells) == 7
    assert all(len(p) == 2 for p in cells)
    assert len(placements(4, 3)) == 17
