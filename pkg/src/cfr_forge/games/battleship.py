"""Two-player Battleship with one 1x2 ship each.

Players first place their ship in turn (player 0, then player 1); a placement
is private. They then alternate shots, player 0 first, ``shots`` each, never
firing twice at the same cell. A shot reveals water or hit to the shooter and
its location to the target. Sinking the opponent's ship ends the game: the
shooter scores +1 and the target -1. If all shots are spent without a sink
the game is drawn at 0.
"""

from __future__ import annotations

from ..efg import GameError, GameTree, TreeBuilder

SHIP_LENGTH = 2
WATER, HIT = 0, 1


def placements(rows: int, cols: int) -> list[tuple[tuple[int, int], ...]]:
    """Legal ship placements as tuples of cell indices, horizontal first."""
    out = []
    for r in range(rows):
        for c in range(cols - SHIP_LENGTH + 1):
            out.append(tuple(r * cols + c + k for k in range(SHIP_LENGTH)))
    for r in range(rows - SHIP_LENGTH + 1):
        for c in range(cols):
            out.append(tuple((r + k) * cols + c for k in range(SHIP_LENGTH)))
    return out


def build_battleship(rows: int = 3, cols: int = 2, shots: int = 3) -> GameTree:
    if rows < 1 or cols < 1 or shots < 1:
        raise GameError(f"invalid battleship parameters {(rows, cols, shots)}")
    ships = placements(rows, cols)
    if not ships:
        raise GameError(f"a {rows}x{cols} grid cannot hold a ship of length {SHIP_LENGTH}")
    if shots > rows * cols:
        raise GameError(f"{shots} shots exceed the {rows * cols} cells of the grid")
    b = TreeBuilder(f"battleship_{rows}_{cols}_{shots}")
    labels = tuple(f"place {s}" for s in ships)
    cells = rows * cols
    root = b.decision(-1, 0, 0, ("place",), len(ships), labels)
    for a0, ship0 in enumerate(ships):
        n1 = b.decision(root, a0, 1, ("place",), len(ships), labels)
        for a1, ship1 in enumerate(ships):
            _shoot(b, n1, a1, cells, shots, (ship0, ship1), ((), ()), (0, 0), ())
    return b.build()


def _shoot(b, parent, action, cells, shots, ships, fired, hits, log):
    """``log`` is the public-to-the-shooter event list ``(shooter, cell, hit)``."""
    player = len(log) % 2
    if len(fired[player]) == shots:
        b.terminal(parent, action, 0.0)
        return
    # A player sees own shots with their results and the opponent's shot cells.
    view = tuple((s, c, h if s == player else -1) for s, c, h in log)
    options = [c for c in range(cells) if c not in fired[player]]
    node = b.decision(parent, action, player, (ships[player], view), len(options),
                      tuple(f"shoot {c}" for c in options))
    target = ships[1 - player]
    for a, cell in enumerate(options):
        hit = cell in target
        new_hits = list(hits)
        if hit:
            new_hits[player] += 1
            if new_hits[player] == SHIP_LENGTH:
                b.terminal(node, a, 1.0 if player == 0 else -1.0)
                continue
        new_fired = list(fired)
        new_fired[player] = fired[player] + (cell,)
        _shoot(b, node, a, cells, shots, ships, tuple(new_fired), tuple(new_hits),
               log + ((player, cell, int(hit)),))
