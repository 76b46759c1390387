"""Shared exception types and the global node budget."""

from __future__ import annotations

import os

DEFAULT_NODE_BUDGET = 10 ** 6
NODE_BUDGET_ENV = "SIGNALGAMES_NODE_BUDGET"


def node_budget(override: int | None = None) -> int:
    """Resolve the node budget: explicit override, else env var, else default."""
    if override is not None:
        return override
    raw = os.environ.get(NODE_BUDGET_ENV)
    if raw is not None:
        try:
            return int(raw)
        except ValueError:
            raise GameModelError(f"invalid {NODE_BUDGET_ENV}: {raw!r}") from None
    return DEFAULT_NODE_BUDGET


class GameModelError(Exception):
    """Malformed game data or misuse of a model-level operation."""


class ParseError(GameModelError):
    """Game document cannot be parsed; carries a location string."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class UnknownIdError(ParseError):
    """A document refers to a state/action/signal id that was not declared."""


class UnsupportedStructureError(GameModelError):
    """Operation requires a signaling structure the spec does not have."""


class IncompleteStrategyError(GameModelError):
    """A strategy has no action distribution at a reachable view."""

    def __init__(self, player: int, view: tuple):
        self.player = player
        self.view = view
        super().__init__(f"player {player} strategy undefined at view {view!r}")


class BudgetExceededError(GameModelError):
    """Tree construction hit the node budget; reports the level reached."""

    def __init__(self, budget: int, level_reached: int):
        self.budget = budget
        self.level_reached = level_reached
        super().__init__(
            f"node budget {budget} exceeded while expanding level {level_reached}"
        )


class PreconditionError(GameModelError):
    """Solver invoked on a game outside its guaranteed class."""


class LPError(Exception):
    """Linear-programming failure (malformed input or pivot-limit abort)."""
