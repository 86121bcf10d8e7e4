# app/domain/models/configuration.py
from __future__ import annotations

from typing import Dict, Hashable, Iterator, Tuple, Union

from pydantic import BaseModel, model_validator


class Configuration(BaseModel):
    """Plain-model configuration: agent i (1-based) is `agents[i - 1]`."""
    agents: Tuple[Hashable, ...]

    model_config = {"frozen": True}  # immutable = safe

    @property
    def size(self) -> int:
        return len(self.agents)

    def agent(self, i: int) -> Hashable:
        return self.agents[i - 1]

    def diagonal(self) -> Tuple[Hashable, ...]:
        return self.agents

    def replace(self, updates: Dict[int, Hashable]) -> "Configuration":
        agents = list(self.agents)
        for i, q in updates.items():
            agents[i - 1] = q
        return Configuration.model_construct(agents=tuple(agents))

    def canonical(self) -> "Configuration":
        """Agent-order-free representative (symmetry reduction)."""
        return Configuration.model_construct(agents=tuple(sorted(self.agents, key=repr)))


class MediatedConfiguration(BaseModel):
    """
    n x n matrix: (i, i) holds agent i's state, (i, j) holds agent i's side of
    edge {i, j}. Indices are 1-based in the accessors.
    """
    cells: Tuple[Tuple[Hashable, ...], ...]

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _check_square(self) -> "MediatedConfiguration":
        n = len(self.cells)
        if any(len(row) != n for row in self.cells):
            raise ValueError("mediated configuration must be a square matrix")
        return self

    @classmethod
    def build(cls, agents, side) -> "MediatedConfiguration":
        """Matrix with `agents` on the diagonal and `side(i, j)` elsewhere."""
        n = len(agents)
        rows = tuple(
            tuple(agents[i - 1] if i == j else side(i, j) for j in range(1, n + 1))
            for i in range(1, n + 1)
        )
        return cls.model_construct(cells=rows)

    @property
    def size(self) -> int:
        return len(self.cells)

    def agent(self, i: int) -> Hashable:
        return self.cells[i - 1][i - 1]

    def side(self, i: int, j: int) -> Hashable:
        return self.cells[i - 1][j - 1]

    def diagonal(self) -> Tuple[Hashable, ...]:
        return tuple(self.cells[i][i] for i in range(len(self.cells)))

    def off_diagonal(self) -> Iterator[Tuple[int, int, Hashable]]:
        n = len(self.cells)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i != j:
                    yield i, j, self.cells[i - 1][j - 1]

    def replace(self, updates: Dict[Tuple[int, int], Hashable]) -> "MediatedConfiguration":
        rows = [list(r) for r in self.cells]
        for (i, j), v in updates.items():
            rows[i - 1][j - 1] = v
        return MediatedConfiguration.model_construct(cells=tuple(tuple(r) for r in rows))


AnyConfiguration = Union[Configuration, MediatedConfiguration]
