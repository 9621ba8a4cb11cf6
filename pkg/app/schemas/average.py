# app/schemas/average.py
from typing import List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .lp_space import SparseVector

TagRule = Literal["left", "midpoint", "right", "random"]


class AverageSample(BaseModel):
    """Ave[f](s, t) together with its quasi-norm."""
    model_config = ConfigDict(frozen=True)

    s: float = Field(..., ge=0.0, le=1.0)
    t: float = Field(..., ge=0.0, le=1.0)
    value: SparseVector
    norm: float = Field(..., ge=0.0)


class TaggedPartition(BaseModel):
    """0 = u_0 < ... < u_N = 1 with tags xi_i in [u_{i-1}, u_i]."""
    model_config = ConfigDict(frozen=True)

    nodes: List[float]
    tags: List[float]

    @model_validator(mode='after')
    def validate_partition(self) -> "TaggedPartition":
        nodes, tags = self.nodes, self.tags
        if len(nodes) < 2:
            raise ValueError('A partition needs at least one subinterval')
        if nodes[0] != 0.0 or nodes[-1] != 1.0:
            raise ValueError('Partition nodes must start at 0 and end at 1')
        if len(tags) != len(nodes) - 1:
            raise ValueError(f'Expected {len(nodes) - 1} tags, got {len(tags)}')
        for i in range(1, len(nodes)):
            if not nodes[i - 1] < nodes[i]:
                raise ValueError(f'Nodes must be strictly increasing (index {i})')
            if not nodes[i - 1] <= tags[i - 1] <= nodes[i]:
                raise ValueError(f'Tag {tags[i - 1]} lies outside [{nodes[i - 1]}, {nodes[i]}]')
        return self

    @property
    def mesh(self) -> float:
        return float(np.max(np.diff(np.asarray(self.nodes))))

    @classmethod
    def uniform(cls, cells: int, tag: TagRule = "midpoint", seed: Optional[int] = None) -> "TaggedPartition":
        """Uniform partition into `cells` pieces; `random` tags are drawn from `seed`."""
        if cells < 1:
            raise ValueError('A uniform partition needs at least one cell')
        nodes = np.linspace(0.0, 1.0, cells + 1)
        left, right = nodes[:-1], nodes[1:]
        if tag == "left":
            tags = left
        elif tag == "right":
            tags = right
        elif tag == "midpoint":
            tags = (left + right) / 2.0
        else:
            rng = np.random.default_rng(seed)
            tags = left + rng.random(cells) * (right - left)
        return cls(nodes=nodes.tolist(), tags=tags.tolist())


class RiemannRow(BaseModel):
    mesh_exponent: int
    mesh: float
    cells: int
    norm: float


class BlowupRow(BaseModel):
    """Half-block witness pair (s_q, t_q) = (t_{q^2}, t_{q(q+1)})."""
    q: int
    s: float
    t: float
    norm: float
    predicted: float


class LipschitzEstimate(BaseModel):
    """Grid lower bounds for the Lipschitz quasi-norm of the primitive.

    `quotient` runs over every grid pair, `same_block_quotient` only over
    pairs lying in one block [t_{q(q-1)}, t_{q(q+1)}].
    """
    grid_points: int
    quotient: float
    span: List[float]
    same_block_quotient: float
