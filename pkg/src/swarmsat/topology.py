"""Neighborhood strategies for the swarm: global best, local-best ring,
von Neumann grid and an adaptive hierarchy tree.

A topology answers one question per particle per iteration: which particle's
personal best acts as the social attractor. All tie-breaks resolve to the
lowest particle index so runs are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .bpso import SwarmConfig, SwarmState


class TopologyKind(str, Enum):
    GLOBAL_BEST = "gbest"
    LOCAL_BEST_RING = "lbest"
    SQUARE_GRID = "grid"
    ADAPTIVE_HIERARCHY = "hierarchy"


@dataclass(frozen=True)
class TopologyOptions:
    """Tunable topology parameters; None picks the documented default."""

    grid_rows: int | None = None
    grid_cols: int | None = None
    start_degree: int = 15
    adapt_interval: int = 200
    min_degree: int = 2


def _argmax_pbest(indices, state) -> int:
    """Index with the highest pbest fitness; lowest index wins ties."""
    best = None
    best_fit = -1
    for i in indices:
        fit = state.particles[i].pbest_fitness
        if fit > best_fit:
            best = i
            best_fit = fit
    return best


def neighbor_best_gbest(state: "SwarmState") -> int:
    return _argmax_pbest(range(len(state.particles)), state)


def neighbor_best_ring(i: int, state: "SwarmState") -> int:
    n = len(state.particles)
    candidates = sorted({(i - 1) % n, i, (i + 1) % n})
    return _argmax_pbest(candidates, state)


def grid_neighbors(i: int, rows: int, cols: int) -> list[int]:
    """Cell i plus its von Neumann neighbors; the grid does not wrap, so
    boundary cells have fewer neighbors. Sorted ascending."""
    r, c = divmod(i, cols)
    cells = [i]
    if r > 0:
        cells.append(i - cols)
    if r < rows - 1:
        cells.append(i + cols)
    if c > 0:
        cells.append(i - 1)
    if c < cols - 1:
        cells.append(i + 1)
    return sorted(cells)


def neighbor_best_grid(i: int, state: "SwarmState", rows: int, cols: int) -> int:
    return _argmax_pbest(grid_neighbors(i, rows, cols), state)


def default_grid_shape(n: int) -> tuple[int, int]:
    """Nearest-to-square factorization rows x cols with rows <= cols."""
    rows = 1
    for d in range(1, int(n**0.5) + 1):
        if n % d == 0:
            rows = d
    return rows, n // rows


class HierarchyTree:
    """Rooted tree of particle indices in breadth-first array layout.

    Node j's parent is node (j - 1) // branch_degree, which is exactly the
    breadth-first fill where every node takes up to branch_degree children.
    node_to_particle[j] is the particle occupying node j.
    """

    def __init__(self, swarm_size: int, start_degree: int,
                 adapt_interval: int = 200, min_degree: int = 2):
        if swarm_size < 1:
            raise ValueError(f"swarm_size must be >= 1, got {swarm_size}")
        if start_degree < 2:
            raise ValueError(f"start_degree must be >= 2, got {start_degree}")
        if min_degree < 2:
            raise ValueError(f"min_degree must be >= 2, got {min_degree}")
        if adapt_interval < 1:
            raise ValueError(f"adapt_interval must be >= 1, got {adapt_interval}")
        self.size = swarm_size
        self.branch_degree = start_degree
        self.start_degree = start_degree
        self.adapt_interval = adapt_interval
        self.min_degree = min_degree
        self.node_to_particle = list(range(swarm_size))
        self._rebuild_depths()

    def _rebuild_depths(self) -> None:
        self.depth = [0] * self.size
        for j in range(1, self.size):
            self.depth[j] = self.depth[(j - 1) // self.branch_degree] + 1
        self.height = max(self.depth)
        self._particle_to_node = [0] * self.size
        for j, p in enumerate(self.node_to_particle):
            self._particle_to_node[p] = j

    def parent_node(self, node: int) -> int:
        return (node - 1) // self.branch_degree

    def node_of(self, particle: int) -> int:
        return self._particle_to_node[particle]

    def depth_of(self, particle: int) -> int:
        return self.depth[self._particle_to_node[particle]]

    def parent_particle(self, particle: int) -> int:
        """Occupant of the parent node; the root is its own parent."""
        node = self._particle_to_node[particle]
        if node == 0:
            return particle
        return self.node_to_particle[self.parent_node(node)]

    def swap_pass(self, state: "SwarmState") -> None:
        """Breadth-first over non-root nodes: promote any occupant whose
        pbest strictly beats its parent's. One comparison per node means a
        particle rises at most one level per pass."""
        occ = self.node_to_particle
        particles = state.particles
        for j in range(1, self.size):
            p = self.parent_node(j)
            if particles[occ[j]].pbest_fitness > particles[occ[p]].pbest_fitness:
                occ[j], occ[p] = occ[p], occ[j]
                self._particle_to_node[occ[j]] = j
                self._particle_to_node[occ[p]] = p

    def adapt_degree(self, state: "SwarmState") -> None:
        """Shrink the branching degree by one (not below min_degree) and
        refill the tree breadth-first with particles sorted best-first."""
        self.branch_degree = max(self.min_degree, self.branch_degree - 1)
        order = sorted(
            range(self.size),
            key=lambda p: (-state.particles[p].pbest_fitness, p),
        )
        self.node_to_particle = order
        self._rebuild_depths()


def hierarchy_init(swarm_size: int, start_degree: int,
                   adapt_interval: int = 200, min_degree: int = 2) -> HierarchyTree:
    return HierarchyTree(swarm_size, start_degree, adapt_interval, min_degree)


def neighbor_best_hierarchy(i: int, tree: HierarchyTree, state: "SwarmState") -> int:
    return tree.parent_particle(i)


def hierarchy_post_iteration(tree: HierarchyTree, state: "SwarmState", iteration: int) -> HierarchyTree:
    """Swap pass every iteration; degree adaptation at the end of every
    adapt_interval-th completed iteration."""
    tree.swap_pass(state)
    if (iteration + 1) % tree.adapt_interval == 0:
        tree.adapt_degree(state)
    return tree


def hierarchy_inertia(node_depth: int, tree_height: int,
                      w_start: float, w_floor: float) -> float:
    """Depth-linear inertia: the root runs exploitative at w_floor, the
    deepest level explorative at w_start."""
    span = max(1, tree_height)
    return w_start - (w_start - w_floor) * (tree_height - node_depth) / span


class Topology:
    """Strategy interface the solver iterates against."""

    kind: TopologyKind

    def neighbor_best(self, i: int, state: "SwarmState") -> int:
        raise NotImplementedError

    def inertia(self, i: int, state: "SwarmState", config: "SwarmConfig") -> float:
        from .bpso import inertia_at

        return inertia_at(state.iteration, config)

    def post_iteration(self, state: "SwarmState") -> None:
        pass


class GlobalBestTopology(Topology):
    kind = TopologyKind.GLOBAL_BEST

    def neighbor_best(self, i, state):
        return neighbor_best_gbest(state)


class RingTopology(Topology):
    kind = TopologyKind.LOCAL_BEST_RING

    def __init__(self, swarm_size: int):
        if swarm_size < 3:
            raise ValueError(f"ring needs at least 3 particles, got {swarm_size}")

    def neighbor_best(self, i, state):
        return neighbor_best_ring(i, state)


class GridTopology(Topology):
    kind = TopologyKind.SQUARE_GRID

    def __init__(self, swarm_size: int, rows: int | None = None, cols: int | None = None):
        if rows is None and cols is None:
            rows, cols = default_grid_shape(swarm_size)
        elif rows is None:
            rows = swarm_size // cols
        elif cols is None:
            cols = swarm_size // rows
        if rows * cols != swarm_size:
            raise ValueError(
                f"grid {rows}x{cols} does not hold {swarm_size} particles"
            )
        self.rows = rows
        self.cols = cols

    def neighbor_best(self, i, state):
        return neighbor_best_grid(i, state, self.rows, self.cols)


class HierarchyTopology(Topology):
    kind = TopologyKind.ADAPTIVE_HIERARCHY

    def __init__(self, swarm_size: int, start_degree: int = 15,
                 adapt_interval: int = 200, min_degree: int = 2):
        self.tree = hierarchy_init(swarm_size, start_degree, adapt_interval, min_degree)

    def neighbor_best(self, i, state):
        return neighbor_best_hierarchy(i, self.tree, state)

    def inertia(self, i, state, config):
        return hierarchy_inertia(
            self.tree.depth_of(i), self.tree.height, config.w_start, config.w_floor
        )

    def post_iteration(self, state):
        hierarchy_post_iteration(self.tree, state, state.iteration)


def make_topology(kind: TopologyKind | str, swarm_size: int,
                  options: TopologyOptions | None = None) -> Topology:
    kind = TopologyKind(kind)
    opts = options or TopologyOptions()
    if kind is TopologyKind.GLOBAL_BEST:
        return GlobalBestTopology()
    if kind is TopologyKind.LOCAL_BEST_RING:
        return RingTopology(swarm_size)
    if kind is TopologyKind.SQUARE_GRID:
        return GridTopology(swarm_size, opts.grid_rows, opts.grid_cols)
    return HierarchyTopology(
        swarm_size, opts.start_degree, opts.adapt_interval, opts.min_degree
    )
