"""Binary particle swarm core: velocity updates with sigmoid binarization,
inertia scheduling, velocity clamping, stagnation-based convergence and the
guaranteed-convergence update for the swarm's best particle.

Every run owns a single PCG64 stream seeded from SwarmConfig.seed. Draw order
is fixed: at init, each particle in index order draws N position uniforms then
N velocity uniforms; during a step, each particle in index order draws its
velocity randoms (r1 then r2, or the single rho vector on the guaranteed-
convergence path) followed by N position-sampling uniforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .topology import Topology, TopologyKind, TopologyOptions, make_topology
from .wcnf import FitnessEvaluator, WcnfInstance

GC_RHO_MIN = 1e-6


@dataclass
class SwarmConfig:
    swarm_size: int = 30
    v_max: float = 4.0
    v_min: float = -4.0
    w_start: float = 0.9
    w_decrement: float = 0.0005
    w_floor: float = 0.4
    c1: float = 2.0
    c2: float = 2.0
    stagnation_window: int = 1500
    max_iterations: int = 100_000
    gc_enabled: bool = False
    gc_rho0: float = 1.0
    gc_success_threshold: int = 15
    gc_failure_threshold: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError(f"swarm_size must be >= 2, got {self.swarm_size}")
        if not self.v_min < self.v_max:
            raise ValueError(f"need v_min < v_max, got {self.v_min} >= {self.v_max}")
        if not 0 < self.w_floor <= self.w_start:
            raise ValueError(
                f"need 0 < w_floor <= w_start, got {self.w_floor}, {self.w_start}"
            )
        if self.stagnation_window < 1:
            raise ValueError(
                f"stagnation_window must be >= 1, got {self.stagnation_window}"
            )
        if self.gc_rho0 <= 0:
            raise ValueError(f"gc_rho0 must be positive, got {self.gc_rho0}")


@dataclass
class Particle:
    position: np.ndarray          # bool, length N
    velocity: np.ndarray          # float64, length N, clamped
    pbest_position: np.ndarray    # bool, length N
    pbest_fitness: int


@dataclass
class SwarmState:
    particles: list[Particle]
    global_best_position: np.ndarray
    global_best_fitness: int
    global_best_index: int
    iteration: int
    stagnation_counter: int
    gc_rho: float
    gc_successes: int
    gc_failures: int
    rng: np.random.Generator
    evaluator: FitnessEvaluator = field(repr=False, default=None)


@dataclass
class RunResult:
    best_fitness: int
    best_assignment: tuple[bool, ...]
    iterations_run: int
    converged: bool
    fitness_trace: list[tuple[int, int]]


def sigmoid(v: float) -> float:
    """Logistic function 1 / (1 + e^-v), mapping a velocity to a bit
    probability. Strictly increasing with sigmoid(-v) = 1 - sigmoid(v)."""
    if v >= 0:
        return 1.0 / (1.0 + math.exp(-v))
    e = math.exp(v)
    return e / (1.0 + e)


def inertia_at(iteration: int, config: SwarmConfig) -> float:
    """Linearly decaying inertia, floored so it never goes negative during
    the long stagnation tail."""
    return max(config.w_floor, config.w_start - config.w_decrement * iteration)


def velocity_update(particle: Particle, neighbor_best: np.ndarray, w: float,
                    config: SwarmConfig, rng: np.random.Generator) -> np.ndarray:
    """Canonical rule v' = w*v + c1*r1*(pbest - x) + c2*r2*(nbest - x) with
    fresh per-dimension uniforms, clamped to [v_min, v_max]. Boolean positions
    enter the arithmetic as 0.0 / 1.0."""
    n = particle.velocity.shape[0]
    if neighbor_best.shape[0] != n:
        raise ValueError(
            f"neighbor best has {neighbor_best.shape[0]} dims, particle has {n}"
        )
    r1 = rng.random(n)
    r2 = rng.random(n)
    x = particle.position.astype(np.float64)
    v = (
        w * particle.velocity
        + config.c1 * r1 * (particle.pbest_position.astype(np.float64) - x)
        + config.c2 * r2 * (neighbor_best.astype(np.float64) - x)
    )
    return np.clip(v, config.v_min, config.v_max)


def gc_velocity_update(best_particle: Particle, global_best: np.ndarray, w: float,
                       rho: float, config: SwarmConfig,
                       rng: np.random.Generator) -> np.ndarray:
    """Guaranteed-convergence rule for the global-best holder: reset toward
    the global best plus a rho-sized random probe, so the best particle keeps
    searching instead of stalling at zero velocity."""
    n = best_particle.velocity.shape[0]
    if global_best.shape[0] != n:
        raise ValueError(
            f"global best has {global_best.shape[0]} dims, particle has {n}"
        )
    r = rng.random(n)
    v = (
        global_best.astype(np.float64)
        - best_particle.position.astype(np.float64)
        + w * best_particle.velocity
        + rho * (1.0 - 2.0 * r)
    )
    return np.clip(v, config.v_min, config.v_max)


def gc_adapt_rho(state: SwarmState, improved: bool, config: SwarmConfig) -> None:
    """Track consecutive global-best successes/failures and double or halve
    the probe radius at the configured thresholds."""
    if improved:
        state.gc_successes += 1
        state.gc_failures = 0
    else:
        state.gc_failures += 1
        state.gc_successes = 0
    if state.gc_successes >= config.gc_success_threshold:
        state.gc_rho *= 2.0
        state.gc_successes = 0
    elif state.gc_failures >= config.gc_failure_threshold:
        state.gc_rho /= 2.0
        state.gc_failures = 0
    state.gc_rho = min(max(state.gc_rho, GC_RHO_MIN), config.v_max)


def position_update(velocity: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Resample every bit: bit_i = (u_i < sigmoid(v_i)) with fresh uniforms."""
    u = rng.random(velocity.shape[0])
    with np.errstate(over="ignore"):  # exp overflow to inf gives the right limit
        prob = 1.0 / (1.0 + np.exp(-velocity))
    return u < prob


def init_swarm(instance: WcnfInstance, config: SwarmConfig) -> SwarmState:
    """Uniform random swarm: each position bit true with probability 1/2,
    each velocity component uniform in [v_min, v_max], pbest = position."""
    rng = np.random.default_rng(config.seed)
    evaluator = FitnessEvaluator(instance)
    n = instance.num_vars
    particles = []
    for _ in range(config.swarm_size):
        bits = rng.random(n) < 0.5
        velocity = rng.uniform(config.v_min, config.v_max, n)
        fitness = evaluator(bits)
        particles.append(Particle(bits, velocity, bits.copy(), fitness))
    best_index = max(
        range(config.swarm_size), key=lambda i: (particles[i].pbest_fitness, -i)
    )
    best = particles[best_index]
    return SwarmState(
        particles=particles,
        global_best_position=best.pbest_position.copy(),
        global_best_fitness=best.pbest_fitness,
        global_best_index=best_index,
        iteration=0,
        stagnation_counter=0,
        gc_rho=min(max(config.gc_rho0, GC_RHO_MIN), config.v_max),
        gc_successes=0,
        gc_failures=0,
        rng=rng,
        evaluator=evaluator,
    )


def step(state: SwarmState, topology: Topology, instance: WcnfInstance,
         config: SwarmConfig) -> SwarmState:
    """Advance the swarm one iteration in place.

    Particles update in index order against live pbests. The global best,
    guaranteed-convergence bookkeeping, topology restructuring, iteration
    counter and stagnation counter all update after the particle pass.
    """
    if state.evaluator is None:
        state.evaluator = FitnessEvaluator(instance)
    evaluator = state.evaluator
    rng = state.rng
    for i, particle in enumerate(state.particles):
        w = topology.inertia(i, state, config)
        if config.gc_enabled and i == state.global_best_index:
            particle.velocity = gc_velocity_update(
                particle, state.global_best_position, w, state.gc_rho, config, rng
            )
        else:
            nb = state.particles[topology.neighbor_best(i, state)].pbest_position
            particle.velocity = velocity_update(particle, nb, w, config, rng)
        particle.position = position_update(particle.velocity, rng)
        fitness = evaluator(particle.position)
        if fitness > particle.pbest_fitness:
            particle.pbest_fitness = fitness
            particle.pbest_position = particle.position.copy()

    best_index = state.global_best_index
    best_fit = state.global_best_fitness
    for i, particle in enumerate(state.particles):
        if particle.pbest_fitness > best_fit:
            best_fit = particle.pbest_fitness
            best_index = i
    improved = best_fit > state.global_best_fitness
    if improved:
        state.global_best_fitness = best_fit
        state.global_best_index = best_index
        state.global_best_position = state.particles[best_index].pbest_position.copy()
    if config.gc_enabled:
        gc_adapt_rho(state, improved, config)
    topology.post_iteration(state)
    state.iteration += 1
    if improved:
        state.stagnation_counter = 0
    else:
        state.stagnation_counter = min(
            state.stagnation_counter + 1, config.stagnation_window
        )
    return state


def run(instance: WcnfInstance, topology_kind: TopologyKind | str | Topology,
        config: SwarmConfig | None = None,
        topology_options: TopologyOptions | None = None) -> RunResult:
    """Run the swarm until the global best stagnates for stagnation_window
    iterations (converged) or max_iterations is hit (not converged)."""
    config = config if config is not None else SwarmConfig()
    if isinstance(topology_kind, Topology):
        topology = topology_kind
    else:
        topology = make_topology(topology_kind, config.swarm_size, topology_options)
    state = init_swarm(instance, config)
    trace = [(0, state.global_best_fitness)]
    while (state.stagnation_counter < config.stagnation_window
           and state.iteration < config.max_iterations):
        before = state.global_best_fitness
        step(state, topology, instance, config)
        if state.global_best_fitness > before:
            trace.append((state.iteration, state.global_best_fitness))
    return RunResult(
        best_fitness=state.global_best_fitness,
        best_assignment=tuple(bool(b) for b in state.global_best_position),
        iterations_run=state.iteration,
        converged=state.stagnation_counter >= config.stagnation_window,
        fitness_trace=trace,
    )
