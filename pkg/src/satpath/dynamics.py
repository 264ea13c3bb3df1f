"""Win-stay, lose-shift dynamics over strategy profiles.

Each step keeps every satisfied player's strategy bitwise and resamples
the unsatisfied players according to an exploration policy.  Every
trajectory this produces is a satisficing path by construction, and
epsilon-Nash profiles are fixed points.

The default satisfaction tolerance here is looser (1e-6) than the path
constructor's internal one: continuous resampling never lands exactly on
a mixed equilibrium, so a strict tolerance would make mixed rest points
unreachable.  It is a knob, not a claim.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GameInputError
from .games import (
    Game,
    MixedStrategy,
    SatisfactionReport,
    StrategyProfile,
    _check_epsilon,
    _check_profile,
    random_profile,
    satisfaction_report,
)

EXPLORER_KINDS = ("dirichlet_uniform", "pure_uniform", "mixture_with_current")

#: Default satisfaction tolerance for the dynamics.
DYNAMICS_EPSILON = 1e-6

_SEED_MASK = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class ExplorerPolicy:
    """How an unsatisfied player picks its next strategy.

    dirichlet_uniform      draw uniformly from the player's simplex
    pure_uniform           jump to a uniformly random vertex
    mixture_with_current   blend the current strategy with a Dirichlet draw
                           using ``mixture_weight`` on the draw
    """

    kind: str = "dirichlet_uniform"
    mixture_weight: float = 0.5

    def __post_init__(self):
        if self.kind not in EXPLORER_KINDS:
            raise GameInputError(
                f"unknown explorer kind {self.kind!r}; choose from {EXPLORER_KINDS}"
            )
        if not 0.0 <= self.mixture_weight <= 1.0:
            raise GameInputError(
                f"mixture_weight must lie in [0, 1], got {self.mixture_weight!r}"
            )


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A simulated profile sequence with per-step satisfaction reports.

    ``hit_step`` is the 1-based index of the first epsilon-Nash profile, or
    None if the run stopped at the step cap without absorbing.
    """

    profiles: tuple[StrategyProfile, ...]
    reports: tuple[SatisfactionReport, ...]
    hit_step: int | None
    seed: int

    def __post_init__(self):
        if not self.profiles:
            raise GameInputError("a trajectory must contain at least one profile")
        if len(self.profiles) != len(self.reports):
            raise GameInputError("trajectory profiles and reports differ in length")
        if self.hit_step is not None:
            if not 1 <= self.hit_step <= len(self.profiles):
                raise GameInputError(f"hit_step {self.hit_step} out of range")
            report = self.reports[self.hit_step - 1]
            if report.max_gap > report.epsilon:
                raise GameInputError("hit_step does not index an epsilon-Nash profile")

    def __len__(self) -> int:
        return len(self.profiles)


def _explore(strategy: MixedStrategy, explorer: ExplorerPolicy, rng: np.random.Generator) -> MixedStrategy:
    count = strategy.num_actions
    if explorer.kind == "pure_uniform":
        return MixedStrategy.pure(count, int(rng.integers(count)))
    sample = rng.dirichlet(np.ones(count))
    if explorer.kind == "dirichlet_uniform":
        return MixedStrategy(sample)
    w = explorer.mixture_weight
    return MixedStrategy((1.0 - w) * strategy.probs + w * sample)


def _step_from_report(
    profile: StrategyProfile,
    report: SatisfactionReport,
    explorer: ExplorerPolicy,
    rng: np.random.Generator,
) -> StrategyProfile:
    if not report.unsatisfied:
        return profile
    strategies = list(profile.strategies)
    for i in sorted(report.unsatisfied):
        strategies[i] = _explore(strategies[i], explorer, rng)
    return StrategyProfile(tuple(strategies))


def satisficing_step(
    game: Game,
    profile: StrategyProfile,
    epsilon: float,
    explorer: ExplorerPolicy,
    rng: np.random.Generator,
) -> StrategyProfile:
    """One win-stay lose-shift update: satisfied players keep their strategies
    bitwise; unsatisfied players resample per the explorer (in ascending
    player order, which fixes the generator draw order)."""
    _check_profile(game, profile)
    report = satisfaction_report(game, profile, epsilon)
    return _step_from_report(profile, report, explorer, rng)


def run_dynamics(
    game: Game,
    x1: StrategyProfile,
    epsilon: float = DYNAMICS_EPSILON,
    max_steps: int = 1000,
    explorer: ExplorerPolicy | None = None,
    seed: int = 0,
) -> Trajectory:
    """Iterate satisficing steps from ``x1``, stopping at the first
    epsilon-Nash profile or once ``max_steps`` profiles have been emitted."""
    _check_profile(game, x1)
    epsilon = _check_epsilon(epsilon)
    if max_steps < 1:
        raise GameInputError(f"max_steps must be at least 1, got {max_steps}")
    explorer = explorer or ExplorerPolicy()
    seed = int(seed) & _SEED_MASK
    rng = np.random.default_rng(seed)
    profiles = [x1]
    reports = [satisfaction_report(game, x1, epsilon)]
    hit = 1 if reports[0].max_gap <= epsilon else None
    while hit is None and len(profiles) < max_steps:
        nxt = _step_from_report(profiles[-1], reports[-1], explorer, rng)
        profiles.append(nxt)
        reports.append(satisfaction_report(game, nxt, epsilon))
        if reports[-1].max_gap <= epsilon:
            hit = len(profiles)
    return Trajectory(
        profiles=tuple(profiles), reports=tuple(reports), hit_step=hit, seed=seed
    )


def batch_experiment(
    games,
    trials_per_game: int,
    epsilon: float = DYNAMICS_EPSILON,
    explorer: ExplorerPolicy | None = None,
    max_steps: int = 1000,
    master_seed: int = 0,
) -> list[dict]:
    """Run seeded independent trials of the dynamics on each game and
    aggregate hitting statistics.

    Trial t of game g derives its randomness from
    SeedSequence([master_seed, g, t]), so results depend only on the
    arguments; each trial draws its own initial profile uniformly from the
    product of simplices.  Returns one row per game with the hit frequency
    and the mean/median hitting time among hits.
    """
    epsilon = _check_epsilon(epsilon)
    if trials_per_game < 1:
        raise GameInputError(f"trials_per_game must be at least 1, got {trials_per_game}")
    explorer = explorer or ExplorerPolicy()
    master = int(master_seed) & _SEED_MASK
    rows: list[dict] = []
    for g, game in enumerate(games):
        if not isinstance(game, Game):
            raise GameInputError(f"games[{g}] is not a Game")
        hit_steps: list[int] = []
        for t in range(trials_per_game):
            root = np.random.SeedSequence([master, g, t])
            init_ss, run_ss = root.spawn(2)
            x1 = random_profile(game, np.random.default_rng(init_ss))
            run_seed = int(run_ss.generate_state(1, np.uint64)[0])
            trajectory = run_dynamics(game, x1, epsilon, max_steps, explorer, run_seed)
            if trajectory.hit_step is not None:
                hit_steps.append(trajectory.hit_step)
        rows.append(
            {
                "game": game.name or f"game-{g}",
                "game_index": g,
                "trials": trials_per_game,
                "hits": len(hit_steps),
                "hit_frequency": len(hit_steps) / trials_per_game,
                "mean_hit_step": float(np.mean(hit_steps)) if hit_steps else None,
                "median_hit_step": float(np.median(hit_steps)) if hit_steps else None,
            }
        )
    return rows
