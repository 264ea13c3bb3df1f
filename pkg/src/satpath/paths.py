"""Satisficing paths: set algebra, constructive search, and verification.

A sequence of profiles is a satisficing path when any player best
responding at step t keeps its strategy at step t+1; unsatisfied players
may move arbitrarily.  Three nested candidate sets drive the
construction, all relative to a profile x:

    Access(x)  profiles differing from x only in unsatisfied players,
    NoB(x)     accessible profiles keeping every unsatisfied player
               unsatisfied (x itself always qualifies),
    Worse(x)   NoB profiles that additionally flip at least one
               satisfied player to unsatisfied.

The constructor repeatedly moves to a Worse profile, which strictly grows
the unsatisfied set, until either everyone is unsatisfied (then any
equilibrium is accessible in one jump) or no Worse profile can be found
(then freezing the satisfied players and solving the induced subgame
yields a full equilibrium, which is certified before being accepted).

Worse-emptiness is a universal statement over a continuum, so search
exhaustion is only presumptive; a failed certification escalates the
search budget tenfold, up to three times, before giving up.

Strategy equality along paths is bitwise on the stored probabilities:
the constructor copies satisfied strategies verbatim, so exact equality
is achievable and unambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import GameInputError, WorseSearchIncompleteError
from .games import (
    DEFAULT_EPSILON,
    Game,
    MixedStrategy,
    SatisfactionReport,
    StrategyProfile,
    _check_epsilon,
    _check_profile,
    _deviation_gap_raw,
    pure_action_payoffs,
    satisfaction_report,
)
from .solver import SolverConfig, find_nash, find_subgame_nash

STEP_KINDS = ("initial", "worse_step", "case1_jump", "case2_jump")

_MAX_ESCALATIONS = 3


@dataclass(frozen=True, eq=False)
class PathStep:
    """One profile along a path, how it was reached, and its satisfaction split."""

    profile: StrategyProfile
    kind: str
    report: SatisfactionReport

    def __post_init__(self):
        if self.kind not in STEP_KINDS:
            raise GameInputError(f"unknown step kind {self.kind!r}")


@dataclass(frozen=True, eq=False)
class SatisficingPath:
    """An ordered profile sequence ending, when construction succeeds, at an
    epsilon-Nash equilibrium.  ``escalations`` counts budget escalations the
    Worse search needed (0 for a clean run)."""

    steps: tuple[PathStep, ...]
    epsilon: float
    terminal_gap: float
    escalations: int = 0

    def __post_init__(self):
        if not self.steps:
            raise GameInputError("a path must contain at least one step")

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def profiles(self) -> tuple[StrategyProfile, ...]:
        return tuple(step.profile for step in self.steps)


@dataclass(frozen=True)
class WorseSearchConfig:
    """Budget and candidate-generation knobs for the Worse search.

    Candidates are tried in a low-entropy-first order: single-player pure
    deviations, then uniform-blend profiles over a small grid of mixing
    weights, then seeded joint Dirichlet resamples until the budget runs
    out.
    """

    budget: int = 5000
    xi_grid: tuple[float, ...] = (0.5, 0.1, 0.01)
    rng_seed: int = 0
    include_pure_candidates: bool = True

    def __post_init__(self):
        if self.budget < 1:
            raise GameInputError(f"budget must be at least 1, got {self.budget}")
        grid = tuple(float(x) for x in self.xi_grid)
        for x in grid:
            if not 0.0 < x < 1.0:
                raise GameInputError(f"xi grid values must lie in (0, 1), got {x}")
        object.__setattr__(self, "xi_grid", grid)


@dataclass(frozen=True)
class PathVerification:
    """Outcome of verify_path: pass/fail plus the first violation found."""

    ok: bool
    num_steps: int
    reason: str | None = None
    step: int | None = None
    player: int | None = None


def is_accessible(x: StrategyProfile, y: StrategyProfile, report_x: SatisfactionReport) -> bool:
    """Whether y differs from x only in players unsatisfied at x.

    Equality is bitwise on the stored probability vectors.
    """
    if len(x) != len(y):
        raise GameInputError(f"profiles cover {len(x)} and {len(y)} players")
    for i, (sx, sy) in enumerate(zip(x.strategies, y.strategies)):
        if sx.num_actions != sy.num_actions:
            raise GameInputError(f"player {i} strategies have mismatched sizes")
    return all(y[i] == x[i] for i in report_x.satisfied)


def _membership(
    game: Game, x: StrategyProfile, report_x: SatisfactionReport, y: StrategyProfile
) -> tuple[bool, bool]:
    """(in NoB(x), in Worse(x)) for a candidate y, given x's report."""
    if not is_accessible(x, y, report_x):
        return False, False
    report_y = satisfaction_report(game, y, report_x.epsilon)
    nob = report_x.unsatisfied <= report_y.unsatisfied
    worse = nob and report_x.unsatisfied < report_y.unsatisfied
    return nob, worse


def in_nob(game: Game, x: StrategyProfile, y: StrategyProfile, epsilon: float) -> bool:
    """Whether y is accessible from x and keeps every player unsatisfied at x
    unsatisfied at y."""
    _check_profile(game, x)
    _check_profile(game, y)
    report_x = satisfaction_report(game, x, epsilon)
    nob, _ = _membership(game, x, report_x, y)
    return nob


def in_worse(game: Game, x: StrategyProfile, y: StrategyProfile, epsilon: float) -> bool:
    """Whether y is in NoB(x) and flips at least one satisfied player, so the
    unsatisfied set strictly grows."""
    _check_profile(game, x)
    _check_profile(game, y)
    report_x = satisfaction_report(game, x, epsilon)
    _, worse = _membership(game, x, report_x, y)
    return worse


def build_w_xi(
    game: Game, x_k: StrategyProfile, report_k: SatisfactionReport, xi: float
) -> StrategyProfile:
    """Blend every unsatisfied player's strategy with the uniform one:
    (1 - xi) * current + xi * uniform.  Satisfied players are untouched, so
    the result is accessible from x_k, and unsatisfied players become fully
    mixed with every coordinate at least xi / num_actions."""
    _check_profile(game, x_k)
    xi = float(xi)
    if not 0.0 < xi <= 1.0:
        raise GameInputError(f"xi must lie in (0, 1], got {xi}")
    strategies = []
    for i, strategy in enumerate(x_k.strategies):
        if i in report_k.unsatisfied:
            c = game.action_counts[i]
            strategies.append(MixedStrategy((1.0 - xi) * strategy.probs + xi / c))
        else:
            strategies.append(strategy)
    return StrategyProfile(tuple(strategies))


def build_z_lambda(
    x_star: StrategyProfile,
    w_xi: StrategyProfile,
    unsat_set,
    x_k: StrategyProfile,
    lam: float,
) -> StrategyProfile:
    """Interpolate unsatisfied players between x_star (lam = 0) and w_xi
    (lam = 1); players outside ``unsat_set`` keep their x_k strategy."""
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise GameInputError(f"lambda must lie in [0, 1], got {lam}")
    if not len(x_star) == len(w_xi) == len(x_k):
        raise GameInputError("profiles cover different numbers of players")
    unsat = set(int(i) for i in unsat_set)
    for i in unsat:
        if not 0 <= i < len(x_k):
            raise GameInputError(f"unsatisfied player index {i} out of range")
    strategies = []
    for i in range(len(x_k)):
        if x_star[i].num_actions != w_xi[i].num_actions or x_star[i].num_actions != x_k[i].num_actions:
            raise GameInputError(f"player {i} strategies have mismatched sizes")
        if i in unsat:
            strategies.append(
                MixedStrategy((1.0 - lam) * x_star[i].probs + lam * w_xi[i].probs)
            )
        else:
            strategies.append(x_k[i])
    return StrategyProfile(tuple(strategies))


def indifference_poly(
    game: Game,
    x_star: StrategyProfile,
    w_xi: StrategyProfile,
    unsat_set,
    x_k: StrategyProfile,
    player: int,
    a: int,
    a_prime: int,
) -> np.ndarray:
    """Coefficients (ascending, length = num_players) of the payoff difference

        g(lam) = R_player(delta_a, z_lam^{-player}) - R_player(delta_a', ...)

    as a polynomial in the interpolation parameter.  The difference is a sum
    of products of at most n - 1 affine factors, so the degree is at most
    n - 1; g is evaluated at n equispaced nodes on [0, 1] and interpolated
    exactly.
    """
    _check_profile(game, x_k)
    n = game.num_players
    if not 0 <= player < n:
        raise GameInputError(f"player index {player} out of range")
    count = game.action_counts[player]
    for label, action in (("a", a), ("a_prime", a_prime)):
        if not 0 <= action < count:
            raise GameInputError(f"action {label}={action} out of range for {count} actions")
    if a == a_prime:
        raise GameInputError("the two actions to compare must differ")
    nodes = np.array([0.0]) if n == 1 else np.linspace(0.0, 1.0, n)
    values = []
    for lam in nodes:
        z = build_z_lambda(x_star, w_xi, unsat_set, x_k, float(lam))
        w = pure_action_payoffs(game, z, player)
        values.append(float(w[a]) - float(w[a_prime]))
    return npoly.polyfit(nodes, values, deg=len(nodes) - 1)


def zero_poly_check(coeffs, roots_observed, tolerance: float) -> bool:
    """Whether the observed roots force the polynomial to be identically zero:
    a degree-d polynomial vanishing at d + 1 distinct points is the zero
    polynomial.  True iff there are more distinct roots than the degree and
    the polynomial evaluates within ``tolerance`` of zero at each."""
    coeffs = np.asarray(coeffs, dtype=float)
    tolerance = float(tolerance)
    if tolerance < 0.0:
        raise GameInputError(f"tolerance must be nonnegative, got {tolerance}")
    nonzero = np.nonzero(coeffs)[0]
    degree = int(nonzero[-1]) if nonzero.size else 0
    roots = sorted({float(r) for r in roots_observed})
    if len(roots) <= degree:
        return False
    values = npoly.polyval(np.asarray(roots), coeffs)
    return bool(np.all(np.abs(values) <= tolerance))


def _worse_candidate_patches(
    game: Game, x: StrategyProfile, report: SatisfactionReport, config: WorseSearchConfig
):
    """Yield candidates as {unsatisfied player: new probability vector} patches,
    in the configured order: pure deviations, uniform blends, Dirichlet draws."""
    unsat = sorted(report.unsatisfied)
    if config.include_pure_candidates:
        for i in unsat:
            count = game.action_counts[i]
            for action in range(count):
                vec = np.zeros(count)
                vec[action] = 1.0
                if np.array_equal(vec, x[i].probs):
                    continue  # not a deviation
                yield {i: vec}
    for xi in config.xi_grid:
        yield {
            i: (1.0 - xi) * x[i].probs + xi / game.action_counts[i] for i in unsat
        }
    rng = np.random.default_rng(config.rng_seed & 0xFFFFFFFFFFFFFFFF)
    while True:
        yield {i: rng.dirichlet(np.ones(game.action_counts[i])) for i in unsat}


def find_worse_candidate(
    game: Game,
    x: StrategyProfile,
    epsilon: float = DEFAULT_EPSILON,
    config: WorseSearchConfig | None = None,
) -> StrategyProfile | None:
    """Search Access(x) for a member of Worse(x); None when the budget runs
    out (presumptive emptiness) or when Worse(x) is irrelevant because no
    player is satisfied, or trivially empty because none is unsatisfied."""
    _check_profile(game, x)
    epsilon = _check_epsilon(epsilon)
    config = config or WorseSearchConfig()
    report = satisfaction_report(game, x, epsilon)
    if not report.satisfied or not report.unsatisfied:
        return None
    base = [s.probs for s in x.strategies]
    unsat = sorted(report.unsatisfied)
    sat = sorted(report.satisfied)
    examined = 0
    for patch in _worse_candidate_patches(game, x, report, config):
        if examined >= config.budget:
            break
        examined += 1
        probs = list(base)
        for i, vec in patch.items():
            probs[i] = vec
        # candidates only move unsatisfied players, so accessibility holds by
        # construction; membership in Worse needs all previously unsatisfied
        # players to stay unsatisfied and some satisfied player to flip
        if any(_deviation_gap_raw(game, probs, i) <= epsilon for i in unsat):
            continue
        if not any(_deviation_gap_raw(game, probs, i) > epsilon for i in sat):
            continue
        return StrategyProfile(
            tuple(
                MixedStrategy(probs[i]) if i in patch else x[i]
                for i in range(game.num_players)
            )
        )
    return None


def construct_path(
    game: Game,
    x1: StrategyProfile,
    epsilon: float = DEFAULT_EPSILON,
    worse_config: WorseSearchConfig | None = None,
    solver_config: SolverConfig | None = None,
) -> SatisficingPath:
    """Build a satisficing path from ``x1`` to an epsilon-Nash equilibrium.

    While some player is satisfied and a Worse profile can be found, take
    it (each such step strictly grows the unsatisfied set, so there are at
    most n - 1 of them).  Then either every player is unsatisfied and any
    equilibrium is one accessible jump away, or the satisfied players are
    frozen and an equilibrium of the induced subgame is jumped to; the
    latter is certified against the full game, and a failed certification
    escalates the Worse-search budget tenfold (at most three times) before
    raising WorseSearchIncompleteError with the partial path.

    For the terminal certification to be meaningful, ``solver_config``'s
    tolerance should not exceed ``epsilon``; the defaults agree at 1e-9.
    """
    _check_profile(game, x1)
    epsilon = _check_epsilon(epsilon)
    worse_config = worse_config or WorseSearchConfig()
    solver_config = solver_config or SolverConfig()

    report = satisfaction_report(game, x1, epsilon)
    steps = [PathStep(profile=x1, kind="initial", report=report)]
    escalations = 0
    current, current_report = x1, report

    while current_report.max_gap > epsilon:
        if not current_report.satisfied:
            # Everyone is unsatisfied, so every profile is accessible.
            target = find_nash(game, solver_config)
            steps.append(
                PathStep(
                    profile=target,
                    kind="case1_jump",
                    report=satisfaction_report(game, target, epsilon),
                )
            )
            break
        search = replace(worse_config, budget=worse_config.budget * 10**escalations)
        candidate = find_worse_candidate(game, current, epsilon, search)
        if candidate is not None:
            candidate_report = satisfaction_report(game, candidate, epsilon)
            if not current_report.unsatisfied < candidate_report.unsatisfied:
                raise RuntimeError("worse candidate did not grow the unsatisfied set")
            steps.append(PathStep(profile=candidate, kind="worse_step", report=candidate_report))
            current, current_report = candidate, candidate_report
            continue
        # Presume Worse(current) is empty: freeze the satisfied players and
        # solve the game induced among the unsatisfied ones.
        frozen = {i: current[i] for i in sorted(current_report.satisfied)}
        target = find_subgame_nash(game, frozen, solver_config)
        target_report = satisfaction_report(game, target, epsilon)
        if target_report.max_gap <= epsilon:
            steps.append(PathStep(profile=target, kind="case2_jump", report=target_report))
            break
        # A previously satisfied player broke: the emptiness verdict was
        # false, so some Worse profile was missed.  Search harder.
        escalations += 1
        if escalations > _MAX_ESCALATIONS:
            raise WorseSearchIncompleteError(
                "worse search kept reporting empty, but the subgame jump is not "
                f"an equilibrium (max gap {target_report.max_gap:g} > {epsilon:g}) "
                f"after {_MAX_ESCALATIONS} budget escalations",
                partial_path=tuple(steps),
            )

    path = SatisficingPath(
        steps=tuple(steps),
        epsilon=epsilon,
        terminal_gap=steps[-1].report.max_gap,
        escalations=escalations,
    )
    check = verify_path(game, path, epsilon, require_terminal_nash=True, require_length_bound=True)
    if not check.ok:
        raise RuntimeError(f"constructed path failed verification: {check.reason}")
    return path


def _profiles_of(path) -> list[StrategyProfile]:
    if isinstance(path, SatisficingPath):
        return list(path.profiles)
    if hasattr(path, "profiles"):
        return list(path.profiles)
    return list(path)


def verify_path(
    game: Game,
    path,
    epsilon: float = DEFAULT_EPSILON,
    require_terminal_nash: bool = True,
    require_length_bound: bool = False,
) -> PathVerification:
    """Check the pairwise satisfaction constraint over a profile sequence.

    For every step t and player i with deviation gap at most ``epsilon`` at
    step t, the player's strategy must be bitwise unchanged at step t + 1.
    Optionally also require the final profile to be an epsilon-Nash
    equilibrium, and the length to be at most num_players + 1 (the
    constructor's worst case: an initial profile, at most n - 1
    Worse steps, and one jump).

    Accepts a SatisficingPath, a Trajectory, or any sequence of profiles.
    """
    profiles = _profiles_of(path)
    if not profiles:
        raise GameInputError("path must contain at least one profile")
    for p in profiles:
        _check_profile(game, p)
    epsilon = _check_epsilon(epsilon)
    for t in range(len(profiles) - 1):
        report = satisfaction_report(game, profiles[t], epsilon)
        for i in sorted(report.satisfied):
            if not profiles[t + 1][i] == profiles[t][i]:
                return PathVerification(
                    ok=False,
                    num_steps=len(profiles),
                    reason=(
                        f"player {i} is satisfied at step {t + 1} "
                        f"(gap {report.gaps[i]:.3g} <= {epsilon:g}) but changed strategy"
                    ),
                    step=t + 1,
                    player=i,
                )
    if require_terminal_nash:
        terminal = satisfaction_report(game, profiles[-1], epsilon)
        if terminal.max_gap > epsilon:
            worst = int(np.argmax(terminal.gaps))
            return PathVerification(
                ok=False,
                num_steps=len(profiles),
                reason=(
                    f"terminal profile is not an epsilon-Nash equilibrium: "
                    f"player {worst} has gap {terminal.max_gap:.3g} > {epsilon:g}"
                ),
                step=len(profiles),
                player=worst,
            )
    if require_length_bound and len(profiles) > game.num_players + 1:
        return PathVerification(
            ok=False,
            num_steps=len(profiles),
            reason=(
                f"path has {len(profiles)} steps, above the bound "
                f"{game.num_players + 1} for {game.num_players} players"
            ),
            step=len(profiles),
            player=None,
        )
    return PathVerification(ok=True, num_steps=len(profiles))
