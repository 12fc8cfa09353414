"""Seeded problem generators: random MDPs, random option sets, four-rooms."""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from ..gating import MetaPolicy, OptionSpec
from ..mdp import Mdp, PolicyMatrix


def gen_random_mdp(n: int, k: int, gamma: float, seed: int, sparsity: float = 1.0) -> Mdp:
    """Random MDP whose (s, a) rows each have ``ceil(sparsity * n)`` successors.

    Successor weights are uniform draws normalized to one; rewards are
    uniform in [0, 1]. Same arguments give bitwise-identical arrays.
    """
    if n < 1 or k < 1:
        raise ValueError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    if not 0.0 < sparsity <= 1.0:
        raise ValueError(f"sparsity must lie in (0, 1], got {sparsity}")
    rng = np.random.default_rng(seed)
    support = math.ceil(sparsity * n)
    transition = np.zeros((n, k, n))
    for s in range(n):
        for a in range(k):
            cols = rng.choice(n, size=support, replace=False)
            weights = rng.uniform(0.0, 1.0, size=support) + 1e-3
            transition[s, a, cols] = weights / weights.sum()
    reward = rng.uniform(0.0, 1.0, size=(n, k))
    return Mdp(transition, reward, gamma)


def _random_rows(rng, rows, cols):
    x = rng.uniform(0.0, 1.0, size=(rows, cols)) + 1e-3
    return x / x.sum(axis=1, keepdims=True)


def random_termination(rng, n: int) -> np.ndarray:
    """A termination profile from a mix of shapes, including hard 0/1 gates."""
    kind = rng.integers(4)
    if kind == 0:
        return rng.uniform(0.0, 1.0, size=n)
    if kind == 1:
        return (rng.uniform(size=n) < 0.3).astype(float)
    if kind == 2:
        return np.full(n, rng.uniform())
    return rng.uniform(0.0, 1.0, size=n) ** 3


def gen_random_options(mdp: Mdp, n_options: int, seed: int) -> tuple[list[OptionSpec], MetaPolicy]:
    """Random stochastic intra-option policies, terminations and ``mu``."""
    if n_options < 1:
        raise ValueError(f"need at least one option, got {n_options}")
    rng = np.random.default_rng(seed)
    n, k = mdp.n_states, mdp.n_actions
    options = [
        OptionSpec(PolicyMatrix(_random_rows(rng, n, k)), random_termination(rng, n))
        for _ in range(n_options)
    ]
    return options, MetaPolicy(_random_rows(rng, n, n_options))


def scalar_problem(gamma: float = 0.9, reward: float = 1.0, beta: float = 1.0):
    """One state, one action, one option: every model reduces to a scalar."""
    mdp = Mdp(np.ones((1, 1, 1)), np.full((1, 1), reward), gamma)
    option = OptionSpec(PolicyMatrix(np.ones((1, 1))), np.array([beta]))
    return mdp, [option], MetaPolicy(np.ones((1, 1)))


def two_state_chain(gamma: float = 0.5, beta: float = 1.0):
    """State 0 moves to the absorbing state 1; reward 0 then 1 per step."""
    transition = np.array([[[0.0, 1.0]], [[0.0, 1.0]]])
    mdp = Mdp(transition, np.array([[0.0], [1.0]]), gamma)
    option = OptionSpec(PolicyMatrix(np.ones((2, 1))), np.full(2, beta))
    return mdp, [option], MetaPolicy(np.ones((2, 1)))


# Interior 11x11 of the classic four-rooms map; '#' walls, 'H' hallways, 'G' goal.
FOUR_ROOMS_LAYOUT = (
    "#############",
    "#     #     #",
    "#     #     #",
    "#     H     #",
    "#     #     #",
    "#     #     #",
    "##H####     #",
    "#     ###H###",
    "#     #     #",
    "#     #     #",
    "#     H     #",
    "#     #    G#",
    "#############",
)

# up, down, left, right
MOVES = ((-1, 0), (1, 0), (0, -1), (0, 1))
SLIP = 0.9


def four_rooms_cells(layout=FOUR_ROOMS_LAYOUT):
    """Free cells in row-major order, plus the hallway cells and the goal."""
    cells, hallways, goal = [], [], None
    for i, row in enumerate(layout):
        for j, ch in enumerate(row):
            if ch == "#":
                continue
            cells.append((i, j))
            if ch == "H":
                hallways.append((i, j))
            elif ch == "G":
                goal = (i, j)
    return cells, hallways, goal


def _shortest_path_policy(cells, index, target, n_actions):
    """Uniform over the moves that strictly reduce grid distance to ``target``."""
    dist = {target: 0}
    queue = deque([target])
    while queue:
        i, j = queue.popleft()
        for di, dj in MOVES:
            nxt = (i + di, j + dj)
            if nxt in index and nxt not in dist:
                dist[nxt] = dist[(i, j)] + 1
                queue.append(nxt)
    probs = np.zeros((len(cells), n_actions))
    for s, (i, j) in enumerate(cells):
        best = [a for a, (di, dj) in enumerate(MOVES)
                if (i + di, j + dj) in dist and dist[(i + di, j + dj)] < dist[(i, j)]]
        if not best:
            best = list(range(n_actions))
        probs[s, best] = 1.0 / len(best)
    return PolicyMatrix(probs)


def gen_four_rooms(gamma: float = 0.9) -> tuple[Mdp, list[OptionSpec], MetaPolicy]:
    """Four-rooms gridworld with one hallway-seeking option per hallway.

    Moves succeed with probability 0.9 and otherwise slip uniformly to one
    of the other three directions; bumping into a wall leaves the agent in
    place. Entering the goal pays 1 and the goal is absorbing with zero
    reward afterwards. Every option follows shortest paths to its hallway
    and terminates with certainty on any hallway cell.
    """
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"gamma must lie in [0, 1), got {gamma}")
    cells, hallways, goal = four_rooms_cells()
    index = {c: s for s, c in enumerate(cells)}
    n, k = len(cells), len(MOVES)
    transition = np.zeros((n, k, n))
    for s, (i, j) in enumerate(cells):
        if (i, j) == goal:
            transition[s, :, s] = 1.0
            continue
        for a in range(k):
            for b, (di, dj) in enumerate(MOVES):
                p = SLIP if a == b else (1.0 - SLIP) / (k - 1)
                transition[s, a, index.get((i + di, j + dj), s)] += p
    g = index[goal]
    reward = transition[:, :, g].copy()
    reward[g, :] = 0.0
    mdp = Mdp(transition, reward, gamma)

    beta = np.zeros(n)
    beta[[index[h] for h in hallways]] = 1.0
    options = [OptionSpec(_shortest_path_policy(cells, index, h, k), beta) for h in hallways]
    return mdp, options, MetaPolicy.uniform(n, len(options))
