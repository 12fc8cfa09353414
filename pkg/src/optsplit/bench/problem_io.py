"""JSON problem files.

An MDP file holds ``n_states``, ``n_actions``, ``gamma``, ``transition``
(nested s, a, s2) and ``reward`` (nested s, a). An option-set file holds
``options`` (each with ``policy`` and ``termination``) and ``mu``. A problem
file may carry both sets of keys at the top level.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..gating import MetaPolicy, OptionSpec
from ..mdp import Mdp, PolicyMatrix, require_valid


@dataclass(frozen=True, eq=False)
class Problem:
    mdp: Mdp
    options: list[OptionSpec] | None = None
    mu: MetaPolicy | None = None

    @property
    def has_options(self) -> bool:
        return self.options is not None


def options_to_dict(options, mu) -> dict:
    return {
        "options": [
            {"policy": w.policy.probs.tolist(), "termination": w.termination.tolist()}
            for w in options
        ],
        "mu": mu.probs.tolist(),
    }


def options_from_dict(data: dict) -> tuple[list[OptionSpec], MetaPolicy]:
    options = [
        OptionSpec(PolicyMatrix(np.asarray(o["policy"], dtype=float)),
                   np.asarray(o["termination"], dtype=float))
        for o in data["options"]
    ]
    return options, MetaPolicy(np.asarray(data["mu"], dtype=float))


def problem_to_dict(problem: Problem) -> dict:
    data = problem.mdp.to_dict()
    if problem.has_options:
        data.update(options_to_dict(problem.options, problem.mu))
    return data


def problem_from_dict(data: dict, validate: bool = True) -> Problem:
    mdp = Mdp.from_dict(data)
    if validate:
        require_valid(mdp)
    if "options" in data:
        options, mu = options_from_dict(data)
        return Problem(mdp, options, mu)
    return Problem(mdp)


def load_problem(path, options_path=None, validate: bool = True) -> Problem:
    """Read a problem file; with ``validate`` an invalid MDP raises ValueError."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise OSError(f"cannot read problem file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc
    if options_path is not None:
        data.update(json.loads(Path(options_path).read_text()))
    return problem_from_dict(data, validate)


def dump_problem(problem: Problem, path) -> None:
    Path(path).write_text(json.dumps(problem_to_dict(problem)))
