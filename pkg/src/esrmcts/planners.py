"""
NLU-MCTS and DMCTS: expectimax Monte Carlo tree search that applies the
utility function to cumulative (accrued + future) returns.

One planning iteration is Selection -> [Expansion] -> Simulation ->
Backpropagate. NLU-MCTS descends the tree with UCB; DMCTS descends by Thompson
sampling a bootstrap distribution kept at every chance node. Both execute the
action with the highest mean utility at the root.
"""

import logging
import math
from typing import Any, List

import numpy as np
from pydantic import BaseModel, model_validator

from esrmcts.bts import bts_new, bts_sample_mean, bts_update
from esrmcts.config import RunConfig
from esrmcts.core import (
    ContractViolationError,
    EnvironmentModel,
    HorizonOverrunError,
    ReturnLedger,
    ReturnVector,
    UsageError,
    add_returns,
    cumulative,
    zero_returns,
)
from esrmcts.tree import (
    ChanceNode,
    DecisionNode,
    SearchTree,
    best_child_ucb,
    update_stats,
)
from esrmcts.utility import UtilitySpec, eval_utility

logger = logging.getLogger(__name__)


class NluMcts(BaseModel):
    exploration: float = math.sqrt(2)
    model_config = {"frozen": True}

    @model_validator(mode="after")
    def validate_params(self):
        if self.exploration < 0:
            raise UsageError("The exploration constant C must be non-negative")
        return self


class Dmcts(BaseModel):
    replicates: int = 100
    alpha_init: float = 1.0
    beta_init: float = 1.0
    model_config = {"frozen": True}

    @model_validator(mode="after")
    def validate_params(self):
        if self.replicates < 1:
            raise UsageError("DMCTS needs at least one bootstrap replicate")
        if self.beta_init <= 0:
            raise UsageError("beta_init must be positive")
        return self


PlannerKind = NluMcts | Dmcts


def planner_kind(config: RunConfig) -> PlannerKind:
    if config.algorithm == "nlu-mcts":
        return NluMcts(exploration=config.exploration)
    return Dmcts(
        replicates=config.replicates,
        alpha_init=config.alpha_init,
        beta_init=config.beta_init,
    )


class EpisodeStep(BaseModel):
    state: Any
    action: int
    reward: List[float]


class EpisodeResult(BaseModel):
    trajectory: List[EpisodeStep]
    cumulative: List[float]
    utility: float
    iterations: List[int]

    def __str__(self) -> str:
        actions = " ".join(str(step.action) for step in self.trajectory)
        returns = ", ".join(f"{v:g}" for v in self.cumulative)
        return f"actions: {actions}\nreturns: [{returns}]\nutility: {self.utility:g}"


def new_tree(model: EnvironmentModel, reward_tolerance: float = 1e-9) -> SearchTree:
    state = model.initial_state()
    return SearchTree(
        root_state=state,
        num_actions=model.num_actions(state),
        n_objectives=model.n_objectives,
        terminal=model.is_terminal(state),
        reward_tolerance=reward_tolerance,
        exact_rewards=model.integer_rewards,
    )


def best_action(tree: SearchTree, node: DecisionNode) -> int:
    """Action whose chance node has the highest mean utility; ties go to the lowest action"""
    best, best_mean = None, -math.inf
    for child in tree.children(node):
        if child.visits == 0:
            continue
        if child.mean_utility > best_mean:
            best, best_mean = child.action, child.mean_utility
    if best is None:
        raise ContractViolationError(f"Decision node {node.node_id} has no visited children")
    return best


def thompson_select(tree: SearchTree, node: DecisionNode, rng: np.random.Generator) -> ChanceNode:
    best, best_sample = None, -math.inf
    for child in tree.children(node):
        if child.bts is None:
            raise ContractViolationError(
                f"Chance node {child.node_id} has no bootstrap distribution"
            )
        sample = bts_sample_mean(child.bts, rng)
        if sample > best_sample:
            best, best_sample = child, sample
    if best is None:
        raise ContractViolationError(f"Decision node {node.node_id} has no children")
    return best


def sample_outcome(
    tree: SearchTree,
    chance: ChanceNode,
    model: EnvironmentModel,
    future: ReturnVector,
    rng: np.random.Generator,
) -> tuple[DecisionNode, ReturnVector]:
    next_state, reward, terminal = model.step(chance.state, chance.action, rng)
    future = add_returns(future, reward)
    child, _ = tree.find_or_create_child(
        chance,
        next_state,
        reward,
        terminal=terminal,
        num_actions=0 if terminal else model.num_actions(next_state),
    )
    return child, future


def expansion(
    tree: SearchTree,
    node: DecisionNode,
    model: EnvironmentModel,
    future: ReturnVector,
    kind: PlannerKind,
    rng: np.random.Generator,
) -> tuple[DecisionNode, ReturnVector]:
    if not node.unexpanded:
        raise ContractViolationError(f"Decision node {node.node_id} has nothing to expand")
    action = node.unexpanded[rng.integers(len(node.unexpanded))]
    bts = None
    if isinstance(kind, Dmcts):
        bts = bts_new(kind.replicates, kind.alpha_init, kind.beta_init)
    chance = tree.add_chance(node, action, bts)
    return sample_outcome(tree, chance, model, future, rng)


def selection(
    tree: SearchTree,
    node: DecisionNode,
    future: ReturnVector,
    model: EnvironmentModel,
    kind: PlannerKind,
    rng: np.random.Generator,
) -> tuple[DecisionNode, ReturnVector]:
    """Descend until a terminal node, or expand the first node with an untried action"""
    while True:
        if node.terminal:
            return node, future
        if node.unexpanded:
            return expansion(tree, node, model, future, kind, rng)
        if isinstance(kind, Dmcts):
            chance = thompson_select(tree, node, rng)
        else:
            chance = best_child_ucb(tree, node, kind.exploration)
        node, future = sample_outcome(tree, chance, model, future, rng)


def simulate_rollout(
    node: DecisionNode,
    model: EnvironmentModel,
    future: ReturnVector,
    rng: np.random.Generator,
) -> ReturnVector:
    """Uniform random policy from ``node`` to a terminal state"""
    if node.terminal:
        return future
    state = node.state
    for _ in range(model.horizon):
        action = rng.integers(model.num_actions(state))
        state, reward, terminal = model.step(state, action, rng)
        future = add_returns(future, reward)
        if terminal:
            return future
    raise HorizonOverrunError(
        f"Rollout from {node.state} did not terminate within {model.horizon} steps"
    )


def backpropagate(
    tree: SearchTree,
    leaf: DecisionNode,
    returns: ReturnVector,
    spec: UtilitySpec,
    kind: PlannerKind,
    rng: np.random.Generator,
) -> float:
    """Credit u(R_t) to every chance node between ``leaf`` and the top of the tree.

    The cumulative return vector travels up the path and the utility is
    applied at each chance node. In a kept tree the path continues past the
    current root through the steps already executed in the episode.
    """
    leaf.visits += 1
    utility = math.nan
    node = leaf
    while node.parent is not None:
        chance = tree.chance(node.parent)
        parent = tree.decision(chance.parent)
        utility = eval_utility(spec, returns)
        update_stats(chance, parent, utility)
        if chance.bts is not None:
            bts_update(chance.bts, utility, rng)
        node = parent
    return utility


def plan(
    tree: SearchTree,
    model: EnvironmentModel,
    accrued: ReturnVector,
    iterations: int,
    kind: PlannerKind,
    spec: UtilitySpec,
    rng: np.random.Generator,
) -> int:
    """Run ``iterations`` planning iterations from the tree's root and return the best action"""
    root = tree.root
    if root.terminal:
        raise UsageError("Cannot plan from a terminal state")
    if iterations < 1:
        raise UsageError("Planning needs at least one iteration")

    for _ in range(iterations):
        future = zero_returns(model.n_objectives)
        leaf, future = selection(tree, root, future, model, kind, rng)
        future = simulate_rollout(leaf, model, future, rng)
        backpropagate(tree, leaf, add_returns(accrued, future), spec, kind, rng)

    return best_action(tree, root)


def run_episode(
    model: EnvironmentModel,
    kind: PlannerKind,
    spec: UtilitySpec,
    config: RunConfig,
    rng: np.random.Generator,
    env_rng: np.random.Generator | None = None,
    tree: SearchTree | None = None,
) -> EpisodeResult:
    """Plan and execute one episode from the initial state.

    Planning draws from ``rng``; executed actions draw from ``env_rng`` (``rng``
    when omitted). Passing a ``tree`` keeps it across episodes: it is re-rooted
    during the episode and restarted at its initial root afterwards.
    """
    env_rng = env_rng if env_rng is not None else rng
    persistent = tree is not None
    if tree is None:
        tree = new_tree(model, config.reward_tolerance)
    else:
        tree.restart()

    state = model.initial_state()
    ledger = ReturnLedger.start(model.n_objectives)
    trajectory: List[EpisodeStep] = []
    terminal = model.is_terminal(state)

    while not terminal:
        action = plan(tree, model, ledger.accrued, config.n_exec, kind, spec, rng)
        next_state, reward, terminal = model.step(state, action, env_rng)
        ledger.receive(reward)
        trajectory.append(EpisodeStep(state=state, action=action, reward=reward.tolist()))
        logger.debug("t=%d action=%d reward=%s", len(trajectory) - 1, action, reward)
        if len(trajectory) > model.horizon:
            raise HorizonOverrunError(
                f"Episode did not terminate within {model.horizon} steps"
            )
        tree.re_root(
            action,
            next_state,
            reward,
            terminal=terminal,
            num_actions=0 if terminal else model.num_actions(next_state),
            prune=not persistent,
        )
        state = next_state

    if persistent:
        tree.restart()

    returns = cumulative(ledger)
    return EpisodeResult(
        trajectory=trajectory,
        cumulative=returns.tolist(),
        utility=eval_utility(spec, returns),
        iterations=[config.n_exec] * len(trajectory),
    )
