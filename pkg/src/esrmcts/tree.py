"""
Expectimax search tree of alternating decision and chance nodes.

Nodes live in an arena keyed by integer id; parents hold child ids and each
node holds its parent's id, so re-rooting and pruning never create cycles of
object references.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List

import numpy as np

from esrmcts.bts import BtsDistribution
from esrmcts.core import ContractViolationError, ReturnVector, State

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class DecisionNode:
    node_id: int
    state: State
    reward: ReturnVector
    depth: int
    terminal: bool
    num_actions: int
    parent: int | None = None
    visits: int = 0
    children: Dict[int, int] = field(default_factory=dict)
    unexpanded: List[int] = field(default_factory=list)

    @property
    def fully_expanded(self) -> bool:
        return not self.unexpanded


@dataclass(slots=True)
class ChanceNode:
    node_id: int
    state: State
    action: int
    depth: int
    parent: int
    total_utility: float = 0.0
    visits: int = 0
    bts: BtsDistribution | None = None
    children: List[int] = field(default_factory=list)

    @property
    def mean_utility(self) -> float:
        return self.total_utility / self.visits


class SearchTree:
    def __init__(
        self,
        root_state: State,
        num_actions: int,
        n_objectives: int,
        terminal: bool = False,
        reward_tolerance: float = 1e-9,
        exact_rewards: bool = False,
    ):
        self.reward_tolerance = reward_tolerance
        self.exact_rewards = exact_rewards
        self._nodes: Dict[int, DecisionNode | ChanceNode] = {}
        self._next_id = 0
        root = self._new_decision(
            state=root_state,
            reward=np.zeros(n_objectives),
            depth=0,
            terminal=terminal,
            num_actions=num_actions,
            parent=None,
        )
        self.initial_root_id = root.node_id
        self.root_id = root.node_id

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, node_id: int) -> bool:
        return node_id in self._nodes

    @property
    def root(self) -> DecisionNode:
        return self._nodes[self.root_id]

    def node(self, node_id: int) -> DecisionNode | ChanceNode:
        return self._nodes[node_id]

    def decision(self, node_id: int) -> DecisionNode:
        return self._nodes[node_id]

    def chance(self, node_id: int) -> ChanceNode:
        return self._nodes[node_id]

    def children(self, node: DecisionNode) -> List[ChanceNode]:
        """Chance children ordered by action"""
        return [self._nodes[node.children[a]] for a in sorted(node.children)]

    def outcomes(self, chance: ChanceNode) -> List[DecisionNode]:
        return [self._nodes[i] for i in chance.children]

    def _allocate(self) -> int:
        node_id = self._next_id
        self._next_id += 1
        return node_id

    def _new_decision(self, state, reward, depth, terminal, num_actions, parent) -> DecisionNode:
        node = DecisionNode(
            node_id=self._allocate(),
            state=state,
            reward=reward,
            depth=depth,
            terminal=terminal,
            num_actions=0 if terminal else num_actions,
            parent=parent,
            unexpanded=[] if terminal else list(range(num_actions)),
        )
        self._nodes[node.node_id] = node
        return node

    def add_chance(
        self, node: DecisionNode, action: int, bts: BtsDistribution | None = None
    ) -> ChanceNode:
        if action in node.children:
            raise ContractViolationError(
                f"Decision node {node.node_id} already has a chance node for action {action}"
            )
        if action in node.unexpanded:
            node.unexpanded.remove(action)
        chance = ChanceNode(
            node_id=self._allocate(),
            state=node.state,
            action=action,
            depth=node.depth,
            parent=node.node_id,
            bts=bts,
        )
        self._nodes[chance.node_id] = chance
        node.children[action] = chance.node_id
        return chance

    def _rewards_match(self, a: ReturnVector, b: ReturnVector) -> bool:
        if self.exact_rewards:
            return bool(np.array_equal(a, b))
        return bool(np.all(np.abs(a - b) <= self.reward_tolerance))

    def find_or_create_child(
        self,
        node: ChanceNode,
        outcome_state: State,
        reward: ReturnVector,
        terminal: bool = False,
        num_actions: int = 0,
    ) -> tuple[DecisionNode, bool]:
        for child_id in node.children:
            child = self._nodes[child_id]
            if child.state == outcome_state and self._rewards_match(child.reward, reward):
                return child, False

        child = self._new_decision(
            state=outcome_state,
            reward=np.array(reward, dtype=np.float64),
            depth=node.depth + 1,
            terminal=terminal,
            num_actions=num_actions,
            parent=node.node_id,
        )
        node.children.append(child.node_id)
        return child, True

    def re_root(
        self,
        action: int,
        observed_state: State,
        observed_reward: ReturnVector,
        terminal: bool = False,
        num_actions: int = 0,
        prune: bool = False,
    ) -> DecisionNode:
        """Move the root to the outcome actually observed after executing ``action``.

        The matching subtree keeps its statistics. With ``prune`` every node
        outside the new root's subtree is dropped.
        """
        root = self.root
        chance_id = root.children.get(action)
        if chance_id is None:
            chance = self.add_chance(root, action)
        else:
            chance = self._nodes[chance_id]

        new_root, created = self.find_or_create_child(
            chance, observed_state, observed_reward, terminal, num_actions
        )
        logger.debug(
            "Re-rooting from %d to %d (action %d, %s child)",
            self.root_id,
            new_root.node_id,
            action,
            "new" if created else "existing",
        )
        self.root_id = new_root.node_id
        if prune:
            self._prune_to_root()
        return new_root

    def restart(self) -> DecisionNode:
        """Return to the initial-state root, keeping every statistic"""
        if self.initial_root_id not in self._nodes:
            raise ContractViolationError("The initial root was pruned from this tree")
        self.root_id = self.initial_root_id
        return self.root

    def subtree(self, node_id: int) -> Iterator[DecisionNode | ChanceNode]:
        stack = [node_id]
        while stack:
            node = self._nodes[stack.pop()]
            yield node
            if isinstance(node, DecisionNode):
                stack.extend(node.children[a] for a in sorted(node.children, reverse=True))
            else:
                stack.extend(reversed(node.children))

    def _prune_to_root(self) -> None:
        keep = {node.node_id: node for node in self.subtree(self.root_id)}
        self._nodes = keep
        self.root.parent = None

    def dump(self) -> str:
        """One line per node: id kind state action v N depth"""
        lines = []
        for node in self.subtree(self.root_id):
            if isinstance(node, DecisionNode):
                lines.append(
                    f"{node.node_id} decision {node.state} - - {node.visits} {node.depth}"
                )
            else:
                lines.append(
                    f"{node.node_id} chance {node.state} {node.action} "
                    f"{node.total_utility!r} {node.visits} {node.depth}"
                )
        return "\n".join(lines)


def ucb_score(child: ChanceNode, parent_visits: int, exploration: float) -> float:
    if child.visits == 0:
        raise ContractViolationError(
            f"Chance node {child.node_id} has no visits and cannot be scored"
        )
    return child.mean_utility + exploration * math.sqrt(math.log(parent_visits) / child.visits)


def best_child_ucb(tree: SearchTree, node: DecisionNode, exploration: float) -> ChanceNode:
    if not node.fully_expanded:
        raise ContractViolationError(
            f"Decision node {node.node_id} still has unexpanded actions {node.unexpanded}"
        )
    best, best_score = None, -math.inf
    for child in tree.children(node):
        score = ucb_score(child, node.visits, exploration)
        if score > best_score:
            best, best_score = child, score
    if best is None:
        raise ContractViolationError(f"Decision node {node.node_id} has no children")
    return best


def update_stats(chance: ChanceNode, decision: DecisionNode, utility: float) -> None:
    """Credit ``utility`` to ``chance`` and count a visit to its parent ``decision``"""
    chance.total_utility += utility
    chance.visits += 1
    decision.visits += 1
