"""Transitions, FIFO ring buffers and pooled minibatch sampling."""

from dataclasses import dataclass
from typing import Iterable, Iterator, List, Literal, NamedTuple

import numpy as np

from ..core.rng import Rng
from ..exceptions import ContractViolationError

Origin = Literal["prior", "online"]


class Transition(NamedTuple):
    obs: np.ndarray
    action: np.ndarray
    reward: float
    next_obs: np.ndarray
    timestep: int  # absolute 1-based env step count
    terminal: bool


@dataclass
class Batch:
    """Struct-of-arrays minibatch; ``is_prior`` marks rows drawn from prior data."""

    obs: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_obs: np.ndarray
    timesteps: np.ndarray
    terminals: np.ndarray
    is_prior: np.ndarray

    def __len__(self) -> int:
        return len(self.rewards)

    def with_rewards(self, rewards: np.ndarray) -> "Batch":
        return Batch(
            self.obs, self.actions, np.asarray(rewards, dtype=np.float64),
            self.next_obs, self.timesteps, self.terminals, self.is_prior,
        )

    def transitions(self) -> List[Transition]:
        return [
            Transition(self.obs[i], self.actions[i], float(self.rewards[i]), self.next_obs[i],
                       int(self.timesteps[i]), bool(self.terminals[i]))
            for i in range(len(self))
        ]


class ReplayBuffer:
    """Preallocated ring of transitions; eviction is strictly FIFO."""

    def __init__(self, capacity: int, obs_dim: int, action_dim: int, origin: Origin = "online"):
        if capacity < 1:
            raise ContractViolationError(f"capacity must be >= 1, got {capacity}")
        self.capacity = capacity
        self.obs_dim = obs_dim
        self.action_dim = action_dim
        self.origin = origin

        self.obs = np.zeros((capacity, obs_dim))
        self.actions = np.zeros((capacity, action_dim))
        self.rewards = np.zeros(capacity)
        self.next_obs = np.zeros((capacity, obs_dim))
        self.timesteps = np.zeros(capacity, dtype=np.int64)
        self.terminals = np.zeros(capacity, dtype=bool)
        self._ptr = 0
        self._size = 0

    @classmethod
    def from_transitions(
        cls, transitions: Iterable[Transition], obs_dim: int, action_dim: int, origin: Origin = "prior"
    ) -> "ReplayBuffer":
        items = list(transitions)
        buffer = cls(max(1, len(items)), obs_dim, action_dim, origin)
        for t in items:
            buffer.push(t)
        return buffer

    def push(self, t: Transition) -> None:
        obs = np.asarray(t.obs, dtype=np.float64)
        action = np.asarray(t.action, dtype=np.float64)
        next_obs = np.asarray(t.next_obs, dtype=np.float64)
        if obs.shape != (self.obs_dim,) or next_obs.shape != (self.obs_dim,) or action.shape != (self.action_dim,):
            raise ContractViolationError(
                f"transition dims obs={obs.shape} action={action.shape} next_obs={next_obs.shape} "
                f"do not match buffer ({self.obs_dim}, {self.action_dim})"
            )
        idx = self._ptr
        self.obs[idx] = obs
        self.actions[idx] = action
        self.rewards[idx] = t.reward
        self.next_obs[idx] = next_obs
        self.timesteps[idx] = t.timestep
        self.terminals[idx] = t.terminal
        self._ptr = (self._ptr + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def __len__(self) -> int:
        return self._size

    def _slots(self, positions: np.ndarray) -> np.ndarray:
        """Map insertion-order positions (0 = oldest kept) to ring slots."""
        if self._size < self.capacity:
            return positions
        return (self._ptr + positions) % self.capacity

    def _ordered_indices(self) -> np.ndarray:
        return self._slots(np.arange(self._size))

    def __iter__(self) -> Iterator[Transition]:
        for i in self._ordered_indices():
            yield self[i]

    def __getitem__(self, slot: int) -> Transition:
        """Transition stored in ring slot ``slot`` (not insertion order)."""
        return Transition(
            self.obs[slot].copy(), self.actions[slot].copy(), float(self.rewards[slot]),
            self.next_obs[slot].copy(), int(self.timesteps[slot]), bool(self.terminals[slot]),
        )

    def gather(self, slots: np.ndarray) -> Batch:
        return Batch(
            self.obs[slots], self.actions[slots], self.rewards[slots], self.next_obs[slots],
            self.timesteps[slots], self.terminals[slots],
            np.full(len(slots), self.origin == "prior"),
        )


def _concat(a: Batch, b: Batch) -> Batch:
    return Batch(*(np.concatenate([x, y]) for x, y in zip(
        (a.obs, a.actions, a.rewards, a.next_obs, a.timesteps, a.terminals, a.is_prior),
        (b.obs, b.actions, b.rewards, b.next_obs, b.timesteps, b.terminals, b.is_prior),
    )))


def sample_batch(prior: ReplayBuffer, online: ReplayBuffer, n: int, rng: Rng) -> Batch:
    """``n`` draws with replacement, uniform over the concatenation of both buffers."""
    n_prior, n_online = len(prior), len(online)
    total = n_prior + n_online
    if total == 0:
        raise ContractViolationError("cannot sample from two empty buffers")
    picks = rng.integers(total, size=n)
    from_prior = picks < n_prior
    batch_prior = prior.gather(prior._slots(picks[from_prior])) if n_prior else None
    batch_online = online.gather(online._slots(picks[~from_prior] - n_prior)) if n_online else None
    if batch_prior is None:
        return batch_online
    if batch_online is None:
        return batch_prior
    return _concat(batch_prior, batch_online)


def sample_from(buffer: ReplayBuffer, n: int, rng: Rng) -> Batch:
    """``n`` uniform draws with replacement from one buffer."""
    if len(buffer) == 0:
        raise ContractViolationError("cannot sample from an empty buffer")
    return buffer.gather(buffer._slots(rng.integers(len(buffer), size=n)))


def sample_with_quota(prior: ReplayBuffer, online: ReplayBuffer, n: int, n_prior: int, rng: Rng) -> Batch:
    """Exactly ``n_prior`` rows from ``prior`` followed by ``n - n_prior`` from ``online``."""
    if not 0 <= n_prior <= n:
        raise ContractViolationError(f"prior quota {n_prior} outside [0, {n}]")
    if n_prior == 0:
        return sample_from(online, n, rng)
    if n_prior == n:
        return sample_from(prior, n, rng)
    return _concat(sample_from(prior, n_prior, rng), sample_from(online, n - n_prior, rng))
