"""Gossip engine: one generation of model exchange and the send primitive.

A send pushes the sender's entire known model to one neighbor, packed into
fixed-size messages. Two transmission modes exist: fire-and-forget
(resend_threshold = 0) and acknowledged with a bounded retry budget.
Energy is charged to both ends of every send from E = v * i * t.

Reproducibility: every random decision draws from a stream keyed by
(master seed, generation, role), so a configuration and seed reproduce a
run bit-identically regardless of incidental iteration details.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .nodemodel import LocalModel, NodeState, accuracy
from .region import TemperatureField
from .topology import MeshGraph

STRATEGY_RANDOM = "random"
STRATEGY_LEAST_INTERACTED = "least-interacted"
STRATEGIES = (STRATEGY_RANDOM, STRATEGY_LEAST_INTERACTED)

# Stream tags keep the per-purpose RNG substreams disjoint.
_TAG_SHUFFLE = 0
_TAG_SELECT = 1
_TAG_SEND = 2


class ActivityConstraintError(RuntimeError):
    """A node's battery hit zero; the simulation run must stop."""

    def __init__(self, node_id: int):
        super().__init__(f"node {node_id} became inactive (0 J)")
        self.node_id = node_id


@dataclass(frozen=True)
class RadioConfig:
    data_rate_bps: float = 250_000.0
    data_message_bytes: int = 80
    ack_message_bytes: int = 5
    cell_record_bytes: int = 8

    def __post_init__(self) -> None:
        if min(self.data_rate_bps, self.data_message_bytes, self.ack_message_bytes,
               self.cell_record_bytes) <= 0:
            raise ValueError("all radio parameters must be positive")
        if self.cell_record_bytes > self.data_message_bytes:
            raise ValueError("cell_record_bytes must fit inside one data message")

    @property
    def records_per_message(self) -> int:
        return self.data_message_bytes // self.cell_record_bytes


@dataclass
class SendOutcome:
    num_successful: int
    total_messages: int
    sender_energy_j: float
    target_energy_j: float
    per_message_success: np.ndarray  # bool, one flag per unique message
    retries: int = 0


@dataclass
class SendRecord:
    generation: int
    sender: int
    target: int
    outcome: SendOutcome


@dataclass
class GenerationStats:
    round_index: int
    per_node_reliability: dict[int, float]
    per_node_energy_j: np.ndarray
    min_accuracy: float
    avg_accuracy: float
    max_accuracy: float


class SimStreams:
    """Derives independent RNG substreams from one master seed."""

    def __init__(self, master_seed: int):
        self.master_seed = int(master_seed)

    def _rng(self, *key: int) -> np.random.Generator:
        return np.random.default_rng([self.master_seed, *key])

    def shuffle(self, generation: int) -> np.random.Generator:
        return self._rng(generation, _TAG_SHUFFLE)

    def select(self, generation: int, node_id: int) -> np.random.Generator:
        return self._rng(generation, _TAG_SELECT, node_id)

    def send(self, generation: int, sender: int, target: int) -> np.random.Generator:
        return self._rng(generation, _TAG_SEND, sender, target)


def calculate_num_messages(num_cells: int, radio: RadioConfig) -> int:
    """Messages needed to carry num_cells records; zero cells need none."""
    if num_cells < 0:
        raise ValueError("num_cells must be >= 0")
    return math.ceil(num_cells * radio.cell_record_bytes / radio.data_message_bytes)


def message_send_time(count: int, size_bytes: int, radio: RadioConfig) -> float:
    """Air time in seconds for `count` messages of `size_bytes` each."""
    if count < 0:
        raise ValueError("count must be >= 0")
    return count * size_bytes * 8 / radio.data_rate_bps


def chunk_model(model: LocalModel, radio: RadioConfig) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Pack the known cells (row-major order) into message-sized chunks.

    Chunk i is what message i carries; the packing is deterministic so the
    per-message success flags of a send map back onto cells.
    """
    rows, cols, values = model.known_cells()
    per = radio.records_per_message
    return [
        (rows[i : i + per], cols[i : i + per], values[i : i + per])
        for i in range(0, len(rows), per)
    ]


def select_neighbors(
    node: NodeState, strategy: str, k: int, rng: np.random.Generator | None
) -> list[int]:
    """Pick the neighbors this node contacts this generation.

    least-interacted: take the first min(k, deg) of the rotating order and
    rotate the order k positions. random: uniform sample without replacement.
    """
    order = node.neighbor_order
    if strategy == STRATEGY_LEAST_INTERACTED:
        selected = order[:k] if len(order) > k else list(order)
        node.neighbor_order = order[k:] + order[:k]
        return selected
    if strategy == STRATEGY_RANDOM:
        if k >= len(order):
            return list(order)
        picks = rng.choice(len(order), size=k, replace=False)
        return [order[int(i)] for i in picks]
    raise ValueError(f"unknown strategy {strategy!r}")


def _check_active(node: NodeState) -> None:
    if not node.active:
        raise ActivityConstraintError(node.node_id)


def send_model(
    sender: NodeState, target: NodeState, radio: RadioConfig, rng: np.random.Generator
) -> SendOutcome:
    """One model transfer from sender to target, with energy accounting.

    resend_threshold = 0: every message is a single Bernoulli trial; the
    sender pays tx air time for all messages, the target rx air time for
    the delivered ones.

    resend_threshold > 0: delivery and acknowledgment are separate Bernoulli
    trials per message; unacknowledged messages are retried one at a time
    until acknowledged or the retry budget runs out. The sender pays tx for
    (messages + retries) data frames plus rx for received ACKs; the target
    pays rx for delivered data frames plus tx for the ACKs it sends.
    """
    rows, cols, values = sender.model.known_cells()
    per = radio.records_per_message
    num_messages = calculate_num_messages(len(rows), radio)
    retries = 0

    if sender.resend_threshold == 0:
        successful = rng.random(num_messages) < sender.message_send_success_rate
        num_successful = int(successful.sum())
        sender_energy = (
            sender.profile.voltage_v
            * sender.profile.tx_current_a
            * message_send_time(num_messages, radio.data_message_bytes, radio)
        )
        sender.consume_energy(sender_energy)
        _check_active(sender)
        target_energy = (
            target.profile.voltage_v
            * target.profile.rx_current_a
            * message_send_time(num_successful, radio.data_message_bytes, radio)
        )
        target.consume_energy(target_energy)
        _check_active(target)
    else:
        sent = rng.random(num_messages) < sender.message_send_success_rate
        acked = (rng.random(num_messages) < sender.ack_send_success_rate) & sent
        initial_sent = int(sent.sum())
        initial_acks = int(acked.sum())
        num_unsuccessful = num_messages - initial_acks
        additional_acks_sent = 0
        additional_acks_received = 0
        while num_unsuccessful > 0 and retries < sender.resend_threshold:
            retries += 1
            if rng.random() < sender.message_send_success_rate:
                additional_acks_sent += 1
                if rng.random() < sender.ack_send_success_rate:
                    additional_acks_received += 1
                    num_unsuccessful -= 1
                    acked[int(np.argmax(~acked))] = True  # first unacknowledged message
        sender_energy = (
            sender.profile.voltage_v
            * sender.profile.tx_current_a
            * message_send_time(num_messages + retries, radio.data_message_bytes, radio)
            + sender.profile.voltage_v
            * sender.profile.rx_current_a
            * message_send_time(initial_acks + additional_acks_received, radio.ack_message_bytes, radio)
        )
        sender.consume_energy(sender_energy)
        _check_active(sender)
        target_energy = (
            target.profile.voltage_v
            * target.profile.rx_current_a
            * message_send_time(initial_sent + additional_acks_sent, radio.data_message_bytes, radio)
            + target.profile.voltage_v
            * target.profile.tx_current_a
            * message_send_time(initial_acks + additional_acks_sent, radio.ack_message_bytes, radio)
        )
        target.consume_energy(target_energy)
        _check_active(target)
        successful = acked
        num_successful = int(acked.sum())

    if num_successful:
        keep = np.repeat(successful, per)[: len(rows)]
        target.model.absorb(rows[keep], cols[keep], values[keep])
    return SendOutcome(
        num_successful=num_successful,
        total_messages=num_messages,
        sender_energy_j=sender_energy,
        target_energy_j=target_energy,
        per_message_success=successful,
        retries=retries,
    )


def run_generation(
    nodes: list[NodeState],
    graph: MeshGraph,
    strategy: str,
    sharing_frequency: int,
    radio: RadioConfig,
    field: TemperatureField,
    epsilon_c: float,
    streams: SimStreams,
    round_index: int,
) -> tuple[GenerationStats, list[SendRecord]]:
    """One synchronous gossip round over all nodes, in shuffled order.

    Merges are visible within the round: a node processed late forwards
    everything it already received from earlier senders.
    """
    if sharing_frequency < 1:
        raise ValueError("sharing_frequency must be >= 1")
    n = len(nodes)
    energy = np.zeros(n)
    reliability: dict[int, float] = {}
    records: list[SendRecord] = []
    order = streams.shuffle(round_index).permutation(n)
    for idx in order:
        node = nodes[int(idx)]
        select_rng = (
            streams.select(round_index, node.node_id) if strategy == STRATEGY_RANDOM else None
        )
        selected = select_neighbors(node, strategy, sharing_frequency, select_rng)
        successfully_sent = 0
        total_sent = 0
        for neighbor_id in selected:
            target = nodes[neighbor_id]
            outcome = send_model(
                node, target, radio, streams.send(round_index, node.node_id, neighbor_id)
            )
            successfully_sent += outcome.num_successful
            total_sent += outcome.total_messages
            energy[node.node_id] += outcome.sender_energy_j
            energy[neighbor_id] += outcome.target_energy_j
            node.interaction_counts[neighbor_id] = node.interaction_counts.get(neighbor_id, 0) + 1
            target.interaction_counts[node.node_id] = (
                target.interaction_counts.get(node.node_id, 0) + 1
            )
            records.append(SendRecord(round_index, node.node_id, neighbor_id, outcome))
        if total_sent > 0:
            reliability[node.node_id] = successfully_sent / total_sent
    accuracies = [accuracy(node.model, field, epsilon_c) for node in nodes]
    return (
        GenerationStats(
            round_index=round_index,
            per_node_reliability=reliability,
            per_node_energy_j=energy,
            min_accuracy=min(accuracies),
            avg_accuracy=float(np.mean(accuracies)),
            max_accuracy=max(accuracies),
        ),
        records,
    )
