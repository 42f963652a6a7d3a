"""Static causal-network description and analysis.

Nodes are two-level emitter/detector units placed in space; arcs are
directed signal channels with a propagation delay of distance over c.
Standard clocks attach to a host node and emit counted pulses. The
coupling classifier partitions nodes into collective groups (CENs, nodes
so close that signal transit is negligible against their lifetimes) and
sequential singletons (SENs, the classical step-by-step regime), with the
arcs between groups acting as sequential links.

The network is immutable once validated and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

from .constants import CONSTANTS, PhysicalConstants
from .errors import EmptyCen, StableConfiguration, ValidationFailed
from .quantum import EnergyLevel, TwoLevelSpec, lifetime, signal_energy

# Opaque identifiers; unique within one network/run.
NodeId = int
ArcId = int
EventId = int
PulseId = int
ExcitationId = int

# Fraction of the shorter lifetime that signal transit must stay under for
# two arc-joined nodes to count as collectively coupled.
DEFAULT_COUPLING_FRACTION = 0.01


@dataclass(frozen=True)
class ClockNode:
    """A two-level node at a position in space.

    With ``can_detect`` the node acts as a detector while in its ground
    state and becomes an emitter once excited; ``can_emit`` gates whether
    its decays launch signals on outgoing arcs. ``resonance_tolerance_ev``
    defaults to 1e-6 of the level gap: exact float resonance would be
    untestable.
    """

    id: NodeId
    spec: TwoLevelSpec
    position_m: tuple[float, float, float] = (0.0, 0.0, 0.0)
    resonance_tolerance_ev: float | None = None
    can_emit: bool = True
    can_detect: bool = True

    def __post_init__(self) -> None:
        if self.resonance_tolerance_ev is None:
            object.__setattr__(self, "resonance_tolerance_ev", 1e-6 * signal_energy(self.spec))
        if not (self.resonance_tolerance_ev >= 0 and math.isfinite(self.resonance_tolerance_ev)):
            raise ValueError(f"node {self.id}: resonance tolerance must be finite and >= 0")
        if not all(math.isfinite(x) for x in self.position_m):
            raise ValueError(f"node {self.id}: position must be finite")


@dataclass(frozen=True)
class StandardClockSpec:
    """Cyclic reference clock attached to a host node.

    ``id`` names the node the clock lives at; its pulses happen there.
    Pulse k carries counter ``counter_start + k`` at engine time
    ``first_tick_s + k * period_s``.
    """

    id: NodeId
    period_s: float
    first_tick_s: float = 0.0
    counter_start: int = 0

    def __post_init__(self) -> None:
        if not (self.period_s > 0 and math.isfinite(self.period_s)):
            raise ValueError(f"clock at node {self.id}: period must be finite and > 0 s")
        if not math.isfinite(self.first_tick_s):
            raise ValueError(f"clock at node {self.id}: first tick must be finite")

    def tick_time(self, k: int) -> float:
        # Single shared expression so engine pulses and extracted time
        # numbers agree bitwise.
        return self.first_tick_s + k * self.period_s


@dataclass(frozen=True)
class Arc:
    """Directed signal channel between two distinct nodes."""

    id: ArcId
    source: NodeId
    target: NodeId
    distance_m: float

    def __post_init__(self) -> None:
        if self.source == self.target:
            raise ValueError(f"arc {self.id}: source and target must differ")
        if not (self.distance_m >= 0 and math.isfinite(self.distance_m)):
            raise ValueError(f"arc {self.id}: distance must be finite and >= 0 m")


@dataclass(frozen=True)
class TrajectorySegment:
    """One source-arc-detector segment of a signal trajectory."""

    source: NodeId
    arc: ArcId
    detector: NodeId


class CouplingKind:
    """Class tags: CEN = collective excitation network, SEN = sequential."""

    CEN = "cen"
    SEN = "sen"


@dataclass(frozen=True)
class CouplingClass:
    """One element of the coupling partition.

    A CEN lists its member set (sorted); an SEN lists its nodes in order.
    Under the transit-versus-lifetime rule SEN classes are singletons: any
    two nodes fast enough to couple merge into a CEN instead.
    """

    kind: str
    members: tuple[NodeId, ...]


@dataclass(frozen=True)
class CouplingClassification:
    """Partition of all nodes plus the sequential links between classes."""

    classes: tuple[CouplingClass, ...]
    sen_links: tuple[ArcId, ...]

    def class_of(self, node: NodeId) -> CouplingClass:
        for cls in self.classes:
            if node in cls.members:
                return cls
        raise KeyError(node)


@dataclass(frozen=True)
class Network:
    """Validated, immutable network: nodes, arcs, and standard clocks."""

    nodes: tuple[ClockNode, ...]
    arcs: tuple[Arc, ...]
    clocks: tuple[StandardClockSpec, ...] = field(default_factory=tuple)

    @cached_property
    def node_by_id(self) -> dict[NodeId, ClockNode]:
        return {n.id: n for n in self.nodes}

    @cached_property
    def arc_by_id(self) -> dict[ArcId, Arc]:
        return {a.id: a for a in self.arcs}

    @cached_property
    def clock_by_node(self) -> dict[NodeId, StandardClockSpec]:
        return {c.id: c for c in self.clocks}

    @cached_property
    def outgoing(self) -> dict[NodeId, tuple[Arc, ...]]:
        """Outgoing arcs per node, sorted by arc id for reproducible fan-out."""
        out: dict[NodeId, list[Arc]] = {n.id: [] for n in self.nodes}
        for arc in self.arcs:
            out[arc.source].append(arc)
        return {nid: tuple(sorted(arcs, key=lambda a: a.id)) for nid, arcs in out.items()}


def validate_network(
    nodes: tuple[ClockNode, ...] | list[ClockNode],
    arcs: tuple[Arc, ...] | list[Arc] = (),
    clocks: tuple[StandardClockSpec, ...] | list[StandardClockSpec] = (),
) -> Network:
    """Cross-check the network description and return the immutable Network.

    Collects every problem (duplicate ids, dangling arc endpoints, clocks
    on unknown or doubly-clocked nodes) and raises ValidationFailed with
    the full list; an empty network is vacuously valid. Per-object
    invariants (finite positions, nonnegative distances, level ordering)
    are enforced by the constructors before this point.
    """
    problems: list[str] = []

    seen_nodes: set[NodeId] = set()
    for node in nodes:
        if node.id in seen_nodes:
            problems.append(f"duplicate node id {node.id}")
        seen_nodes.add(node.id)

    seen_arcs: set[ArcId] = set()
    for arc in arcs:
        if arc.id in seen_arcs:
            problems.append(f"duplicate arc id {arc.id}")
        seen_arcs.add(arc.id)
        for endpoint, role in ((arc.source, "source"), (arc.target, "target")):
            if endpoint not in seen_nodes:
                problems.append(f"arc {arc.id}: unknown {role} node {endpoint}")

    clocked: set[NodeId] = set()
    for clock in clocks:
        if clock.id not in seen_nodes:
            problems.append(f"clock declared at unknown node {clock.id}")
        if clock.id in clocked:
            problems.append(f"node {clock.id} carries more than one standard clock")
        clocked.add(clock.id)

    if problems:
        raise ValidationFailed(problems)
    return Network(nodes=tuple(nodes), arcs=tuple(arcs), clocks=tuple(clocks))


def propagation_delay(arc: Arc, constants: PhysicalConstants = CONSTANTS) -> float:
    """Signal transit time along an arc: distance / c, in seconds.

    This division is the single arithmetic step defining arrival times;
    absorption times downstream are exactly emission time plus this value.
    """
    return arc.distance_m / constants.c_m_per_s


def trajectory_segments(network: Network) -> tuple[TrajectorySegment, ...]:
    """All source-arc-detector segments present in the network."""
    return tuple(
        TrajectorySegment(source=a.source, arc=a.id, detector=a.target) for a in network.arcs
    )


def _node_lifetime(node: ClockNode, constants: PhysicalConstants) -> float:
    if node.spec.gamma_ev is None:
        return math.inf
    return lifetime(node.spec.gamma_ev, constants)


def classify_coupling(
    network: Network,
    coupling_fraction: float = DEFAULT_COUPLING_FRACTION,
    constants: PhysicalConstants = CONSTANTS,
) -> CouplingClassification:
    """Partition nodes into collective groups and sequential singletons.

    Two arc-joined nodes couple collectively when the signal transit time
    is under ``coupling_fraction`` of the shorter of their lifetimes
    (stable nodes count as infinitely long-lived). Connected components
    under that relation of size two or more are CENs; every remaining node
    is a sequential singleton. Arcs crossing class boundaries are the
    sequential links. Deterministic for a given network.
    """
    if not coupling_fraction > 0:
        raise ValueError(f"coupling fraction must be > 0, got {coupling_fraction}")

    parent: dict[NodeId, NodeId] = {n.id: n.id for n in network.nodes}

    def find(x: NodeId) -> NodeId:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: NodeId, b: NodeId) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    def coupled(arc: Arc) -> bool:
        src = network.node_by_id[arc.source]
        dst = network.node_by_id[arc.target]
        shorter = min(_node_lifetime(src, constants), _node_lifetime(dst, constants))
        return propagation_delay(arc, constants) < coupling_fraction * shorter

    for arc in network.arcs:
        if coupled(arc):
            union(arc.source, arc.target)

    groups: dict[NodeId, list[NodeId]] = {}
    for node in network.nodes:
        groups.setdefault(find(node.id), []).append(node.id)

    classes = tuple(
        CouplingClass(
            kind=CouplingKind.CEN if len(members) > 1 else CouplingKind.SEN,
            members=tuple(sorted(members)),
        )
        for _, members in sorted(groups.items())
    )
    sen_links = tuple(
        arc.id for arc in sorted(network.arcs, key=lambda a: a.id) if find(arc.source) != find(arc.target)
    )
    return CouplingClassification(classes=classes, sen_links=sen_links)


def cen_effective_spec(members: tuple[ClockNode, ...] | list[ClockNode]) -> TwoLevelSpec:
    """Collapse a collective group into one meta-node spec.

    A single member passes through unchanged. For larger groups the gap is
    the largest member gap and the decay rate is the sum of member rates,
    so the collective lifetime is shorter than any member's. Every member
    must have a decay channel.
    """
    members = tuple(members)
    if not members:
        raise EmptyCen("a collective group needs at least one member")
    for node in members:
        if node.spec.gamma_ev is None:
            raise StableConfiguration(f"node {node.id} has no decay channel")
    if len(members) == 1:
        return members[0].spec
    gap = max(signal_energy(n.spec) for n in members)
    gamma = sum(n.spec.gamma_ev for n in members)  # type: ignore[misc]
    return TwoLevelSpec(
        ground=EnergyLevel("cen-ground", 0.0),
        excited=EnergyLevel("cen-excited", gap),
        gamma_ev=gamma,
    )
