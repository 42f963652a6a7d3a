"""Per-decay entropy bookkeeping.

Each decay is decomposed into three entropy terms (internal change of the
node, transfer carried by the outgoing signal, and a constant vacuum
term), all in units of the Boltzmann constant. The production rate is
defined so that the duration of the entropy production process equals the
decay lifetime; ``entropy_lifetime`` recomputes that duration through the
rate rather than shortcutting, so the identity is checked numerically
instead of assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .constants import CONSTANTS, PhysicalConstants
from .errors import DuplicateEvent, NonPositiveEnergy
from .quantum import lifetime


@dataclass(frozen=True)
class EntropyBreakdown:
    """Three-way entropy split for one decay, in k_B units."""

    ds_internal: float
    ds_signal: float
    ds_vacuum: float

    def __post_init__(self) -> None:
        for name in ("ds_internal", "ds_signal", "ds_vacuum"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)}")

    def total(self) -> float:
        return self.ds_internal + self.ds_signal + self.ds_vacuum

    @property
    def is_admissible(self) -> bool:
        """True when the record respects the second law (total >= 0)."""
        return self.total() >= 0


@dataclass(frozen=True)
class EntropyModel:
    """Reservoir temperatures and vacuum offset supplying the magnitudes.

    The decomposition itself fixes only signs and structure; this model
    makes it concrete: the source loses delta_e at its own temperature,
    the environment gains it at the environment temperature, and the
    vacuum term is a constant knob.
    """

    source_temperature_k: float = 300.0
    environment_temperature_k: float = 3.0
    vacuum_term_kb: float = 0.0

    def __post_init__(self) -> None:
        if not self.source_temperature_k > 0:
            raise ValueError(f"source temperature must be > 0 K, got {self.source_temperature_k}")
        if not self.environment_temperature_k > 0:
            raise ValueError(
                f"environment temperature must be > 0 K, got {self.environment_temperature_k}"
            )


DEFAULT_ENTROPY_MODEL = EntropyModel()


@dataclass(frozen=True)
class EntropyLifetime:
    """Duration of the entropy production process for one decay.

    ``zero_entropy_change`` flags the degenerate case where the breakdown
    total is zero: the rate is undefined, and the duration falls back to
    the decay lifetime directly.
    """

    seconds: float
    zero_entropy_change: bool = False


@dataclass(frozen=True)
class EntropyLedgerEntry:
    """One ledger row: breakdown, lifetime, and production rate for a decay."""

    decay_event_id: int
    breakdown: EntropyBreakdown
    lifetime_s: float
    production_rate_kb_per_s: float


def breakdown_for_decay(
    delta_e_ev: float,
    model: EntropyModel,
    constants: PhysicalConstants = CONSTANTS,
) -> EntropyBreakdown:
    """Decompose the entropy change of one decay emitting ``delta_e_ev``.

    Internal term: -delta_e / (k_B * T_source). Signal term:
    +delta_e / (k_B * T_environment). Vacuum term: the model's constant.
    Raises NonPositiveEnergy for delta_e_ev <= 0.
    """
    if not delta_e_ev > 0:
        raise NonPositiveEnergy(f"decay energy must be > 0 eV, got {delta_e_ev}")
    kb = constants.k_b_ev_per_k
    return EntropyBreakdown(
        ds_internal=-delta_e_ev / (kb * model.source_temperature_k),
        ds_signal=delta_e_ev / (kb * model.environment_temperature_k),
        ds_vacuum=model.vacuum_term_kb,
    )


def entropy_lifetime(
    breakdown: EntropyBreakdown,
    gamma_ev: float,
    constants: PhysicalConstants = CONSTANTS,
) -> EntropyLifetime:
    """Duration of the entropy production process, computed through the rate.

    The production rate is taken constant across the decay, so the duration
    is total / rate with rate = total / lifetime(gamma). The round trip
    through the rate is deliberate: it verifies numerically that the
    entropy clock and the decay clock agree. A zero total makes the rate
    undefined; the decay lifetime is returned with a diagnostic flag.
    """
    tau = lifetime(gamma_ev, constants)
    total = breakdown.total()
    if total == 0:
        return EntropyLifetime(seconds=tau, zero_entropy_change=True)
    rate = total / tau
    return EntropyLifetime(seconds=total / rate)


class EntropyLedger:
    """Append-only record of entropy rows, keyed by decay event id.

    Single-writer: the engine owns it during a run. ``entries()`` hands out
    immutable snapshots that are safe to share afterwards.
    """

    def __init__(self, constants: PhysicalConstants = CONSTANTS):
        self._constants = constants
        self._entries: dict[int, EntropyLedgerEntry] = {}

    def record_decay(
        self,
        event_id: int,
        delta_e_ev: float,
        gamma_ev: float,
        model: EntropyModel,
    ) -> EntropyLedgerEntry:
        """Compose breakdown, lifetime, and rate into one row and append it.

        Raises DuplicateEvent if the event id was already recorded; rows are
        never mutated or removed. Second-law violations are recorded, not
        rejected: a bad entropy model should be visible, not fatal.
        """
        if event_id in self._entries:
            raise DuplicateEvent(f"decay event {event_id} already recorded")
        breakdown = breakdown_for_decay(delta_e_ev, model, self._constants)
        tau = lifetime(gamma_ev, self._constants)
        entry = EntropyLedgerEntry(
            decay_event_id=event_id,
            breakdown=breakdown,
            lifetime_s=tau,
            production_rate_kb_per_s=breakdown.total() / tau,
        )
        self._entries[event_id] = entry
        return entry

    def get(self, event_id: int) -> EntropyLedgerEntry | None:
        return self._entries.get(event_id)

    def entries(self) -> tuple[EntropyLedgerEntry, ...]:
        """Snapshot of all rows in recording order."""
        return tuple(self._entries.values())

    def violation_count(self) -> int:
        return sum(1 for e in self._entries.values() if not e.breakdown.is_admissible)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[EntropyLedgerEntry]:
        return iter(self.entries())
