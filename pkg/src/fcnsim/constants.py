"""Physical constants in the simulator's working units.

Energies are in eV, durations in seconds, wavelengths in nm, distances
in m, temperatures in K. CODATA 2018 values.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Fixed conversion factors; one instance is shared for a whole run."""

    hbar_ev_s: float = 6.582119569e-16
    hc_ev_nm: float = 1239.841984
    c_m_per_s: float = 2.99792458e8
    k_b_ev_per_k: float = 8.617333262e-5

    def __post_init__(self) -> None:
        for name in ("hbar_ev_s", "hc_ev_nm", "c_m_per_s", "k_b_ev_per_k"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


CONSTANTS = PhysicalConstants()
