"""Exact state-vector dynamics of the effective spin register.

Everything runs in the frame rotating with each spin's own precession
frequency, so a register evolves only under instantaneous resonant pulses
and the diagonal ZZ coupling.

Basis convention: amplitude index k holds spin i in bit i (little endian);
bit 0 is spin down (logical 0), bit 1 is spin up (logical 1). Bitstrings
are written spin 0 first, so "10" means spin 0 up, spin 1 down.
"""

from __future__ import annotations

from dataclasses import dataclass
import json
import math

import numpy as np

from .errors import DomainError
from .molecule import MoleculeSpec

NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SpinState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex, copy=True)
        n = int(round(math.log2(a.size))) if a.size else -1
        if a.ndim != 1 or n < 1 or 2**n != a.size:
            raise DomainError("amplitudes must be a vector of length 2^N, N >= 1")
        if abs(np.vdot(a, a).real - 1.0) > NORM_TOL:
            raise DomainError("state is not normalised")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def n(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @classmethod
    def basis(cls, index: int, n: int) -> "SpinState":
        a = np.zeros(2**n, dtype=complex)
        a[index] = 1.0
        return cls(a)

    @classmethod
    def from_bitstring(cls, bits: str) -> "SpinState":
        if not bits or set(bits) - {"0", "1"}:
            raise DomainError(f"invalid bitstring {bits!r}")
        return cls.basis(bitstring_to_index(bits), len(bits))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def bitstring_to_index(bits: str) -> int:
    return sum(1 << i for i, c in enumerate(bits) if c == "1")


def index_to_bitstring(index: int, n: int) -> str:
    return "".join("1" if index >> i & 1 else "0" for i in range(n))


@dataclass(frozen=True)
class PulseEvent:
    """Resonant rotation of spin ``target`` by ``angle`` (chi * t) with phase ``phase``."""

    target: int
    angle: float
    phase: float = 0.0

    def __post_init__(self):
        if self.angle < 0:
            raise DomainError("pulse angle must be non-negative")


@dataclass(frozen=True)
class DelayEvent:
    duration: float  # seconds

    def __post_init__(self):
        if self.duration < 0:
            raise DomainError("delay must be non-negative")


@dataclass(frozen=True, eq=False)
class PulseSchedule:
    events: tuple
    molecule: MoleculeSpec

    def __post_init__(self):
        events = tuple(self.events)
        object.__setattr__(self, "events", events)
        for ev in events:
            if isinstance(ev, PulseEvent):
                if not 0 <= ev.target < self.molecule.n:
                    raise DomainError(f"pulse target {ev.target} outside register of "
                                      f"{self.molecule.n} spins")
            elif not isinstance(ev, DelayEvent):
                raise DomainError(f"unknown schedule event {ev!r}")

    def __add__(self, other: "PulseSchedule") -> "PulseSchedule":
        if other.molecule is not self.molecule:
            raise DomainError("cannot join schedules for different molecules")
        return PulseSchedule(self.events + other.events, self.molecule)

    def __len__(self):
        return len(self.events)

    @property
    def pulses(self) -> list:
        return [e for e in self.events if isinstance(e, PulseEvent)]

    @property
    def delays(self) -> list:
        return [e for e in self.events if isinstance(e, DelayEvent)]

    @property
    def total_delay(self) -> float:
        return math.fsum(e.duration for e in self.delays)

    def to_list(self) -> list:
        out = []
        for e in self.events:
            if isinstance(e, PulseEvent):
                out.append({"type": "pulse", "target": int(e.target),
                            "angle_rad": float(e.angle), "phase_rad": float(e.phase)})
            else:
                out.append({"type": "delay", "seconds": float(e.duration)})
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_list(), **kwargs)

    @classmethod
    def from_list(cls, items, molecule: MoleculeSpec) -> "PulseSchedule":
        events = []
        for k, item in enumerate(items):
            kind = item.get("type") if isinstance(item, dict) else None
            if kind == "pulse" and set(item) == {"type", "target", "angle_rad", "phase_rad"}:
                events.append(PulseEvent(int(item["target"]), float(item["angle_rad"]),
                                         float(item["phase_rad"])))
            elif kind == "delay" and set(item) == {"type", "seconds"}:
                events.append(DelayEvent(float(item["seconds"])))
            else:
                raise DomainError(f"schedule event {k} is malformed: {item!r}")
        return cls(tuple(events), molecule)

    @classmethod
    def from_json(cls, text: str, molecule: MoleculeSpec) -> "PulseSchedule":
        items = json.loads(text)
        if not isinstance(items, list):
            raise DomainError("a schedule must be a JSON array of events")
        return cls.from_list(items, molecule)


def pulse_matrix(angle: float, phase: float) -> np.ndarray:
    """2x2 rotation in the (down, up) basis."""
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -1j * np.exp(1j * phase) * s],
                     [-1j * np.exp(-1j * phase) * s, c]])


def _apply_1q(arr: np.ndarray, target: int, m: np.ndarray) -> np.ndarray:
    """Apply a 2x2 matrix to spin ``target`` of a state vector or a stack of columns."""
    dim = arr.shape[0]
    k = np.arange(dim)
    lo = k[(k >> target) & 1 == 0]
    hi = lo | (1 << target)
    out = np.empty_like(arr)
    a0, a1 = arr[lo], arr[hi]
    out[lo] = m[0, 0] * a0 + m[0, 1] * a1
    out[hi] = m[1, 0] * a0 + m[1, 1] * a1
    return out


def _zz_phases(molecule: MoleculeSpec, tau: float) -> np.ndarray:
    return np.exp(-1j * (math.pi * tau / 2) * molecule.zz_energies)


def _check_target(state_n: int, target: int):
    if not 0 <= target < state_n:
        raise DomainError(f"pulse target {target} outside register of {state_n} spins")


def apply_pulse(state: SpinState, ev: PulseEvent) -> SpinState:
    _check_target(state.n, ev.target)
    return SpinState(_apply_1q(state.amplitudes, ev.target, pulse_matrix(ev.angle, ev.phase)))


def free_evolution(state: SpinState, molecule: MoleculeSpec, tau: float) -> SpinState:
    """Evolve under sum_{i>j} (pi J_ij / 2) sz_i sz_j for ``tau`` seconds."""
    if tau < 0:
        raise DomainError("evolution time must be non-negative")
    if molecule.n != state.n:
        raise DomainError("state and molecule sizes differ")
    return SpinState(state.amplitudes * _zz_phases(molecule, tau))


def _run(arr: np.ndarray, schedule: PulseSchedule) -> np.ndarray:
    mol = schedule.molecule
    for ev in schedule.events:
        if isinstance(ev, PulseEvent):
            arr = _apply_1q(arr, ev.target, pulse_matrix(ev.angle, ev.phase))
        elif ev.duration:
            ph = _zz_phases(mol, ev.duration)
            arr = arr * (ph if arr.ndim == 1 else ph[:, None])
    return arr


def run_schedule(state: SpinState, schedule: PulseSchedule) -> SpinState:
    if state.n != schedule.molecule.n:
        raise DomainError("state and schedule register sizes differ")
    return SpinState(_run(state.amplitudes, schedule))


def schedule_unitary(schedule: PulseSchedule, n: int | None = None) -> np.ndarray:
    """Matrix whose column k is the schedule applied to basis state k."""
    n = schedule.molecule.n if n is None else n
    if n != schedule.molecule.n:
        raise DomainError("register size does not match the schedule's molecule")
    return _run(np.eye(2**n, dtype=complex), schedule)


def fidelity_up_to_global_phase(U: np.ndarray, V: np.ndarray) -> float:
    """|Tr(U^dagger V)| / dim."""
    U, V = np.asarray(U), np.asarray(V)
    if U.shape != V.shape:
        raise DomainError("unitaries must have the same shape")
    return float(abs(np.vdot(U, V)) / U.shape[0])
