"""Compile logic gates into pulse schedules for the spin register.

Pulse phase convention (see ``simulator.pulse_matrix``): p(pi/2, +pi/2) is
the inverse pseudo-Hadamard and p(pi/2, -pi/2) the pseudo-Hadamard.

The controlled-pi core on a pair (i, j) is

    delay 1/(4J), p(pi, 0) on i and j, delay 1/(4J),
    p(pi/2, 0), p(pi/2, pi/2), p(pi/2, 0) on i and j

For registers with more than two spins each delay is replaced by a
refocused block in which spectator couplings average to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy.linalg import hadamard

from .errors import CompilationError, DomainError, UncoupledPairError
from .molecule import MoleculeSpec
from .simulator import DelayEvent, PulseEvent, PulseSchedule, schedule_unitary

PI = math.pi
_PHASE_TOL = 1e-12

GATE_KINDS = ("pseudo_hadamard", "inverse_pseudo_hadamard", "z_rotation", "cz", "cnot", "swap")


@dataclass(frozen=True)
class GateRequest:
    kind: str
    sites: tuple
    angle: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        if self.kind not in GATE_KINDS:
            raise CompilationError(f"unknown gate {self.kind!r}; expected one of {GATE_KINDS}")
        need = 2 if self.kind in ("cz", "cnot", "swap") else 1
        if len(self.sites) != need:
            raise CompilationError(f"{self.kind} takes {need} site index(es)")
        if need == 2 and self.sites[0] == self.sites[1]:
            raise CompilationError("two-qubit gates need distinct sites")


def _check_sites(molecule, *sites):
    for s in sites:
        if not 0 <= s < molecule.n:
            raise DomainError(f"site {s} outside register of {molecule.n} spins")


def _sched(events, molecule):
    return PulseSchedule(tuple(events), molecule)


def compile_pseudo_hadamard(j: int, molecule: MoleculeSpec) -> PulseSchedule:
    _check_sites(molecule, j)
    return _sched([PulseEvent(j, PI / 2, -PI / 2)], molecule)


def compile_inverse_pseudo_hadamard(j: int, molecule: MoleculeSpec) -> PulseSchedule:
    _check_sites(molecule, j)
    return _sched([PulseEvent(j, PI / 2, PI / 2)], molecule)


def _z_rotation_events(j, angle):
    # p(pi/2, 0) p(angle, pi/2) p(pi/2, pi) = diag(exp(-i angle/2), exp(+i angle/2))
    # in the (down, up) basis, i.e. up gains phase +angle relative to down.
    angle = float(angle) % (2 * PI)
    return [PulseEvent(j, PI / 2, 0.0), PulseEvent(j, angle, PI / 2), PulseEvent(j, PI / 2, PI)]


def compile_z_rotation(j: int, angle: float, molecule: MoleculeSpec) -> PulseSchedule:
    """Composite z rotation: relative phase exp(i * angle) on spin up versus down."""
    _check_sites(molecule, j)
    return _sched(_z_rotation_events(j, angle), molecule)


def _pair_coupling(molecule, i, j, cutoff):
    _check_sites(molecule, i, j)
    if i == j:
        raise CompilationError("pair indices must differ")
    J = float(molecule.J[i, j])
    if J <= 0 or (cutoff is not None and J < cutoff):
        raise UncoupledPairError(
            f"uncoupled pair ({i}, {j}) with J = {J:.3g} Hz; route via SWAPs")
    return J


def _hadamard_rows(molecule, i, j, cutoff):
    """Assign a Sylvester-Hadamard row to every spin; i and j share row 0.

    Without a cutoff every spectator gets its own non-constant row. With a
    cutoff, couplings below it are ignored and rows are reused greedily
    between spins that do not (significantly) interact.
    """
    n = molecule.n
    rows = {i: 0, j: 0}
    spectators = [s for s in range(n) if s not in rows]
    if cutoff is None:
        for r, s in enumerate(spectators, start=1):
            rows[s] = r
    else:
        J = molecule.J
        for s in spectators:
            taken = {rows[o] for o in rows if J[s, o] >= cutoff}
            r = 0
            while r in taken:
                r += 1
            rows[s] = r
    m = 1
    while m < max(rows.values()) + 1:
        m *= 2
    if cutoff is None:
        m = max(m, 1 << (n - 1).bit_length())
    return rows, hadamard(max(m, 1))


def refocus(i: int, j: int, tau: float, molecule: MoleculeSpec,
            cutoff: float | None = None) -> PulseSchedule:
    """Evolve only the (i, j) coupling for ``tau`` seconds.

    The delay is cut into M slices (M a power of two). Each spin follows the
    sign pattern of its Hadamard row, flipped by p(pi, 0) pulses wherever the
    sign changes and once more at the end if the row ends negative.
    """
    _check_sites(molecule, i, j)
    if i == j:
        raise CompilationError("pair indices must differ")
    if not tau > 0:
        raise DomainError("tau must be positive")
    if molecule.n < 2:
        raise DomainError("refocusing needs at least two spins")
    rows, H = _hadamard_rows(molecule, i, j, cutoff)
    m = H.shape[0]
    if all(r == 0 for r in rows.values()):
        return _sched([DelayEvent(tau)], molecule)
    slice_t = tau / m
    events = []
    order = sorted(rows)
    for k in range(m):
        if k > 0:
            events += [PulseEvent(s, PI, 0.0) for s in order if H[rows[s], k] != H[rows[s], k - 1]]
        events.append(DelayEvent(slice_t))
    events += [PulseEvent(s, PI, 0.0) for s in order if H[rows[s], m - 1] < 0]
    return _sched(events, molecule)


def _delay(i, j, tau, molecule, cutoff):
    if molecule.n == 2:
        return [DelayEvent(tau)]
    return list(refocus(i, j, tau, molecule, cutoff).events)


def _cz_core(i, j, tau, molecule, cutoff):
    ev = _delay(i, j, tau, molecule, cutoff)
    ev += [PulseEvent(i, PI, 0.0), PulseEvent(j, PI, 0.0)]
    ev += _delay(i, j, tau, molecule, cutoff)
    for phase in (0.0, PI / 2, 0.0):
        ev += [PulseEvent(i, PI / 2, phase), PulseEvent(j, PI / 2, phase)]
    return ev


def _local_phase_corrections(J):
    """Residual z phases left by the CZ core under the pulse convention.

    The core is evaluated on an isolated pair with the given coupling and
    compared with diag(1, 1, 1, -1). Returns the z-rotation angles needed on
    the first and second spin; fails if the core is not diagonal.
    """
    pair = MoleculeSpec.from_couplings([[0.0, J], [J, 0.0]])
    U = schedule_unitary(_sched(_cz_core(0, 1, 1 / (4 * J), pair, None), pair))
    d = np.diag(U)
    if np.max(np.abs(U - np.diag(d))) > 1e-9:
        raise CompilationError("controlled-phase core is not diagonal")
    psi = np.angle(d) - np.array([0, 0, 0, PI])
    # up on a spin gains +angle relative to down under compile_z_rotation
    a = (psi[0] - psi[1]) % (2 * PI)
    b = (psi[0] - psi[2]) % (2 * PI)
    if abs(((psi[3] - psi[0] + a + b) + PI) % (2 * PI) - PI) > 1e-9:
        raise CompilationError("controlled-phase core differs from CZ beyond local phases")
    out = []
    for x in (a, b):
        x = 0.0 if min(x, 2 * PI - x) < _PHASE_TOL else x
        out.append(x)
    return out


def compile_cz(i: int, j: int, molecule: MoleculeSpec,
               cutoff: float | None = None) -> PulseSchedule:
    """Controlled-pi phase gate on the pair (i, j)."""
    J = _pair_coupling(molecule, i, j, cutoff)
    events = _cz_core(i, j, 1 / (4 * J), molecule, cutoff)
    for site, angle in zip((i, j), _local_phase_corrections(J)):
        if angle:
            events += _z_rotation_events(site, angle)
    return _sched(events, molecule)


def compile_cnot(control: int, target: int, molecule: MoleculeSpec,
                 cutoff: float | None = None) -> PulseSchedule:
    """Flip ``target`` when ``control`` is up."""
    return (compile_inverse_pseudo_hadamard(target, molecule)
            + compile_cz(control, target, molecule, cutoff)
            + compile_pseudo_hadamard(target, molecule))


def compile_swap(i: int, j: int, molecule: MoleculeSpec,
                 cutoff: float | None = None) -> PulseSchedule:
    return (compile_cnot(i, j, molecule, cutoff)
            + compile_cnot(j, i, molecule, cutoff)
            + compile_cnot(i, j, molecule, cutoff))


def compile_gate(request: GateRequest, molecule: MoleculeSpec,
                 cutoff: float | None = None) -> PulseSchedule:
    s = request.sites
    if request.kind == "pseudo_hadamard":
        return compile_pseudo_hadamard(s[0], molecule)
    if request.kind == "inverse_pseudo_hadamard":
        return compile_inverse_pseudo_hadamard(s[0], molecule)
    if request.kind == "z_rotation":
        return compile_z_rotation(s[0], request.angle, molecule)
    if request.kind == "cz":
        return compile_cz(s[0], s[1], molecule, cutoff)
    if request.kind == "cnot":
        return compile_cnot(s[0], s[1], molecule, cutoff)
    return compile_swap(s[0], s[1], molecule, cutoff)


# -- canonical target unitaries (spin i <-> bit i, up = 1) ------------------

def target_unitary(request: GateRequest, n: int) -> np.ndarray:
    """Ideal unitary for a gate request on an n-spin register."""
    dim = 2**n
    k = np.arange(dim)
    s = request.sites
    if request.kind in ("pseudo_hadamard", "inverse_pseudo_hadamard", "z_rotation"):
        from .simulator import _apply_1q, pulse_matrix
        if request.kind == "z_rotation":
            m = np.diag([np.exp(-0.5j * request.angle), np.exp(0.5j * request.angle)])
        else:
            phase = -PI / 2 if request.kind == "pseudo_hadamard" else PI / 2
            m = pulse_matrix(PI / 2, phase)
        return _apply_1q(np.eye(dim, dtype=complex), s[0], m)
    bit = lambda q: (k >> q) & 1
    if request.kind == "cz":
        return np.diag(np.where(bit(s[0]) & bit(s[1]), -1.0, 1.0)).astype(complex)
    if request.kind == "cnot":
        image = np.where(bit(s[0]) == 1, k ^ (1 << s[1]), k)
    else:
        image = k ^ ((bit(s[0]) ^ bit(s[1])) * ((1 << s[0]) | (1 << s[1])))
    U = np.zeros((dim, dim), dtype=complex)
    U[image, k] = 1.0
    return U


def zz_target(i: int, j: int, tau: float, molecule: MoleculeSpec) -> np.ndarray:
    """exp(-i (pi J_ij tau / 2) sz_i sz_j) on the full register."""
    k = np.arange(2**molecule.n)
    si = 2 * ((k >> i) & 1) - 1
    sj = 2 * ((k >> j) & 1) - 1
    return np.diag(np.exp(-0.5j * PI * molecule.J[i, j] * tau * si * sj))
