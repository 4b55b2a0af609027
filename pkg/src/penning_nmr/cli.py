"""Command-line runner: ``penning-nmr {report,compile,simulate,validate,optimize-trap}``.

Exit codes: 0 success, 2 configuration or usage error, 3 physics-validity
failure, 4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
from pathlib import Path
import sys

from . import __version__
from .compiler import GATE_KINDS, GateRequest, compile_gate
from .config import MM, Device, load_config
from .effective_model import validate_effective_model
from .errors import (
    CompilationError, ConfigError, ConvergenceError, DomainError, ExpansionValidityError,
    InfeasibleError, NoTrapError, UncoupledPairError, UnstableTrapError,
)
from .field import gradient_coupling
from .simulator import PulseSchedule, SpinState, index_to_bitstring, run_schedule
from .trap import anharmonicity, default_search, find_well, optimize_harmonicity

log = logging.getLogger("penning_nmr")

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_CONVERGENCE = 0, 2, 3, 4
TWO_PI = 2 * math.pi


def _write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2) + "\n")


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _device(args) -> Device:
    return Device.from_config(load_config(args.config))


# -- commands ------------------------------------------------------------------

def cmd_report(args) -> int:
    dev = _device(args)
    sites = dev.sites()
    rows = [s.as_row() for s in sites]
    header = ["site"] + list(rows[0])
    _write_csv(args.out / "frequencies.csv", header,
               [[i] + list(r.values()) for i, r in enumerate(rows)])
    mol = dev.molecule()
    pairs = []
    for i in range(mol.n):
        for j in range(i + 1, mol.n):
            pairs.append([i, j, dev.layout.distance(i, j), mol.J[i, j], mol.xi[i, j] / TWO_PI])
    _write_csv(args.out / "couplings.csv", ["i", "j", "d_m", "J_hz", "xi_hz"], pairs)
    report = dev.validity(mol)
    _write_json(args.out / "validity.json", report.to_dict())
    for c in report.checks:
        if not c.passed:
            log.warning("validity check %s failed: ratio %.3g >= %.3g", c.name, c.ratio, c.threshold)
    return EXIT_OK if report.passed else EXIT_PHYSICS


def _parse_sites(text: str):
    try:
        return tuple(int(s) for s in text.split(","))
    except ValueError:
        raise ConfigError(f"--sites expects i or i,j; got {text!r}") from None


def cmd_compile(args) -> int:
    dev = _device(args)
    request = GateRequest(args.gate, _parse_sites(args.sites), args.angle)
    schedule = compile_gate(request, dev.molecule(), dev.cutoff)
    (args.out / "schedule.json").write_text(schedule.to_json() + "\n")
    return EXIT_OK


def simulate_file(dev: Device, schedule_path, initial: str | None):
    mol = dev.molecule()
    schedule = PulseSchedule.from_json(Path(schedule_path).read_text(), mol)
    bits = initial if initial is not None else "0" * mol.n
    if len(bits) != mol.n:
        raise DomainError(f"initial bitstring has {len(bits)} spins; register has {mol.n}")
    return bits, run_schedule(SpinState.from_bitstring(bits), schedule)


def cmd_simulate(args) -> int:
    dev = _device(args)
    try:
        bits, state = simulate_file(dev, args.schedule, args.initial)
    except OSError as exc:
        raise ConfigError(f"cannot read schedule: {exc}") from exc
    amps = state.amplitudes
    _write_json(args.out / "state.json", {
        "n_sites": state.n,
        "initial": bits,
        "amplitudes": [[float(a.real), float(a.imag)] for a in amps],
        "norm": float(state.norm),
    })
    probs = state.probabilities()
    _write_csv(args.out / "probabilities.csv", ["bitstring", "probability"],
               [[index_to_bitstring(k, state.n), float(p)] for k, p in enumerate(probs)])
    return EXIT_OK


def validation_inputs(args):
    """Dimensionless (xi, epsilon, g, splittings, n_max), omega_z = 1.

    Command-line overrides win, then the config's ``validation`` section,
    then values derived from the physical device (nearest pair 0, 1).
    """
    cfg = load_config(args.config)
    if cfg.validation is not None:
        v = cfg.validation
        xi, eps, g, split, n_max = v.xi, v.epsilon, v.g, v.spin_splittings, v.n_max
    else:
        dev = Device.from_config(cfg)
        if dev.layout.n < 2:
            raise ConfigError("validate needs two sites or explicit xi and epsilon")
        mol = dev.molecule()
        w = dev.omega_z
        xi = mol.xi[0, 1] / w
        eps = gradient_coupling(dev.magnetic.b, w, dev.k)
        g = dev.k.g_factor
        # only the spin detuning matters; the common Larmor offset would cost precision
        mean = 0.5 * (mol.spin_freqs[0] + mol.spin_freqs[1])
        split = tuple((f - mean) / w for f in mol.spin_freqs[:2])
        n_max = 10
    xi = args.xi if args.xi is not None else xi
    eps = args.epsilon if args.epsilon is not None else eps
    g = args.g if args.g is not None else g
    n_max = args.n_max if args.n_max is not None else n_max
    return float(xi), float(eps), float(g), tuple(split), int(n_max)


def cmd_validate(args) -> int:
    xi, eps, g, split, n_max = validation_inputs(args)
    try:
        result = validate_effective_model(xi, eps, g, split, n_max)
        code = EXIT_OK
    except ConvergenceError as exc:
        if exc.result is None:
            raise
        result, code = exc.result, EXIT_CONVERGENCE
        log.error("%s", exc)
    _write_json(args.out / "validation.json", result.to_dict())
    return code


def cmd_optimize_trap(args) -> int:
    cfg = load_config(args.config)
    if cfg.axial.stack is None or cfg.optimize is None:
        raise ConfigError("optimize-trap needs axial.stack and an optimize section")
    stack = cfg.axial.stack.stack()
    search = cfg.axial.search() or default_search(stack)
    opt = cfg.optimize
    before = find_well(stack, search)
    best = optimize_harmonicity(stack, opt.tunable, opt.bounds_v, search, opt.weights)
    after = find_well(best, search)

    def summary(st, well):
        return {"radii_mm": [r / MM for r in st.radii], "voltages_v": list(st.voltages),
                "z0_mm": well.z0 / MM, "omega_z_mhz": well.omega_z / TWO_PI / 1e6,
                "objective": anharmonicity(well, *opt.weights)}

    _write_json(args.out / "optimized_stack.json", {
        "initial": summary(stack, before),
        "optimized": summary(best, after),
        "tunable": list(opt.tunable),
        "bounds_v": list(opt.bounds_v),
        "seed": args.seed,
    })
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None,
                        help="device config JSON (default: packaged canonical device)")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--seed", type=int, default=None,
                        help="accepted for reproducibility records; all commands are deterministic")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="penning-nmr", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("report", parents=[common], help="site frequencies, couplings, validity")
    r.set_defaults(func=cmd_report)

    c = sub.add_parser("compile", parents=[common], help="compile one gate to a pulse schedule")
    c.add_argument("--gate", required=True, choices=GATE_KINDS)
    c.add_argument("--sites", required=True, help="i or i,j")
    c.add_argument("--angle", type=float, default=0.0, help="z_rotation angle in radians")
    c.set_defaults(func=cmd_compile)

    s = sub.add_parser("simulate", parents=[common], help="run a schedule from a basis state")
    s.add_argument("--schedule", type=Path, required=True)
    s.add_argument("--initial", default=None, help="bitstring, spin 0 first (default all 0)")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("validate", parents=[common], help="check J against exact diagonalisation")
    v.add_argument("--xi", type=float, default=None, help="xi / omega_z")
    v.add_argument("--epsilon", type=float, default=None)
    v.add_argument("--g", type=float, default=None)
    v.add_argument("--n-max", type=int, default=None)
    v.set_defaults(func=cmd_validate)

    o = sub.add_parser("optimize-trap", parents=[common], help="improve electrode-stack harmonicity")
    o.set_defaults(func=cmd_optimize_trap)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        return args.func(args)
    except ConvergenceError as exc:
        log.error("%s", exc)
        return EXIT_CONVERGENCE
    except (ExpansionValidityError, UncoupledPairError, NoTrapError, InfeasibleError,
            UnstableTrapError) as exc:
        log.error("%s", exc)
        return EXIT_PHYSICS
    except (ConfigError, CompilationError, DomainError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
