"""Command-line front end.

Subcommands cover the whole laboratory: classical evolution diagrams,
the transition matrix and its identities, gate-list emission, the chain
Hamiltonian, both recurrence checkers, the superposition update, the
unitary mesh decomposition, and an all-in-one verification suite.

Exit codes: 0 all requested checks passed, 1 usage or input errors,
2 domain errors and failed verifications.  All randomized checks draw
from one generator seeded by --seed, so identical invocations produce
byte-identical output.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import frt_quantum, qstate, quantize, sca_core, spin_chain, unitary_compile
from .errors import ParseError, QscaError

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems instead of exiting."""

    def error(self, message):
        raise _UsageError(message)


def _radius(value: str) -> int:
    r = int(value)
    if not 1 <= r <= quantize.MAX_RADIUS:
        raise argparse.ArgumentTypeError(
            f"radius must be in 1..{quantize.MAX_RADIUS}")
    return r


def _write(out: str | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _read(path: str) -> str:
    return Path(path).read_text()


# -- subcommands ------------------------------------------------------------

def cmd_evolve(args) -> int:
    rule = sca_core.Rule(args.radius)
    config = sca_core.parse_configuration(_read(args.config))
    rows = sca_core.evolve(rule, config, args.steps,
                           scan_limit=args.scan_limit)
    if args.format == "pbm":
        _write(args.out, sca_core.pbm_diagram(rows))
    else:
        _write(args.out, sca_core.ascii_diagram(rows))
    return 0


def cmd_uf(args) -> int:
    t_op = quantize.build_uf_matrix(args.radius)
    if args.action == "export":
        _write(args.out, quantize.emit_matrix_triplets(t_op.matrix))
        return 0
    if args.action == "check":
        report = quantize.check_partial_isometry(
            t_op, rng=np.random.default_rng(args.seed))
        _write(args.out,
               "range residual {}\nsupport residual {}\n"
               "norm deviation {:.3e}\n".format(
                   report.range_residual, report.support_residual,
                   report.norm_deviation))
        return 0 if report.ok else 2
    # blockform: permuted matrix plus structural verdict
    partition = quantize.partition_basis(args.radius)
    blocked = quantize.represent_blocked(t_op, partition)
    k = len(partition.invariant_words)
    dim = t_op.dimension
    ident_ok = np.array_equal(blocked[:k, :k], np.eye(k, dtype=blocked.dtype))
    corner = blocked[k:, k:]
    anti = np.zeros_like(corner)
    m = dim - k
    for idx in range(m - 1):
        anti[idx, m - 1 - idx] = 1
    anti_ok = np.array_equal(corner, anti)
    off_ok = (not blocked[:k, k:].any()) and (not blocked[k:, :k].any())
    ok = ident_ok and anti_ok and off_ok
    text = "invariant {} flipped {}\n".format(k, dim - k)
    text += quantize.emit_matrix_csv(blocked)
    text += "blockform {}\n".format("ok" if ok else "MISMATCH")
    _write(args.out, text)
    return 0 if ok else 2


def cmd_circuit(args) -> int:
    if args.total is not None:
        circuit = quantize.total_step(args.radius, args.total,
                                      "unitary_circuit")
    else:
        if args.site is None or args.n_qubits is None:
            raise _UsageError("need --site and --n-qubits, or --total")
        circuit = quantize.build_uf_circuit(args.radius, args.site,
                                            args.n_qubits)
    _write(args.out, qstate.emit_gatelist(circuit))
    return 0


def cmd_hamiltonian(args) -> int:
    h = spin_chain.build_chain_hamiltonian(args.n_sites, args.radius,
                                           args.variant)
    _write(args.out, spin_chain.emit_hamiltonian_terms(h))
    return 0


def cmd_frt_classical(args) -> int:
    rule = sca_core.Rule(args.radius)
    config = sca_core.parse_configuration(_read(args.config))
    particles = sca_core.parse_particles(rule, config)
    if not particles:
        _write(args.out, "no particles\n")
        return 0
    lines = []
    all_ok = True
    for idx, particle in enumerate(particles, start=1):
        report = sca_core.frt_check(rule, particle, horizon=args.horizon)
        pred = report.prediction
        lines.append("particle {} at {} blocks {}".format(
            idx, particle.start_site,
            " ".join(str(b) for b in particle.blocks)))
        lines.append("  ones {}  times {}  period {}".format(
            " ".join(str(l) for l in pred.l_counts),
            " ".join(str(t) for t in pred.return_times), pred.period))
        lines.append("  condition {}".format(
            "held" if report.condition_held else
            f"failed at step {report.failed_at}"))
        for chk in report.checks:
            if chk.matched is None:
                lines.append(f"  t={chk.time} pattern {chk.pattern_index}: "
                             "not applicable")
            else:
                lines.append("  t={} pattern {}: {}{}".format(
                    chk.time, chk.pattern_index,
                    "match" if chk.matched else "MISMATCH",
                    f" shift {chk.shift}" if chk.matched else ""))
        if report.condition_held and not report.all_matched:
            all_ok = False
    _write(args.out, "\n".join(lines) + "\n")
    return 0 if all_ok else 2


def _parse_blocks(text: str, width: int) -> list[tuple[int, ...]]:
    blocks = []
    for token in text.split():
        if token == "O":
            blocks.append((0,) * width)
            continue
        if set(token) - {"0", "1"} or len(token) != width:
            raise ParseError(
                f"block {token!r} is not {width} binary digits")
        blocks.append(tuple(int(c) for c in token))
    if not blocks:
        raise ParseError("no blocks given")
    return blocks


def cmd_frt_quantum(args) -> int:
    blocks = _parse_blocks(_read(args.blocks), args.radius + 1)
    report = frt_quantum.run_frt(blocks, args.padding,
                                 reset_variant=args.variant)
    _write(args.out, frt_quantum.emit_frt_report(report))
    return 0 if report.final_ok else 2


def cmd_parallelism(args) -> int:
    report = quantize.parallelism_demo(args.radius)
    _write(args.out,
           "applications {}\nimage words {}\namplitude {:.17g}\n"
           "max deviation {:.3e}\nnorm deviation {:.3e}\n".format(
               report.applications, report.image_count,
               report.expected_amplitude, report.max_deviation,
               abs(report.norm - 1.0)))
    return 0 if report.ok else 2


def cmd_reck(args) -> int:
    if args.dimension is not None:
        rng = np.random.default_rng(args.seed)
        raw = rng.standard_normal((args.dimension, args.dimension)) \
            + 1j * rng.standard_normal((args.dimension, args.dimension))
        target, _ = np.linalg.qr(raw)
    else:
        circuit = quantize.build_uf_circuit(
            args.radius, args.radius + 1, 2 * args.radius + 1)
        target = qstate.circuit_matrix(circuit)
    plan = unitary_compile.reck_decompose(target)
    error = float(np.abs(unitary_compile.reck_reconstruct(plan) - target).max())
    _write(args.out, unitary_compile.emit_reck_plan(plan))
    return 0 if error <= 1e-9 else 2


def cmd_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    lines = []
    failures = 0

    def record(name: str, ok: bool, detail: str = ""):
        nonlocal failures
        if not ok:
            failures += 1
        suffix = f"  {detail}" if detail else ""
        lines.append("{} {}{}".format("ok  " if ok else "FAIL", name, suffix))

    # window map bijectivity
    for r in (1, 2, 3):
        rule = sca_core.Rule(r)
        width = rule.window_len
        images = set()
        for x in range(1, 2 ** width):
            bits = tuple((x >> (width - 1 - i)) & 1 for i in range(width))
            images.add(sca_core.f_window(rule, bits))
        missing = (0,) * r + (1,) + (0,) * r
        record(f"window map bijective r={r}",
               len(images) == 2 ** width - 1 and missing not in images)

    # isometry identities
    for r in (1, 2, 3):
        report = quantize.check_partial_isometry(
            quantize.build_uf_matrix(r), rng=rng)
        record(f"partial isometry r={r}", report.ok,
               f"residuals {report.range_residual} {report.support_residual}")

    # block form
    for r in (1, 2):
        t_op = quantize.build_uf_matrix(r)
        blocked = quantize.represent_blocked(t_op, quantize.partition_basis(r))
        k = 2 ** (2 * r)
        m = t_op.dimension - k
        anti = np.zeros((m, m), dtype=blocked.dtype)
        for idx in range(m - 1):
            anti[idx, m - 1 - idx] = 1
        want = np.zeros_like(blocked)
        want[:k, :k] = np.eye(k, dtype=blocked.dtype)
        want[k:, k:] = anti
        record(f"block form r={r}", np.array_equal(blocked, want))

    # circuit factorization
    for r in (1, 2, 3):
        t_op = quantize.build_uf_matrix(r)
        circuit = quantize.build_uf_circuit(r, r + 1, 2 * r + 1)
        mat = qstate.circuit_matrix(circuit).real
        mat[:, 0] = 0.0
        record(f"circuit factorization r={r}",
               np.array_equal(mat.astype(np.int8), t_op.matrix))

    # totalized chain step against the classical scan
    rule = sca_core.Rule(2)
    n = 11
    op = quantize.total_step(2, n, "partial_isometry").tocsc()
    ok = True
    for x in range(16):
        bits = tuple((x >> (3 - i)) & 1 for i in range(4))
        config = sca_core.Configuration(4, bits)
        try:
            term = sca_core.step(rule, config)
        except sca_core.StepDivergedError:
            continue
        word = 0
        for s in range(1, n + 1):
            word = (word << 1) | config.site(s)
        got = int(op.indices[op.indptr[word]])
        want = 0
        for s in range(1, n + 1):
            want = (want << 1) | term.site(s)
        ok = ok and got == want
    record("chain step matches classical scan r=2", ok)

    # generators
    x_gate = np.array([[0, 1], [1, 0]], dtype=complex)
    cn_gate = np.eye(4, dtype=complex)
    cn_gate[[2, 3]] = cn_gate[[3, 2]]
    exp_not = spin_chain.matrix_exp_hermitian(
        spin_chain.generator_not("verified"), np.pi)
    exp_cn = spin_chain.matrix_exp_hermitian(
        spin_chain.generator_cn("verified"), np.pi)
    record("verified generators reproduce gates",
           np.abs(exp_not - x_gate).max() <= 1e-10
           and np.abs(exp_cn - cn_gate).max() <= 1e-10)
    exp_cn_lit = spin_chain.matrix_exp_hermitian(
        spin_chain.generator_cn("literal"), np.pi)
    record("literal CN generator exponentiates to identity",
           np.abs(exp_cn_lit - np.eye(4)).max() <= 1e-10)

    # chain Hamiltonian hermiticity
    h = spin_chain.to_dense(spin_chain.build_chain_hamiltonian(8, 2))
    record("chain Hamiltonian Hermitian n=8 r=2",
           np.abs(h - h.T).max() == 0.0)

    # quantum recurrence circuit
    rep = frt_quantum.stage_identity_check(2, 1, samples=9)
    record("block propagation exhaustive r=1 L=2", rep.ok)
    rep = frt_quantum.stage_identity_check(3, 2, samples=5, rng=rng)
    record("block propagation sampled r=2 L=3", rep.ok)

    # classical recurrence on random particles
    rule = sca_core.Rule(2)
    passed = matched = 0
    attempts = 0
    while passed < 10 and attempts < 400:
        attempts += 1
        L = int(rng.integers(1, 4))
        words = [int(rng.integers(1, 8))]
        for _ in range(L - 2):
            words.append(int(rng.integers(0, 8)))
        if L > 1:
            words.append(int(rng.integers(1, 8)))
        blocks = [sca_core.BasicString(
            tuple((x >> (2 - i)) & 1 for i in range(3))) for x in words]
        particle = sca_core.Particle(0, tuple(blocks))
        report = sca_core.frt_check(rule, particle)
        if report.condition_held:
            passed += 1
            if report.all_matched:
                matched += 1
    record("classical recurrence on sampled particles",
           passed > 0 and matched == passed,
           f"{matched}/{passed} detector passes matched")

    # superposition update
    record("one-shot superposition update r=2",
           quantize.parallelism_demo(2).ok)

    # mesh decomposition round trips
    ok = True
    for dim in (2, 4, 8):
        raw = rng.standard_normal((dim, dim)) \
            + 1j * rng.standard_normal((dim, dim))
        target, _ = np.linalg.qr(raw)
        plan = unitary_compile.reck_decompose(target)
        err = np.abs(unitary_compile.reck_reconstruct(plan) - target).max()
        ok = ok and err <= 1e-9
    circuit = quantize.build_uf_circuit(1, 2, 3)
    target = qstate.circuit_matrix(circuit)
    plan = unitary_compile.reck_decompose(target)
    ok = ok and np.abs(
        unitary_compile.reck_reconstruct(plan) - target).max() <= 1e-9
    record("mesh decomposition round trip", ok)

    lines.append("{} checks, {} failed".format(len(lines), failures))
    _write(args.out, "\n".join(lines) + "\n")
    return 0 if failures == 0 else 2


# -- parser -----------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="qsca", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="evolve a configuration, write diagram")
    p.add_argument("config", help="configuration file (origin= line, then bits)")
    p.add_argument("--radius", type=_radius, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--format", choices=("ascii", "pbm"), default="ascii")
    p.add_argument("--scan-limit", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("uf", help="transition matrix exports and checks")
    p.add_argument("action", choices=("export", "check", "blockform"))
    p.add_argument("--radius", type=_radius, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_uf)

    p = sub.add_parser("circuit", help="emit gate lists")
    p.add_argument("--radius", type=_radius, required=True)
    p.add_argument("--site", type=int)
    p.add_argument("--n-qubits", type=int)
    p.add_argument("--total", type=int, metavar="N_SITES",
                   help="whole-chain step over N_SITES cells")
    p.add_argument("--out")
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("hamiltonian", help="emit chain Hamiltonian terms")
    p.add_argument("--n-sites", type=int, required=True)
    p.add_argument("--radius", type=_radius, required=True)
    p.add_argument("--variant", choices=spin_chain.GENERATOR_VARIANTS,
                   default="verified")
    p.add_argument("--out")
    p.set_defaults(func=cmd_hamiltonian)

    p = sub.add_parser("frt-classical",
                       help="recurrence prediction and simulation check")
    p.add_argument("config")
    p.add_argument("--radius", type=_radius, required=True)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_frt_classical)

    p = sub.add_parser("frt-quantum", help="run the block propagation circuit")
    p.add_argument("--blocks", required=True,
                   help="file of whitespace-separated blocks (O for null)")
    p.add_argument("--radius", type=_radius, required=True)
    p.add_argument("--padding", type=int, required=True)
    p.add_argument("--variant", choices=qstate.RESET_VARIANTS,
                   default="extended")
    p.add_argument("--out")
    p.set_defaults(func=cmd_frt_quantum)

    p = sub.add_parser("parallelism", help="one-shot superposition update")
    p.add_argument("--radius", type=_radius, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_parallelism)

    p = sub.add_parser("reck", help="decompose a unitary into a mesh plan")
    p.add_argument("--radius", type=_radius,
                   help="decompose the window-update circuit at this radius")
    p.add_argument("--dimension", type=int,
                   help="decompose a seeded random unitary instead")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_reck)

    p = sub.add_parser("check", help="run the verification suite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "reck" and args.radius is None \
                and args.dimension is None:
            raise _UsageError("reck needs --radius or --dimension")
        return args.func(args)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except QscaError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
