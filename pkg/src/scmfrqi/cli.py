"""Command-line entry point: ``encode``, ``simulate`` and ``psnr`` subcommands."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import pipeline
from .circuit import dump_circuits, parse_circuits
from .encoders import Scheme, ValueMap, build_circuit
from .errors import ExtractionError
from .imageio import load_image
from .metrics import format_psnr, psnr, rate_table, table_to_csv
from .simulator import IDEALIZED, RESET_MODES, dump_state, extract_map, run_circuit


def _parse_q_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad quantization list {text!r}") from None


def _schemes(choice: str) -> tuple[Scheme, ...]:
    if choice == "both":
        return pipeline.SCHEME_ORDER
    return (Scheme.parse(choice),)


def cmd_encode(args) -> int:
    img = load_image(args.input)
    cfg = pipeline.RunConfig(
        mode=args.mode,
        schemes=_schemes(args.scheme),
        q_factors=tuple(args.q),
        block_size=args.block,
        simulate=args.verify,
        verify_blocks=args.verify_blocks,
        seed=args.seed,
        image_name=Path(args.input).stem,
    )
    result = pipeline.run(img, cfg)
    text = table_to_csv(rate_table(result.points))
    if args.csv:
        Path(args.csv).write_text(text)
    else:
        sys.stdout.write(text)

    if args.dump_circuit:
        circuits, comments = [], []
        for b in pipeline.sample_blocks(img, cfg):
            vm = ValueMap.from_block(b.region, b.q_bits)
            for scheme in cfg.schemes:
                circuits.append(build_circuit(vm, scheme))
                qf = "" if b.q_factor is None else f" q_factor={b.q_factor}"
                comments.append(f"image={cfg.image_name} channel={b.channel}{qf} "
                                f"scheme={scheme.value} block={b.block[0]},{b.block[1]}")
        Path(args.dump_circuit).write_text(dump_circuits(circuits, comments))

    if args.verify:
        for v in result.verifications:
            ctx = v.context
            print(f"verify channel={ctx['channel']} q_factor={ctx['q_factor']} block={ctx['block']} "
                  f"scheme={v.scheme} {'pass' if v.passed else 'FAIL'} fidelity={v.fidelity:.6f}"
                  + (f" cause={v.cause}" if v.cause else ""), file=sys.stderr)
        if not result.all_verified:
            failed = next(v for v in result.verifications if not v.passed)
            raise RuntimeError(f"simulation verification failed: {failed.cause}")
    return 0


def cmd_simulate(args) -> int:
    circuits = parse_circuits(Path(args.circuit).read_text())
    if not circuits:
        raise ValueError(f"no circuit found in {args.circuit}")
    dumps = []
    for i, c in enumerate(circuits):
        state = run_circuit(c, args.reset)
        weights = ", ".join(f"{w:.6f}" for w, _ in state.branches)
        line = f"circuit {i}: qubits={c.layout.total} gates={len(c.gates)} branches={len(state.branches)} weights=[{weights}]"
        if state.is_pure:
            try:
                em = extract_map(state)
                line += f" amplitude={em.amplitude_per_position:.6g} entries={list(em.entries)}"
            except ExtractionError as exc:
                line += f" (not a basis encoding: {exc})"
        print(line)
        if args.dump_state:
            header = f"# circuit {i}\n" if len(circuits) > 1 else ""
            dumps.append(header + dump_state(state))
    if args.dump_state:
        Path(args.dump_state).write_text("".join(dumps))
    return 0


def cmd_psnr(args) -> int:
    print(format_psnr(psnr(load_image(args.a), load_image(args.b))))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scmfrqi", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="bit-rate accounting for an image")
    enc.add_argument("--input", required=True, help="binary PGM/PPM file")
    enc.add_argument("--mode", choices=["direct", "dct"], default="dct")
    enc.add_argument("--scheme", choices=["scmfrqi", "efrqi", "both"], default="both")
    enc.add_argument("--q", type=_parse_q_list, default=list(pipeline.DEFAULT_Q_FACTORS),
                     help="comma-separated quantization factors (dct mode)")
    enc.add_argument("--block", type=int, default=4, help="quantum block side S (power of two)")
    enc.add_argument("--csv", help="write the rate table here instead of stdout")
    enc.add_argument("--dump-circuit", help="write circuits of the sampled blocks here")
    enc.add_argument("--verify", action="store_true", help="simulate sampled blocks")
    enc.add_argument("--verify-blocks", type=int, default=8)
    enc.add_argument("--seed", type=int, default=0)
    enc.set_defaults(func=cmd_encode)

    sim = sub.add_parser("simulate", help="run a circuit file on the statevector simulator")
    sim.add_argument("--circuit", required=True)
    sim.add_argument("--reset", choices=list(RESET_MODES), default=IDEALIZED)
    sim.add_argument("--dump-state")
    sim.set_defaults(func=cmd_simulate)

    ps = sub.add_parser("psnr", help="PSNR between two images")
    ps.add_argument("--a", required=True)
    ps.add_argument("--b", required=True)
    ps.set_defaults(func=cmd_psnr)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except Exception as exc:  # one-line cause, nonzero exit
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
