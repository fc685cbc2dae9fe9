"""Command line entry point.

Subcommands: ``sonify``, ``braid``, ``gesture``, ``homotopy`` (plus
``fixture`` to write the bundled example gestures). Errors are reported on
stderr as ``error[CODE]: message``; exit status 2 marks bad input, 3 I/O
failures, 4 degenerate geometry.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from . import fixtures
from .braid import (
    closure_components,
    closure_diagram,
    free_reduce,
    parse_braid,
    permutation,
    writhe,
)
from .errors import GestureKnotsError, SchemaError
from .fasta import parse_fasta
from .homotopy import associator_check, linear_hypergesture, save_hypergesture
from .knot import MAX_CROSSINGS, certify_knotted, jones, linking_number, project_to_diagram
from .midi import export_csv, write_smf
from .skeleton import close_gesture, load_gesture, save_gesture, validate_gesture
from .sonify import HelixParams, SonifyOptions, render_dna

log = logging.getLogger(__name__)

EXIT_OK, EXIT_INPUT, EXIT_IO, EXIT_GEOMETRY = 0, 2, 3, 4

HELIX_KEYS = {
    "strands": "strand_count",
    "strand_count": "strand_count",
    "samples_per_turn": "samples_per_turn",
    "pitch_low": "pitch_low",
    "pitch_high": "pitch_high",
    "step_ticks": "step_ticks",
}


@dataclass
class Config:
    seed: int = 0
    tolerance: float = 1e-9
    attempts: int = 8
    output: str | None = None
    csv: str | None = None
    helix: dict = field(default_factory=dict)
    sonify: dict = field(default_factory=dict)

    def update(self, pairs: dict[str, str]) -> None:
        for key, value in pairs.items():
            key = key.strip().replace("-", "_")
            if key.startswith("sonify."):
                self.sonify[key[len("sonify."):]] = value
            elif key in HELIX_KEYS:
                self.helix[HELIX_KEYS[key]] = int(value)
            elif key == "seed":
                self.seed = int(value)
                if not -(1 << 63) <= self.seed < 1 << 64:
                    raise ValueError("seed must fit in 64 bits")
            elif key == "tolerance":
                self.tolerance = float(value)
            elif key == "attempts":
                self.attempts = int(value)
            elif key in ("output", "csv"):
                setattr(self, key, value)
            else:
                self.sonify[key] = value


def read_config(path: str) -> dict[str, str]:
    pairs = {}
    text = Path(path).read_text(encoding="utf-8")
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise SchemaError(f"{path}:{n}: expected key=value")
        pairs[key.strip()] = value.strip()
    return pairs


def write_atomic(path: str | os.PathLike, data: bytes) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- commands -------------------------------------------------------------------------

def cmd_sonify(args, cfg: Config, out) -> int:
    text = Path(args.fasta).read_text(encoding="utf-8")
    records = parse_fasta(text, skip_invalid=args.skip_invalid)
    if args.record:
        chosen = [r for r in records if r.id.split()[0] == args.record or r.id == args.record]
        if not chosen:
            raise SchemaError(f"no record named {args.record!r}")
        seq = chosen[0]
    else:
        seq = records[0]
    params = HelixParams(**cfg.helix)
    options = SonifyOptions.from_pairs(cfg.sonify)
    r = render_dna(seq, params, options)
    target = cfg.output or str(Path(args.fasta).with_suffix(".mid"))
    write_atomic(target, write_smf(r.score))
    if cfg.csv:
        write_atomic(cfg.csv, export_csv(r.helix).encode("utf-8"))
    if r.clamped:
        log.warning("transposed helix voice clamped to the MIDI pitch range")
    print(
        f"sonify: record {seq.id!r}: {len(seq)} bases, {len(r.score.events)} events, "
        f"{len(r.helix_voices)} helix voices, {len(r.dyads)} dyads, {len(r.glissandi)} glissandi, "
        f"unisons at {list(r.helix.unison_steps)} -> {target}"
        + (f" (+ {cfg.csv})" if cfg.csv else ""),
        file=out,
    )
    return EXIT_OK


def cmd_braid(args, cfg: Config, out) -> int:
    w = parse_braid(args.word)
    d = closure_diagram(w)
    perm = permutation(w)
    print(f"strands: {w.strands}", file=out)
    print(f"word: {w.format()}", file=out)
    print(f"reduced: {free_reduce(w).format()}", file=out)
    print(f"permutation: {perm.format_cycles()}", file=out)
    print(f"writhe: {writhe(w)}", file=out)
    comps = closure_components(w)
    print(f"components: {comps}", file=out)
    for i in range(comps):
        for j in range(i + 1, comps):
            print(f"linking({i},{j}): {linking_number(d, i, j)}", file=out)
    if d.n_crossings <= MAX_CROSSINGS:
        print(f"jones: {jones(d, writhe(w))}", file=out)
        print(f"verdict: {certify_knotted(d, writhe(w))}", file=out)
    else:
        print(f"jones: skipped ({d.n_crossings} crossings > {MAX_CROSSINGS})", file=out)
        print("verdict: unknown", file=out)
    if args.dump:
        print(d.dump(), file=out)
    return EXIT_OK


def _parse_tour(specs):
    if not specs:
        return None
    groups = [[a.strip() for a in s.split(",") if a.strip()] for s in specs]
    return groups if len(groups) > 1 else groups[0]


def cmd_gesture(args, cfg: Config, out) -> int:
    g = load_gesture(Path(args.path).read_text(encoding="utf-8"))
    validate_gesture(g)
    curves = close_gesture(g, _parse_tour(args.tour))
    d, w = project_to_diagram(curves, seed=cfg.seed, max_attempts=cfg.attempts)
    print(f"components: {len(curves)}", file=out)
    print(f"crossings: {d.n_crossings}", file=out)
    print(f"writhe: {w}", file=out)
    if args.pair:
        if d.n_components < 2:
            raise SchemaError("--pair needs at least two closed components")
        print(f"linking: {linking_number(d, 0, 1)}", file=out)
    if d.n_crossings <= MAX_CROSSINGS:
        print(f"jones: {jones(d, w)}", file=out)
        print(f"verdict: {certify_knotted(d, w)}", file=out)
    else:
        print(f"jones: skipped ({d.n_crossings} crossings > {MAX_CROSSINGS})", file=out)
    if args.dump:
        print(d.dump(), file=out)
    return EXIT_OK


def _single_curve(path):
    g = load_gesture(Path(path).read_text(encoding="utf-8"))
    if len(g.skeleton.arrows) != 1:
        raise SchemaError(f"{path}: --assoc expects gestures with exactly one arrow")
    return g.arrow_map[g.skeleton.arrows[0].id]


def cmd_homotopy(args, cfg: Config, out) -> int:
    if args.assoc:
        if len(args.paths) != 3:
            raise SchemaError("--assoc needs three gesture files f g h")
        f, g, h = (_single_curve(p) for p in args.paths)
        rep, dev, ok = associator_check(f, g, h, cfg.tolerance, args.samples)
        knots = " ".join(f"({u:g},{v:g})" for u, v in rep.knots)
        print(f"reparametrization: {knots}", file=out)
        print(f"max_deviation: {dev:.3e}", file=out)
        print(f"associative: {'yes' if ok else 'no'} (tolerance {cfg.tolerance:g})", file=out)
        return EXIT_OK if ok else 1
    if len(args.paths) != 2:
        raise SchemaError("homotopy needs two gesture files g1 g2 (or --assoc f g h)")
    g1, g2 = (load_gesture(Path(p).read_text(encoding="utf-8")) for p in args.paths)
    hyp = linear_hypergesture(g1, g2, args.steps)
    text = save_hypergesture(hyp)
    if cfg.output:
        write_atomic(cfg.output, text.encode("utf-8"))
        print(f"homotopy: {len(hyp)} steps -> {cfg.output}", file=out)
    else:
        out.write(text)
    return EXIT_OK


FIXTURES = {
    "minimal": fixtures.minimal_gesture,
    "conducting": fixtures.conducting_gesture,
    "round": fixtures.round_gesture,
    "trefoil": fixtures.trefoil_gesture,
    "mirror-trefoil": lambda: fixtures.trefoil_gesture(mirror=True),
    "two-hands": fixtures.two_hands_gesture,
}


def cmd_fixture(args, cfg: Config, out) -> int:
    text = save_gesture(FIXTURES[args.name]())
    if cfg.output:
        write_atomic(cfg.output, text.encode("utf-8"))
    else:
        out.write(text)
    return EXIT_OK


# --- parser ----------------------------------------------------------------------------

def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--seed", type=int, default=d, help="seed for projection perturbation (default 0)")
    p.add_argument("--config", default=d, help="key=value config file")
    p.add_argument("-o", "--output", default=d, help="output path")
    p.add_argument("--csv", default=d, help="CSV export path (sonify)")
    p.add_argument("--tolerance", type=float, default=d, help="numeric tolerance (homotopy)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gestureknots", description=__doc__.split("\n")[0])
    _global_flags(parser, suppress=False)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sonify", help="render a FASTA record as a MIDI score")
    _global_flags(p, suppress=True)
    p.add_argument("fasta")
    p.add_argument("--record", help="record id to render (default: first)")
    p.add_argument("--skip-invalid", action="store_true", help="drop characters outside ACGT")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="helix parameter or sonify option, e.g. strands=3 coiling=1")
    p.set_defaults(func=cmd_sonify)

    p = sub.add_parser("braid", help="analyse a braid word such as 'B3: 1 -2 1 -2'")
    _global_flags(p, suppress=True)
    p.add_argument("word")
    p.add_argument("--dump", action="store_true", help="print the closure diagram")
    p.set_defaults(func=cmd_braid)

    p = sub.add_parser("gesture", help="close, project and classify a gesture document")
    _global_flags(p, suppress=True)
    p.add_argument("path")
    p.add_argument("--tour", action="append", metavar="A1,A2,...",
                   help="arrow ids in walking order; repeat for several components")
    p.add_argument("--pair", action="store_true", help="report the linking number of components 0 and 1")
    p.add_argument("--attempts", type=int, help="projection attempts before giving up")
    p.add_argument("--dump", action="store_true", help="print the projected diagram")
    p.set_defaults(func=cmd_gesture)

    p = sub.add_parser("homotopy", help="linear hypergesture between two gestures, or --assoc check")
    _global_flags(p, suppress=True)
    p.add_argument("paths", nargs="+")
    p.add_argument("--steps", type=int, default=5)
    p.add_argument("--assoc", action="store_true", help="check associativity of f g h")
    p.add_argument("--samples", type=int, default=1024)
    p.set_defaults(func=cmd_homotopy)

    p = sub.add_parser("fixture", help="write a bundled example gesture")
    _global_flags(p, suppress=True)
    p.add_argument("name", choices=sorted(FIXTURES))
    p.set_defaults(func=cmd_fixture)
    return parser


def _error(code: str, message: str) -> None:
    message = " ".join(str(message).split())
    print(f"error[{code}]: {message}", file=sys.stderr)


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    cfg = Config()
    try:
        if args.config:
            cfg.update(read_config(args.config))
        flags = {}
        for key in ("seed", "tolerance", "output", "csv"):
            val = getattr(args, key, None)
            if val is not None:
                flags[key] = str(val)
        if getattr(args, "attempts", None) is not None:
            flags["attempts"] = str(args.attempts)
        for item in getattr(args, "set", []):
            key, sep, value = item.partition("=")
            if not sep:
                raise SchemaError(f"--set expects KEY=VALUE, got {item!r}")
            flags[key] = value
        cfg.update(flags)
        return args.func(args, cfg, out)
    except GestureKnotsError as exc:
        _error(exc.code, exc)
        return exc.exit_status
    except OSError as exc:
        _error("io", f"{exc.strerror or exc}: {exc.filename or ''}")
        return EXIT_IO
    except ValueError as exc:
        _error("input", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
