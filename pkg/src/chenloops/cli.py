"""Command-line front end.

Exit codes
  0  success
  1  the input is well formed but the answer is negative: invalid algebra,
     malformed algebra file, no class in the requested degree, a violated
     inequality
  2  missing input file or bad command-line usage
  3  ``rerun`` produced outputs that differ from the manifest

Precedence of settings: built-in defaults, then command-line flags, then the
``--config`` file (the file wins).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .bar import cohomology, distortion_exponent, min_length_detector
from .errors import AlgebraInvalid, BoundViolated, ChenError, NoClassFound, ParseError
from .manifest import RunManifest, hash_outputs, sha256_file
from .models import data_path
from .specfile import load_algebra, tomllib

CSV_COLUMNS = ["experiment", "L", "value", "error_estimate", "suplength", "volume_estimate"]


class MissingInput(Exception):
    pass


def _defaults() -> dict:
    return tomllib.loads(data_path("defaults.toml").read_text(encoding="utf-8"))


def _merge(base: dict, over: dict) -> dict:
    out = dict(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def effective_config(args) -> dict:
    cfg = _defaults()
    flags = {
        "mesh": {"domain": args.mesh, "time": args.time},
        "run": {"seed": args.seed, "samples": getattr(args, "samples", None)},
    }
    cmd = {}
    for key in ("map", "k", "lam", "r", "loop", "power", "mode", "L"):
        if getattr(args, key, None) is not None:
            cmd[key] = getattr(args, key)
    flags["command"] = cmd
    flags = {s: {k: v for k, v in d.items() if v is not None} for s, d in flags.items()}
    cfg = _merge(cfg, flags)
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise MissingInput(str(path))
        cfg = _merge(cfg, tomllib.loads(path.read_text(encoding="utf-8")))
    cfg.setdefault("command", {})
    return cfg


def _load(path: str):
    if not Path(path).exists():
        raise MissingInput(path)
    return load_algebra(path)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _record(args, cfg, files: Dict[str, str], inputs: Dict[str, str]) -> None:
    """Write ``files`` into ``args.out`` plus a manifest named after the first file."""
    from .itint import thread_count

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out_dir / name).write_text(text, encoding="utf-8")
    inputs = dict(inputs)
    if getattr(args, "config", None):
        inputs[args.config] = sha256_file(args.config)
    stem = next(iter(files)).rsplit(".", 1)[0]
    man = RunManifest(
        command=args.command,
        argv=list(args._argv),
        config=cfg,
        seed=int(cfg.get("run", {}).get("seed", 0)),
        threads=thread_count(),
        inputs=inputs,
        outputs=hash_outputs(out_dir, list(files)),
    )
    man.write(out_dir / f"{stem}.manifest.json")


def _write_outputs(args, cfg, experiment: str, rows: List[dict], report: dict, inputs: Dict[str, str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    text = buf.getvalue()
    _record(args, cfg, {f"{experiment}.csv": text,
                        f"{experiment}.report.json": json.dumps(report, indent=2, sort_keys=True) + "\n"}, inputs)
    return text


# ---------------------------------------------------------------------------
# symbolic commands


def cmd_validate(args) -> int:
    try:
        A = _load(args.file)
    except (AlgebraInvalid, ParseError) as exc:
        print(f"INVALID: {exc}")
        return 1
    print(f"valid: {A.name or args.file}")
    print(f"  {len(A)} basis elements up to degree {A.degree_cap}")
    print("  checked: degrees, graded commutativity, associativity, d² = 0, Leibniz rule")
    return 0


def _reference_words(path: Optional[str]):
    if path is None:
        return None
    if not Path(path).exists():
        raise MissingInput(path)
    text = Path(path).read_text(encoding="utf-8")
    return [tuple(line.strip().split("|")) for line in text.splitlines() if line.strip() and not line.startswith("#")]


def _symbolic_config(args) -> dict:
    return {"command": {k: v for k, v in vars(args).items() if not k.startswith("_") and k != "out"}}


def _emit(args, text: str, name: str) -> None:
    print(text, end="")
    if args.out:
        inputs = {args.file: sha256_file(args.file)}
        if getattr(args, "reference_basis", None):
            inputs[args.reference_basis] = sha256_file(args.reference_basis)
        _record(args, _symbolic_config(args), {name: text}, inputs)


def cmd_bar(args) -> int:
    A = _load(args.file)
    rep = cohomology(A, args.degree, args.max_length, _reference_words(args.reference_basis))
    n = args.n if args.n is not None else args.degree + 1
    summary = {"rank": rep.rank}
    if rep.rank:
        r = rep.min_length
        summary.update(
            representative=rep.representatives[0].to_text("integral"),
            min_length=r,
            distortion_exponent=distortion_exponent(n, r) if r and r >= 1 and n >= 2 else None,
        )
    if args.format == "json":
        doc = rep.to_dict()
        doc["summary"] = summary
        text = json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=True) + "\n"
    else:
        text = rep.to_text() + "\n"
        if rep.rank:
            text += (
                f"rank {rep.rank}; representative {summary['representative']}; "
                f"min length {summary['min_length']}; distortion exponent {summary['distortion_exponent']}\n"
            )
        else:
            text += "rank 0\n"
    _emit(args, text, f"bar_d{args.degree}.{'json' if args.format == 'json' else 'txt'}")
    return 0


def cmd_detect(args) -> int:
    A = _load(args.file)
    r, rep = min_length_detector(A, args.degree, max_length=args.max_length)
    n = args.n if args.n is not None else args.degree + 1
    e = distortion_exponent(n, r)
    if args.format == "json":
        text = json.dumps({"degree": args.degree, "n": n, "r": r, "exponent": e,
                           "representative": rep.to_dict()}, indent=2, ensure_ascii=False, sort_keys=True) + "\n"
    else:
        text = f"r = {r}; representative {rep.to_text('integral')}; n = {n}; distortion exponent {e}\n"
    _emit(args, text, f"detect_d{args.degree}.{'json' if args.format == 'json' else 'txt'}")
    return 0


# ---------------------------------------------------------------------------
# numeric commands


def build_map(spec: str, cfg_cmd: dict):
    """``name`` or ``outer+inner+...`` (composition, applied right to left)."""
    from . import maps

    parts = spec.split("+")
    built = []
    for name in parts:
        params = {"name": name}
        if name == "suspension":
            params["k"] = int(cfg_cmd.get("k", 2))
        elif name == "dilation":
            params["lam"] = float(cfg_cmd.get("lam", 2.0))
        built.append(maps.map_from_dict(params))
    f = built[-1]
    for g in reversed(built[:-1]):
        f = maps.compose(g, f)
    return f


def _row(experiment, L, value, err, sup, vol):
    return {"experiment": experiment, "L": L, "value": value, "error_estimate": err, "suplength": sup,
            "volume_estimate": vol}


def cmd_degree(args) -> int:
    from . import geometry, itint, oracles

    cfg = effective_config(args)
    c = cfg["command"]
    mesh, cells = int(cfg["mesh"]["domain"]), int(cfg["mesh"]["time"])
    name = c.get("map", "identity")
    f = build_map(name, c)
    res = itint.degree_via_loops(f, mesh, cells)
    F = geometry.desuspend(f, geometry.Sweepout(f.source_dim))
    sup = geometry.suplength(F, mesh, cells)
    vol = geometry.volume_estimate(F, mesh, cells)
    vb = itint.volume_bound_check([itint.FormSpec.volume(f.source_dim)], F, mesh, cells)
    report = {"pairing": res.to_dict(), "map": f.to_dict(), "volume_bound": vb.to_dict()}
    if f.source_dim == 2:
        report["preimage_oracle"] = oracles.preimage_degree(f)
    rows = [_row(f"degree:{name}", 1, res.value, res.error_estimate, sup, vol)]
    sys.stdout.write(_write_outputs(args, cfg, "degree", rows, report, {}))
    return 0 if vb.passed else 1


def cmd_hopf(args) -> int:
    from . import geometry, itint, oracles

    cfg = effective_config(args)
    c = cfg["command"]
    mesh, cells = int(cfg["mesh"]["domain"]), int(cfg["mesh"]["time"])
    name = c.get("map", "hopf")
    f = build_map(name, c)
    res = itint.hopf_via_loops(f, mesh, cells)
    F = geometry.desuspend(f, geometry.Sweepout(f.source_dim))
    w = itint.FormSpec.volume(f.target_dim)
    sup = geometry.suplength(F, mesh, cells)
    vol = geometry.volume_estimate(F, mesh, cells)
    vb = itint.volume_bound_check([w, w], F, mesh, cells)
    report = {"pairing": res.to_dict(), "map": f.to_dict(), "volume_bound": vb.to_dict()}
    if args.oracle and f.source_dim == 3:
        lk = oracles.linking_hopf(f)
        report["linking_oracle"] = {"value": lk.value, "components": lk.components}
    rows = [_row(f"hopf:{name}", 1, res.value, res.error_estimate, sup, vol)]
    sys.stdout.write(_write_outputs(args, cfg, "hopf", rows, report, {}))
    return 0 if vb.passed else 1


def bound_setup(r: int, loop: str, L: int):
    """Forms, family and base point for the length-bound experiment."""
    from . import geometry
    from .forms import FormSpec

    if loop != "greatcircle":
        raise ValueError("only the great-circle loop is wired into the CLI")
    if r == 1:
        F = geometry.concat_power_family(geometry.Sweepout(2), L)
        return [FormSpec.volume(2)], F, [0.0], geometry.concat_power(geometry.great_circle(2), L)
    if r == 2:
        w = FormSpec.volume(3)
        base = geometry.standard_deformation(geometry.great_circle(3), 4)
        return [w, w], geometry.concat_power_family(base, L), [0.0] * 4, None
    raise ValueError("bound-check supports r in {1, 2}")


def cmd_bound_check(args) -> int:
    from . import geometry, itint

    cfg = effective_config(args)
    c = cfg["command"]
    r, loop, L = int(c.get("r", 1)), c.get("loop", "greatcircle"), int(c.get("power", 1))
    forms, F, u0, gamma = bound_setup(r, loop, L)
    rep = itint.check_length_bound(
        forms, F, u0, int(cfg["run"]["samples"]), int(cfg["run"]["seed"]),
        float(cfg["tolerance"]["bound_slack"]), gamma=gamma, raise_on_violation=False,
    )
    vol = geometry.volume_estimate(F, 4, 8)
    rows = [_row(f"bound:r{r}", L, rep.max_ratio, 0.0, rep.length, vol)]
    sys.stdout.write(_write_outputs(args, cfg, f"bound_r{r}_L{L}", rows, rep.to_dict(), {}))
    print("PASS" if rep.passed else "FAIL", file=sys.stderr)
    return 0 if rep.passed else 1


def cmd_sharpness(args) -> int:
    from . import itint

    cfg = effective_config(args)
    c = cfg["command"]
    Ls = c.get("L", "1,2,4,8")
    if isinstance(Ls, str):
        Ls = [int(x) for x in Ls.split(",") if x.strip()]
    mode = c.get("mode", "degree")
    mesh, cells = int(cfg["mesh"]["domain"]), int(cfg["mesh"]["time"])
    rows = itint.sharpness_scan(Ls, mode, mesh, cells)
    report = {"mode": mode, "rows": [r.to_dict() for r in rows]}
    sys.stdout.write(_write_outputs(args, cfg, f"sharpness_{mode}", [r.to_dict() for r in rows], report, {}))
    return 0


def cmd_rerun(args) -> int:
    path = Path(args.manifest)
    if not path.exists():
        raise MissingInput(str(path))
    man = RunManifest.read(path)
    out_dir = args.out or str(path.parent)
    argv = list(man.argv)
    if "--out" in argv:
        i = argv.index("--out")
        argv[i + 1] = out_dir
    else:
        argv = argv[:1] + ["--out", out_dir] + argv[1:]
    for name, digest in man.inputs.items():
        if not Path(name).exists() or sha256_file(name) != digest:
            print(f"warning: input {name} changed since the recorded run", file=sys.stderr)
    saved = sys.stdout
    sys.stdout = io.StringIO()
    try:
        code = main(argv)
    finally:
        sys.stdout = saved
    fresh = hash_outputs(out_dir, list(man.outputs))
    same = fresh == man.outputs
    for name in sorted(man.outputs):
        status = "identical" if fresh[name] == man.outputs[name] else "DIFFERENT"
        print(f"{name}: {status}")
    if code != 0:
        return code
    return 0 if same else 3


# ---------------------------------------------------------------------------


def _add_numeric(p):
    p.add_argument("--mesh", type=int, default=None, help="domain cells per pi (default from config)")
    p.add_argument("--time", type=int, default=None, help="time cells per smooth piece")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--config", default=None, help="TOML file; its values override flags")
    p.add_argument("--out", default="chen_out", help="directory for CSV, report and manifest")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chenloops", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"chenloops {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the axioms of an algebra file")
    p.add_argument("file")

    for name in ("bar", "detect"):
        p = sub.add_parser(name, help="bar cohomology report" if name == "bar" else "minimal detecting length")
        p.add_argument("file")
        p.add_argument("--degree", type=int, required=True)
        p.add_argument("--max-length", type=int, default=None)
        p.add_argument("--n", type=int, default=None, help="sphere dimension for the exponent (default degree+1)")
        p.add_argument("--format", choices=["text", "json"], default="text")
        p.add_argument("--out", default=None, help="also save the report and a run manifest here")
        if name == "bar":
            p.add_argument("--reference-basis", default=None, help="file of words a|b|c to count separately")

    p = sub.add_parser("degree", help="degree of a self-map of S^2 via loops")
    p.add_argument("--map", default=None, help="identity, reflection, suspension, dilation, rotation or a+b")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--lam", type=float, default=None)
    _add_numeric(p)

    p = sub.add_parser("hopf", help="Hopf invariant of a map S^3 -> S^2 via loops")
    p.add_argument("--map", default=None, help="hopf, constant, hopf+quaternion_square, ...")
    p.add_argument("--oracle", action="store_true", help="also compute the linking-number oracle")
    _add_numeric(p)

    p = sub.add_parser("bound-check", help="iterated-integral length bound on a loop")
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--loop", default=None)
    p.add_argument("--power", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    _add_numeric(p)

    p = sub.add_parser("sharpness", help="pairings of concatenation powers")
    p.add_argument("--mode", choices=["degree", "hopf"], default=None)
    p.add_argument("--L", default=None, help="comma-separated powers, e.g. 1,2,4,8")
    _add_numeric(p)

    p = sub.add_parser("rerun", help="replay a run manifest and compare outputs")
    p.add_argument("manifest")
    p.add_argument("--out", default=None)
    return ap


COMMANDS = {
    "validate": cmd_validate,
    "bar": cmd_bar,
    "detect": cmd_detect,
    "degree": cmd_degree,
    "hopf": cmd_hopf,
    "bound-check": cmd_bound_check,
    "sharpness": cmd_sharpness,
    "rerun": cmd_rerun,
}


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args._argv = argv
    try:
        return COMMANDS[args.command](args)
    except MissingInput as exc:
        print(f"error: no such file: {exc}", file=sys.stderr)
        return 2
    except NoClassFound as exc:
        print(f"NoClassFound: {exc}", file=sys.stderr)
        return 1
    except (AlgebraInvalid, ParseError) as exc:
        print(f"INVALID: {exc}", file=sys.stderr)
        return 1
    except BoundViolated as exc:
        print(f"BoundViolated: {exc} (ratio {exc.ratio})", file=sys.stderr)
        return 1
    except (ChenError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
