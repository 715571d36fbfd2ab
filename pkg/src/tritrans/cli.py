"""Command-line front end.

    tritrans verify q-minus --q 2,3
    tritrans verify vo --m 2,3 --eps=-1,+1
    tritrans verify reference --family "paley9,grid(3)"
    tritrans orbits q-minus --q 3 --out parts
    tritrans export vo --m 2 --eps=-1 --out graphs

Exit codes: 0 every target instance certified, 1 some target instance was
not, 2 internal inconsistency, usage error or I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import orbits, srg, talg, verifier

TARGETS = ("q-minus", "vo", "reference", "all")
DEFAULT_Q = "2,3,4"
DEFAULT_M = "2,3,4"
DEFAULT_EPS = "-1,+1"
DEFAULT_FAMILIES = "cycle5,grid(3),grid(4),paley9,complete_multipartite(3,3)"
CONFIG_KEYS = ("q", "m", "eps", "family", "out", "seed", "threads", "allow_large", "export")


@dataclass
class RunConfig:
    command: str
    target: str
    q: list[int]
    mes: list[tuple[int, int]]
    families: list[str]
    out: Path
    seed: int = verifier.DEFAULT_SEED
    threads: int = 1
    allow_large: bool = False
    export: Path | None = None

    def selectors(self) -> list[tuple]:
        sels = []
        if self.target in ("q-minus", "all"):
            sels += [("qminus5", q) for q in self.q]
        if self.target in ("vo", "all"):
            sels += [("vo", m, e) for m, e in self.mes]
        if self.target in ("reference", "all"):
            sels += [("reference", f) for f in self.families]
        return sels


def split_list(text: str) -> list[str]:
    """Split on commas that are not inside parentheses."""
    out, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            out.append(cur.strip())
            cur = ""
            continue
        depth += (ch == "(") - (ch == ")")
        cur += ch
    out.append(cur.strip())
    return [s for s in out if s]


def read_config(path) -> dict[str, str]:
    cfg = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{n}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ValueError(f"{path}:{n}: unknown key {key!r}")
        cfg[key] = val
    return cfg


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tritrans",
                                 description="Certify triple transitivity of strongly regular graphs.")
    sub = ap.add_subparsers(dest="command", required=True)
    helps = {
        "verify": "certify the selected instances and write JSON reports",
        "orbits": "check named two-point-stabiliser orbits and write CSV partitions",
        "export": "write graph6/DIMACS graphs and sparse matrix files",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("target", choices=TARGETS, help="instance family")
        p.add_argument("--q", help=f"comma-separated field orders for q-minus (default {DEFAULT_Q})")
        p.add_argument("--m", help=f"comma-separated half-dimensions for vo (default {DEFAULT_M})")
        p.add_argument("--eps", help=f"comma-separated form types for vo (default {DEFAULT_EPS}); "
                                     "write --eps=-1 for a leading minus")
        p.add_argument("--family", help="comma-separated reference families "
                                        f"(default {DEFAULT_FAMILIES})")
        p.add_argument("--out", help="output directory (default: reports, parts or graphs)")
        p.add_argument("--seed", type=int, help=f"RNG seed for extra generators "
                                                 f"(default {verifier.DEFAULT_SEED})")
        p.add_argument("--threads", type=int, help="worker processes (default 1)")
        p.add_argument("--allow-large", action="store_true", default=None,
                       help="permit q=5 for q-minus")
        p.add_argument("--export", help="also write graph files into this directory (verify only)")
        p.add_argument("--config", help="key=value file; command-line flags take precedence")
    return ap


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    return text.strip().lower() in ("1", "true", "yes", "on")


def make_config(args: argparse.Namespace) -> RunConfig:
    cfg = read_config(args.config) if args.config else {}
    for key in CONFIG_KEYS:
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    qs = [int(x) for x in split_list(str(cfg.get("q", DEFAULT_Q)))]
    ms = [int(x) for x in split_list(str(cfg.get("m", DEFAULT_M)))]
    eps = [int(x) for x in split_list(str(cfg.get("eps", DEFAULT_EPS)))]
    allow_large = _bool(cfg.get("allow_large", False))
    for q in qs:
        if q not in (2, 3, 4, 5):
            raise ValueError(f"q={q} outside 2..5")
        if q == 5 and not allow_large:
            raise ValueError("q=5 needs --allow-large")
    for m in ms:
        if m not in (2, 3, 4):
            raise ValueError(f"m={m} outside 2..4")
    for e in eps:
        if e not in (1, -1):
            raise ValueError(f"eps={e} must be +1 or -1")
    families = split_list(str(cfg.get("family", DEFAULT_FAMILIES)))
    for fam in families:
        srg.build_reference(fam)  # raises on unknown names
    default_out = {"verify": "reports", "orbits": "parts", "export": "graphs"}[args.command]
    threads = int(cfg.get("threads", 1))
    if threads < 1:
        raise ValueError("threads must be positive")
    return RunConfig(
        command=args.command,
        target=args.target,
        q=qs,
        mes=[(m, e) for m in ms for e in eps],
        families=families,
        out=Path(cfg.get("out", default_out)),
        seed=int(cfg.get("seed", verifier.DEFAULT_SEED)),
        threads=threads,
        allow_large=allow_large,
        export=Path(cfg["export"]) if cfg.get("export") else None,
    )


def _name(sel: tuple) -> str:
    if sel[0] == "qminus5":
        return f"qminus5_q{sel[1]}"
    if sel[0] == "vo":
        return f"vo_m{sel[1]}_eps{sel[2]:+d}"
    return "ref_" + sel[1].replace("(", "_").replace(")", "").replace(",", "_")


def _is_target(sel: tuple) -> bool:
    return sel[0] != "reference" or verifier.is_known_family(sel[1])


def _mkdir(path: Path) -> None:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {path}: {exc.strerror}") from exc


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def _run_one(args):
    sel, seed, allow_large = args
    return verifier.certify_any(sel, seed, allow_large)


def cmd_verify(cfg: RunConfig) -> int:
    sels = cfg.selectors()
    jobs = [(s, cfg.seed, cfg.allow_large) for s in sels]
    if cfg.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            reports = list(pool.map(_run_one, jobs))
    else:
        reports = [_run_one(j) for j in jobs]
    _mkdir(cfg.out)
    print(f"{'instance':32s} {'v':>4s} {'T0':>3s} {'T':>4s} {'total':>5s}  verdict")
    status = 0
    for sel, rep in zip(sels, reports):
        _write(cfg.out / f"{_name(sel)}.json", rep.to_json())
        dim_t = "-" if rep.dim_T is None else str(rep.dim_T)
        print(f"{_name(sel):32s} {rep.params[0]:4d} {rep.dim_T0:3d} {dim_t:>4s} "
              f"{rep.block_decomp.total:5d}  {rep.verdict}")
        if _is_target(sel) and not rep.certified:
            status = 1
    if cfg.export is not None:
        _mkdir(cfg.export)
        for sel in sels:
            g, _ = verifier.instance_action(sel)
            _export_graph(g, cfg.export / _name(sel))
    return status


def _export_graph(g: srg.SrgInstance, stem: Path) -> None:
    for fmt, ext in (("graph6", ".g6"), ("dimacs", ".dimacs")):
        path = stem.with_suffix(ext)
        try:
            srg.export_graph(g, path, fmt)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def cmd_orbits(cfg: RunConfig) -> int:
    _mkdir(cfg.out)
    status = 0
    for sel in cfg.selectors():
        g, action = verifier.instance_action(sel)
        bd = orbits.block_decomposition(action, g)
        name = _name(sel)
        print(f"{name}: D = {bd.d}, total {bd.total}")
        path = cfg.out / f"{name}_partitions.csv"
        try:
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["stabilizer", "subconstituent", "class", "representative", "size"])
                for i in (1, 2):
                    for j in (1, 2):
                        for k, rep, size in orbits.partition_rows(g, bd, i, j):
                            w.writerow([f"H{i}", f"Delta{j}", k, g.vertex_label(rep), size])
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror}") from exc
        kind = g.descriptor.get("kind")
        if kind == "qminus5" or (kind == "vo" and g.space.m >= 3):
            for c in orbits.named_subset_orbit_check(action, g, bd):
                print(f"  {'ok  ' if c.passed else 'FAIL'} {c.name}: {c.expected} observed {c.observed}")
                if not c.passed:
                    status = 2
            if kind == "qminus5" and g.space.ctx.p != 2:
                fused = orbits.rho_fuses(g)
                print(f"  {'ok  ' if fused else 'FAIL'} rho maps S1 onto S2")
                if not fused:
                    status = 2
    return status


def cmd_export(cfg: RunConfig) -> int:
    _mkdir(cfg.out)
    for sel in cfg.selectors():
        g = verifier.instance_action(sel)[0]
        stem = cfg.out / _name(sel)
        _export_graph(g, stem)
        written = [stem.with_suffix(".g6"), stem.with_suffix(".dimacs")]
        if g.space is not None:
            path = stem.with_suffix(".points.csv")
            g.space.point_csv(path, g.coords)
            written.append(path)
        path = stem.with_suffix(".t0.txt")
        talg.export_t0(g, path)
        written.append(path)
        if g.v <= talg.CLOSURE_MAX_V:
            _, span = talg.dim_T_closure(g, return_span=True)
            path = stem.with_suffix(".basis.txt")
            talg.export_basis(span, g.v, path)
            written.append(path)
        edges = int(g.adj.sum()) // 2
        print(f"{_name(sel)}: v={g.v} edges={edges} -> " + ", ".join(str(p) for p in written))
    return 0


def _fix_eps(argv: list[str]) -> list[str]:
    """Let '--eps -1,+1' through argparse, which would read '-1,+1' as an option."""
    out = []
    it = iter(range(len(argv)))
    for i in it:
        if argv[i] == "--eps" and i + 1 < len(argv) and argv[i + 1][:1] in "-+":
            out.append("--eps=" + argv[i + 1])
            next(it, None)
        else:
            out.append(argv[i])
    return out


def main(argv=None) -> int:
    argv = _fix_eps(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
    except (ValueError, OSError) as exc:
        parser.error(str(exc))
    commands = {"verify": cmd_verify, "orbits": cmd_orbits, "export": cmd_export}
    try:
        return commands[cfg.command](cfg)
    except verifier.InconsistencyError as exc:
        print(f"inconsistency: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"inconsistency: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
