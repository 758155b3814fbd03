"""Experiment drivers: JSON-configured subcommands writing JSON/CSV/SVG
artifacts with a provenance header (config hash, seed, package version).

Exit codes: 0 success, 2 config error, 3 resource cap exceeded, 4 internal
invariant violation (bookkeeping drift, failed removal invariant).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (
    PolymerInputs,
    cj_sequence,
    decay_audit,
    find_b0,
    polymer_report,
)
from .classical import ModelCoefficients, extract_contours, h2_relative_energy, h4_relative_energy
from .lattice import SpinConfiguration, Volume
from .mc import RunSpec, mc_run
from .quantum import FKParameters, extract_couplings, verify_decay
from .rcontour import DobrushinViolation
from .svgout import faces_svg, tiling_svg
from .tiling import Region, Tiling, degeneracy_bounds_check, enumerate_tilings, hexagon_region

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAP = 3
EXIT_INVARIANT = 4


class ConfigError(ValueError):
    pass


class CapError(ValueError):
    pass


def _load_config(path: str, required: set, optional: set) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    missing = required - set(doc)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")
    unknown = set(doc) - required - optional
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return doc


def _provenance(doc: dict, seed) -> dict:
    blob = json.dumps(doc, sort_keys=True).encode()
    return {
        "config_sha256": hashlib.sha256(blob).hexdigest(),
        "seed": seed,
        "artifact_version": __version__,
    }


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_heff(config_path: str, out: Path, seed) -> int:
    doc = _load_config(
        config_path,
        required={"dims", "U", "beta"},
        optional={"t", "max_g", "window", "shell"},
    )
    dims = tuple(int(x) for x in doc["dims"])
    vol = Volume(dims=dims, shell=int(doc.get("shell", 1)))
    sites = list(vol.sites())
    if len(sites) > 14:
        raise CapError("electron problem capped at 14 sites")
    params = FKParameters(U=float(doc["U"]), beta=float(doc["beta"]), t=float(doc.get("t", 1.0)))
    window = [tuple(s) for s in doc["window"]] if "window" in doc else None
    if len(window or sites) > 12:
        raise CapError("ion-configuration window capped at 12 sites")
    table = extract_couplings(sites, params, max_g=int(doc.get("max_g", 3)), window=window)
    decay = verify_decay(table)
    audit = decay_audit(table)
    prov = _provenance(doc, seed)
    _write_json(out / "couplings.json", {"provenance": prov, **table.to_json()})
    _write_json(out / "decay.json", {
        "provenance": prov,
        "levels": {str(g): v for g, v in sorted(decay.levels.items())},
        "trivial": decay.trivial,
        "slope": decay.slope,
        "fit_c1": decay.c1,
        "fit_c": decay.c,
        "decreasing": decay.decreasing if not decay.trivial else None,
        "audit": {
            "c1": audit.c1, "c2_tilde": audit.c2t,
            "violations": len(audit.violations), "trivial": audit.trivial,
        },
    })
    return EXIT_OK


def cmd_tilings(config_path: str, out: Path, seed) -> int:
    doc = _load_config(
        config_path,
        required=set(),
        optional={"side", "triangles", "render", "max_render"},
    )
    if "side" in doc:
        region = hexagon_region(int(doc["side"]))
    elif "triangles" in doc:
        region = Region(frozenset(frozenset(tuple(p) for p in t) for t in doc["triangles"]))
    else:
        raise ConfigError("config needs 'side' or 'triangles'")
    if len(region) > 60:
        raise CapError("enumeration capped at 60 triangles")
    tilings = enumerate_tilings(region)
    report = degeneracy_bounds_check(region)
    prov = _provenance(doc, seed)
    _write_json(out / "tilings.json", {
        "provenance": prov,
        "triangle_count": len(region),
        "count": report.count,
        "area": report.area,
        "bounds": {"lower": report.lower, "upper": report.upper,
                   "in_regime": report.in_regime, "ok": report.ok},
        "r0_closed": region.r0_closed(),
        "tilings": [t.to_json() for t in tilings],
    })
    if doc.get("render"):
        cap = int(doc.get("max_render", 32))
        for i, t in enumerate(tilings[:cap]):
            (out / f"tiling_{i:04d}.svg").write_text(tiling_svg(t))
    return EXIT_OK


def cmd_mc(config_path: str, out: Path, seed) -> int:
    doc = _load_config(
        config_path,
        required={"dims", "bc", "hamiltonian", "U", "beta", "sweeps", "thermalization"},
        optional={"seed", "move_set", "measure_stride", "cross_check_stride",
                  "shell", "replicas", "snapshot", "snapshot_stride"},
    )
    run_seed = int(doc.get("seed", seed if seed is not None else 0))
    spec = RunSpec(
        dims=tuple(int(x) for x in doc["dims"]),
        bc=str(doc["bc"]),
        hamiltonian=str(doc["hamiltonian"]),
        U=float(doc["U"]),
        beta=float(doc["beta"]),
        sweeps=int(doc["sweeps"]),
        thermalization=int(doc["thermalization"]),
        seed=run_seed,
        move_set=str(doc.get("move_set", "single-flip+hexagon-flip")),
        measure_stride=int(doc.get("measure_stride", 10)),
        cross_check_stride=int(doc.get("cross_check_stride", 200)),
        shell=int(doc.get("shell", 2)),
        snapshot_stride=int(doc.get("snapshot_stride", 0)),
    )
    replicas = int(doc.get("replicas", 1))
    prov = _provenance(doc, run_seed)
    out.mkdir(parents=True, exist_ok=True)
    summary = {"provenance": prov, "spec": doc, "replicas": []}
    workers = int(os.environ.get("FKLAB_WORKERS", "1"))
    if workers > 1 and replicas > 1:
        # replicas are independent chains on separate Philox streams, so the
        # results are identical to the serial run regardless of scheduling
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            all_series = list(pool.map(mc_run, [spec] * replicas, range(replicas)))
    else:
        all_series = [mc_run(spec, replica=rep) for rep in range(replicas)]
    def _se(values) -> float:
        v = np.asarray(values, dtype=float)
        return float(np.std(v) / math.sqrt(len(v))) if len(v) else float("nan")

    for rep in range(replicas):
        series = all_series[rep]
        header = (f"# config_sha256={prov['config_sha256']} seed={run_seed} "
                  f"replica={rep} version={__version__}")
        (out / f"series_r{rep}.csv").write_text(
            header + "\n" + "\n".join(series.csv_rows()) + "\n"
        )
        entry = {
            "replica": rep,
            "mean_energy": series.mean_energy(),
            "se_energy": _se(series.energies),
            "mean_acceptance": series.mean_acceptance(),
        }
        if spec.bc == "bc111":
            entry["mean_good_fraction"] = series.mean_good_fraction()
            entry["se_good_fraction"] = _se(series.good_fractions)
            entry["mean_width"] = series.mean_width()
            entry["se_width"] = _se(series.widths)
        if spec.bc == "bc100":
            prof = series.mean_profile()
            entry["layers"] = list(map(int, series.layers))
            entry["layer_magnetization"] = [float(x) for x in prof]
        summary["replicas"].append(entry)
        for sweep, faces in series.snapshots:
            (out / f"snapshot_r{rep}_s{sweep:06d}.svg").write_text(faces_svg(faces))
        if doc.get("snapshot") and spec.bc == "bc111":
            faces = _pinned(series.final_config)
            (out / f"snapshot_r{rep}.svg").write_text(faces_svg(faces))
    _write_json(out / "summary.json", summary)
    return EXIT_OK


def _pinned(config: SpinConfiguration):
    for c in extract_contours(config):
        if c.pinned:
            return c.faces
    raise RuntimeError("no pinned interface")


def cmd_bounds(config_path: str, out: Path, seed) -> int:
    doc = _load_config(
        config_path,
        required={"op"},
        optional={"C1", "C2", "lambda", "b", "a", "d", "t", "U", "beta", "c",
                  "couplings", "couplings_2u"},
    )
    op = doc["op"]
    prov = _provenance(doc, seed)
    if op == "polymer":
        inp = PolymerInputs(C1=float(doc["C1"]), C2=float(doc["C2"]),
                            lam=float(doc["lambda"]), b=float(doc["b"]),
                            a=float(doc.get("a", 2.0)))
        r = polymer_report(inp)
        payload = {
            "provenance": prov, "k0": r.k0, "alpha": r.alpha, "a0": r.a0,
            "C3": r.C3, "C4": r.C4, "a_prime": r.a_prime,
            "a_double_prime": r.a_double_prime, "a1": r.a1, "q": r.q,
            "zpol_bound": r.zpol_bound,
            "flags": {"cond1": r.cond1, "cond2": r.cond2, "cond4": r.cond4},
        }
    elif op == "cj":
        r = cj_sequence(d=int(doc.get("d", 3)), t=float(doc.get("t", 1.0)),
                        U=float(doc["U"]), beta=float(doc["beta"]),
                        c=float(doc.get("c", 0.5)))
        payload = {
            "provenance": prov, "ratio": r.ratio, "C0": r.c0,
            "tail_sum": None if r.tail_sum == float("inf") else r.tail_sum,
            "total": None if r.total == float("inf") else r.total,
            "converges": r.converges,
            "values": {str(j): v for j, v in sorted(r.values.items())},
        }
    elif op == "b0":
        r = find_b0(C1=float(doc["C1"]), C2=float(doc["C2"]), lam=float(doc["lambda"]),
                    a=float(doc.get("a", 2.0)))
        payload = {"provenance": prov, "b0": r.b0, "lambda0": r.lambda0, "B": r.B}
    elif op == "audit":
        from .quantum import CouplingTable
        table = CouplingTable.from_json(json.loads(Path(doc["couplings"]).read_text()))
        table2 = None
        if "couplings_2u" in doc:
            table2 = CouplingTable.from_json(json.loads(Path(doc["couplings_2u"]).read_text()))
        r = decay_audit(table, table2)
        payload = {
            "provenance": prov, "c1": r.c1, "c2_tilde": r.c2t,
            "violations": len(r.violations),
            "pair_exponent_ok": r.pair_exponent_ok, "trivial": r.trivial,
        }
    else:
        raise ConfigError(f"unknown bounds op {op!r}")
    _write_json(out / f"bounds_{op}.json", payload)
    return EXIT_OK


def cmd_energy(config_path: str, out: Path, seed) -> int:
    """Evaluate h2/h4 relative energies and the contour inventory of a configuration.

    The configuration is the boundary ground state of ``volume``/``bc`` with an
    optional list of flipped sites.
    """
    doc = _load_config(
        config_path,
        required={"volume", "U"},
        optional={"flips"},
    )
    vdoc = dict(doc["volume"])
    bc = vdoc.get("bc")
    if bc is None:
        raise ConfigError("volume block needs a 'bc' entry")
    vol = Volume.from_json(vdoc)
    if vol.shell < 2:
        raise ConfigError("energy evaluation needs shell depth >= 2")
    config = SpinConfiguration.from_boundary(vol, bc)
    for site in doc.get("flips", []):
        config = config.with_flip(tuple(int(x) for x in site))
    co = ModelCoefficients(U=float(doc["U"]))
    contours = extract_contours(config)
    payload = {
        "provenance": _provenance(doc, seed),
        "h2": h2_relative_energy(config, co),
        "h4": h4_relative_energy(config, co),
        "contours": [{"area": c.area, "pinned": c.pinned} for c in contours],
    }
    _write_json(out / "energy.json", payload)
    return EXIT_OK


def cmd_render(config_path: str, out: Path, seed) -> int:
    doc = _load_config(
        config_path,
        required={"kind", "path"},
        optional={"index"},
    )
    out.mkdir(parents=True, exist_ok=True)
    if doc["kind"] == "tiling":
        blob = json.loads(Path(doc["path"]).read_text())
        tilings = blob.get("tilings", [blob])
        idx = int(doc.get("index", 0))
        if not (0 <= idx < len(tilings)):
            raise ConfigError("tiling index out of range")
        t = Tiling.from_json(tilings[idx])
        (out / "render.svg").write_text(tiling_svg(t))
    else:
        raise ConfigError(f"unknown render kind {doc['kind']!r}")
    return EXIT_OK


COMMANDS = {
    "heff": cmd_heff,
    "tilings": cmd_tilings,
    "mc": cmd_mc,
    "bounds": cmd_bounds,
    "render": cmd_render,
    "energy": cmd_energy,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fklab",
        description="Drivers for the strong-coupling interface toolkit.",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True, help="path to the JSON run config")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="seed recorded in outputs")
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args.config, Path(args.out), args.seed)
    except ConfigError as exc:
        print(json.dumps({"error": str(exc), "code": EXIT_CONFIG}), file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError) as exc:
        if isinstance(exc, CapError) or "capped" in str(exc):
            print(json.dumps({"error": str(exc), "code": EXIT_CAP}), file=sys.stderr)
            return EXIT_CAP
        print(json.dumps({"error": str(exc), "code": EXIT_CONFIG}), file=sys.stderr)
        return EXIT_CONFIG
    except (DobrushinViolation, RuntimeError) as exc:
        print(json.dumps({"error": str(exc), "code": EXIT_INVARIANT}), file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
