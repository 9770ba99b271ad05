"""Command-line front end: variety extraction, certification runs, demo.

Exit codes: 0 all pass, 1 some check failed, 2 invalid input,
3 inconclusive-only differences.
"""

import argparse
import json
import os
import sys

import numpy as np

from .certify import VarietySamples
from .dilation import construct_psi
from .errors import DistvarError
from .inner import variety_polynomial
from .instances import (
    Instance,
    InstanceSpec,
    make_instance,
    random_recipe,
    run_certification,
)
from .report import FAIL, INCONCLUSIVE
from .serialize import (
    blaschke_from_json,
    dump_json,
    load_json,
    pair_from_json,
    psi_from_json,
    psi_to_json,
    variety_to_json,
    write_samples_csv,
    write_variety_svg,
)
from .tolerances import DEFAULT


def _parse_grid(text):
    if "x" in text:
        a, b = text.split("x", 1)
        return (int(a), int(b))
    n = int(text)
    return (max(8, int(np.sqrt(n / 4))), max(32, 4 * int(np.sqrt(n / 4))))


def _tolerances(args):
    overrides = {}
    for item in args.tol or []:
        key, _, val = item.partition("=")
        overrides[key] = float(val)
    return DEFAULT.override(**overrides)


def _fail_invalid(message):
    print(json.dumps({"error": message}, sort_keys=True))
    return 2


def _write_report(report, out_dir, fmt):
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{report.instance_id}-report.json")
    dump_json(report.to_dict(), path)
    if fmt == "csv":
        lines = ["name,anchor,status,margin"]
        for e in report.entries:
            lines.append(f"{e.name},{e.anchor},{e.status},{e.margin!r}")
        with open(os.path.join(out_dir, f"{report.instance_id}-entries.csv"), "w") as fh:
            fh.write("\n".join(lines))
            fh.write("\n")
    return path


def cmd_variety(args):
    tol = _tolerances(args)
    try:
        psi = psi_from_json(load_json(args.psi), boundary_n=min(args.boundary_samples, 1024))
    except (OSError, ValueError, KeyError, DistvarError) as exc:
        return _fail_invalid(f"invalid symbol file: {exc}")
    variety = variety_polynomial(psi)
    from .inner import distinguished_certificate

    cert = distinguished_certificate(
        psi, args.boundary_samples, max(64, args.disc_grid[0] * args.disc_grid[1] // 16),
        tol_unitary=tol.tol_unitary,
    )
    os.makedirs(args.out, exist_ok=True)
    payload = variety_to_json(variety)
    payload["distinguished"] = cert.to_dict()
    payload["psi"] = psi_to_json(psi)
    dump_json(payload, os.path.join(args.out, "variety.json"))
    samples = VarietySamples(variety, min(args.boundary_samples, 512), (8, 64))
    write_samples_csv(os.path.join(args.out, "variety-samples.csv"), samples, variety.p)
    write_variety_svg(os.path.join(args.out, "variety.svg"), samples)
    print(json.dumps({
        "p_coeffs_shape": list(variety.p.coeffs.shape),
        "distinguished": cert.status,
        "out": args.out,
    }, sort_keys=True))
    return 0 if cert.status == "pass" else 1


def _recipe_from_json(obj, seed):
    zeros = tuple(
        (complex(z["point"][0], z["point"][1]), int(z.get("multiplicity", 1)))
        for z in obj["theta_zeros"]
    )
    return InstanceSpec(
        theta_zeros=zeros,
        psi_spec=obj["psi"],
        seed=int(obj.get("seed", seed)),
        boundary_n=obj.get("boundary_n", 512),
    )


def cmd_certify(args):
    tol = _tolerances(args)
    reports = []
    try:
        if args.batch:
            for k in range(args.batch):
                spec = random_recipe(args.seed + k)
                spec = InstanceSpec(
                    theta_zeros=spec.theta_zeros, psi_spec=spec.psi_spec,
                    seed=spec.seed, boundary_n=args.boundary_samples,
                    disc_grid=args.disc_grid,
                )
                reports.append(run_certification(make_instance(spec, tol), tol=tol))
        elif args.recipe:
            spec = _recipe_from_json(load_json(args.recipe), args.seed)
            artifacts = {}
            reports.append(run_certification(
                make_instance(spec, tol), tol=tol, artifacts=artifacts
            ))
            if "bundle" in artifacts:
                from .serialize import bundle_to_json

                os.makedirs(args.out, exist_ok=True)
                dump_json(
                    bundle_to_json(artifacts["bundle"]),
                    os.path.join(args.out, f"{spec.instance_id}-bundle.json"),
                )
        elif args.pair:
            obj = load_json(args.pair)
            pair = pair_from_json(obj, tol=tol)
            if args.psi:
                psi = psi_from_json(load_json(args.psi))
            else:
                psi = construct_psi(pair, tol=tol, seed=args.seed)
            name = os.path.splitext(os.path.basename(args.pair))[0]
            spec = InstanceSpec(
                theta_zeros=(), psi_spec={"kind": "supplied"}, seed=args.seed,
                boundary_n=args.boundary_samples, disc_grid=args.disc_grid,
                label=f"pair[{name}]",
            )
            inst = Instance(spec=spec, theta=None, psi=psi, pair=pair)
            artifacts = {}
            reports.append(run_certification(inst, tol=tol, artifacts=artifacts))
            if "bundle" in artifacts:
                from .serialize import bundle_to_json

                os.makedirs(args.out, exist_ok=True)
                dump_json(
                    bundle_to_json(artifacts["bundle"]),
                    os.path.join(args.out, f"{spec.instance_id}-bundle.json"),
                )
        else:
            return _fail_invalid("one of --pair, --recipe, --batch is required")
    except (OSError, ValueError, KeyError) as exc:
        return _fail_invalid(str(exc))
    except DistvarError as exc:
        return _fail_invalid(f"{type(exc).__name__}: {exc}")

    paths = [_write_report(r, args.out, args.format) for r in reports]
    summary = {
        "instances": len(reports),
        "pass": sum(1 for r in reports if r.overall == "pass"),
        "fail": sum(1 for r in reports if r.overall == FAIL),
        "inconclusive": sum(1 for r in reports if r.overall == INCONCLUSIVE),
        "reports": [os.path.basename(p) for p in paths],
    }
    dump_json(summary, os.path.join(args.out, "summary.json"))
    print(json.dumps(summary, sort_keys=True))
    if summary["fail"]:
        return 1
    if summary["inconclusive"]:
        return 3
    return 0


def cmd_demo(args):
    """End-to-end walkthrough on the curve w^2 = z."""
    tol = _tolerances(args)
    spec = InstanceSpec(
        theta_zeros=((0j, 2),),
        psi_spec={"kind": "companion", "d": 2},
        seed=args.seed,
        boundary_n=args.boundary_samples,
        disc_grid=args.disc_grid,
    )
    inst = make_instance(spec, tol)
    report = run_certification(inst, tol=tol)
    os.makedirs(args.out, exist_ok=True)
    variety = variety_polynomial(inst.psi)
    payload = variety_to_json(variety)
    payload["psi"] = psi_to_json(inst.psi)
    dump_json(payload, os.path.join(args.out, "demo-variety.json"))
    samples = VarietySamples(variety, 256, (8, 64))
    write_samples_csv(os.path.join(args.out, "demo-samples.csv"), samples, variety.p)
    write_variety_svg(os.path.join(args.out, "demo-variety.svg"), samples)
    path = _write_report(report, args.out, args.format)
    print(json.dumps({
        "instance": report.instance_id,
        "seed": report.seed,
        "overall": report.overall,
        "report": os.path.basename(path),
    }, sort_keys=True))
    return report.exit_code()


def build_parser():
    ap = argparse.ArgumentParser(
        prog="distvar",
        description="distinguished-variety certificates for commuting matrix pairs",
    )
    ap.add_argument("--tol", action="append", metavar="NAME=VALUE",
                    help="tolerance override (repeatable)")
    ap.add_argument("--boundary-samples", type=int, default=2048)
    ap.add_argument("--disc-samples", type=_parse_grid, default=(64, 256),
                    dest="disc_grid", metavar="RxA")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="out")
    ap.add_argument("--format", choices=["json", "csv"], default="json")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("variety", help="variety polynomial and certificate from a symbol file")
    v.add_argument("psi", help="symbol JSON file")
    v.set_defaults(func=cmd_variety)

    c = sub.add_parser("certify", help="full certification pipeline")
    c.add_argument("--pair", help="pair JSON file")
    c.add_argument("--psi", help="symbol JSON file to accept (otherwise constructed)")
    c.add_argument("--recipe", help="instance recipe JSON file")
    c.add_argument("--batch", type=int, default=0, help="run N seeded random recipes")
    c.set_defaults(func=cmd_certify)

    d = sub.add_parser("demo", help="worked walkthrough on the curve w^2 = z")
    d.set_defaults(func=cmd_demo)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
