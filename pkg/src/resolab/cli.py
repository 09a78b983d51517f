"""Command-line front end.

Commands: scatter, resonances, verify, reconstruct, uniqueness.
Exit codes: 0 success or skip, 1 check failure, 2 usage or parse error,
3 numerical nonconvergence.  All outputs are deterministic: sorted JSON
keys, floats at 17 significant digits, settings echoed into every file.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .errors import (
    DomainError,
    Inapplicable,
    NonconvergenceError,
    PotentialFormatError,
    ResolabError,
)
from . import identities, jost, spectrum, uniqueness
from .potential import Potential, PotentialPair, is_identically_zero, load_potential
from .svgplot import zero_set_svg
from .util import canonical_json, fmt_float, parallel_map, write_text

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _parse_region(text: str):
    parts = text.split(",")
    if len(parts) != 4:
        raise DomainError("--region needs re0,re1,im0,im1")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise DomainError(f"bad region value: {exc}") from exc


def _parse_grid(text: str) -> np.ndarray:
    imag = 0.0
    body = text
    if "," in text:
        body, imag_text = text.split(",", 1)
        try:
            imag = float(imag_text)
        except ValueError as exc:
            raise DomainError(f"bad grid imaginary part: {exc}") from exc
    parts = body.split(":")
    if len(parts) != 3:
        raise DomainError("--grid needs start:stop:count[,imag]")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise DomainError(f"bad grid value: {exc}") from exc
    if count < 1:
        raise DomainError("grid count must be positive")
    return np.linspace(start, stop, count) + 1j * imag


def _settings_lines(settings: dict) -> list[str]:
    return [f"# {key} = {settings[key]}" for key in sorted(settings)]


def _base_settings(args) -> dict:
    return {
        "command": args.command,
        "tol": args.tol,
        "threads": args.threads,
        "format": getattr(args, "format", "json"),
        "seed_env": os.environ.get("RESOLAB_SEED", ""),
        "potentials": [os.path.basename(p) for p in args.potential or []],
    }


def _load_potentials(args, need: int, exactly: bool = True) -> list[Potential]:
    paths = args.potential or []
    if exactly and len(paths) != need:
        raise DomainError(f"{args.command} needs exactly {need} --potential file(s)")
    if not exactly and len(paths) < need:
        raise DomainError(f"{args.command} needs at least {need} --potential file(s)")
    return [load_potential(p) for p in paths]


def cmd_scatter(args) -> int:
    (q,) = _load_potentials(args, 1)
    ks = _parse_grid(args.grid)
    if np.any(ks.imag != 0.0):
        raise DomainError("scatter works on a real frequency grid")
    ks = ks.real
    if np.any(ks == 0.0):
        raise DomainError("grid contains k = 0 where T and R are undefined")
    both = np.concatenate([ks, -ks]).astype(complex)
    om_all, s_all = jost.omega_s_many(q, both)
    n = len(ks)
    om, s_pos, s_neg = om_all[:n], s_all[:n], s_all[n:]
    T = 2j * ks / om
    Rp = s_pos / om
    Rm = s_neg / om
    unit = np.abs(np.abs(T) ** 2 + np.abs(Rp) ** 2 - 1.0)

    settings = _base_settings(args)
    settings.update({"grid": args.grid, "rows": n})
    if args.format == "json":
        rows = [
            {
                "k": float(ks[i]),
                "omega": [om[i].real, om[i].imag],
                "s": [s_pos[i].real, s_pos[i].imag],
                "T_abs": float(np.abs(T[i])),
                "Rplus_abs": float(np.abs(Rp[i])),
                "Rminus_abs": float(np.abs(Rm[i])),
                "unitarity_residual": float(unit[i]),
            }
            for i in range(n)
        ]
        write_text(args.out, canonical_json({"settings": settings, "rows": rows}))
    else:
        lines = _settings_lines(settings)
        lines.append("k,re_omega,im_omega,re_s,im_s,abs_T,abs_Rplus,abs_Rminus,unitarity_residual")
        for i in range(n):
            lines.append(
                ",".join(
                    fmt_float(v)
                    for v in (
                        ks[i],
                        om[i].real,
                        om[i].imag,
                        s_pos[i].real,
                        s_pos[i].imag,
                        np.abs(T[i]),
                        np.abs(Rp[i]),
                        np.abs(Rm[i]),
                        unit[i],
                    )
                )
            )
        write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_resonances(args) -> int:
    (q,) = _load_potentials(args, 1)
    if not args.region:
        raise DomainError("resonances needs --region")
    region = _parse_region(args.region)
    label = args.function
    if label == "omega":
        zs = spectrum.find_omega_zeros(q, region, tol=args.tol)
    else:
        zs = spectrum.find_s_zeros(q, region, tol=args.tol)
    settings = _base_settings(args)
    settings.update({"region": list(region), "function": label})
    payload = spectrum.zero_set_to_dict(zs)
    payload["settings"] = settings
    write_text(args.out, canonical_json(payload))
    if args.format == "svg":
        svg_path = os.path.splitext(args.out)[0] + ".svg"
        write_text(svg_path, zero_set_svg(zs, title=f"zeros of {label}"))
    return EXIT_OK


def _default_identity_grid() -> list[complex]:
    real = np.linspace(0.5, 20.0, 30)
    box = [complex(r, i) for r in (1.0, 3.0, 7.0) for i in (-1.5, -0.5, 0.5, 1.5)]
    return [complex(v) for v in real] + box


def _suite_checks(args, suite: str, pots: list[Potential]):
    """Callables producing (name, report-dict-or-skip) entries."""
    q = pots[0]
    checks = []

    def skipped(name, reason):
        return {"name": name, "skipped": True, "reason": str(reason)}

    def guard(name, fn):
        def run():
            try:
                rep = fn()
                return rep.to_dict() if hasattr(rep, "to_dict") else rep
            except Inapplicable as exc:
                return skipped(name, exc)

        return run

    if suite in ("identities", "all"):
        grid = _default_identity_grid()
        checks.append(guard("product_identity", lambda: identities.check_product_identity(q, grid)))
        checks.append(
            guard(
                "wronskian_constancy",
                lambda: identities.check_wronskian_constancy(q, [1.0, 2.5 - 0.5j, 5.0 + 1.0j]),
            )
        )
        checks.append(
            guard(
                "conjugation_symmetry",
                lambda: identities.check_conjugation_symmetry(q, grid[:20]),
            )
        )
    if suite in ("reflection", "all"):
        grid = [complex(v) for v in np.linspace(1.0, 10.0, 50)]
        checks.append(guard("reflection_invariance", lambda: identities.check_reflection(q, grid)))
    if suite in ("asymptotics", "all"):
        taus = np.linspace(-25.0, -14.0, 12)

        def asym():
            return identities.check_asymptotics(q, taus)

        checks.append(guard("deep_axis_asymptotics", asym))
    if suite in ("counting", "all"):

        def counting():
            if is_identically_zero(q):
                raise Inapplicable("potential outside the admissible class (identically zero)")
            r = args.radius or 20.0
            zs = spectrum.find_omega_zeros(q, (-(r + 1), r + 1, -(r + 1), r + 1), tol=args.tol)
            return identities.verify_counting_trend(zs, [r / 2, 3 * r / 4, r])

        checks.append(guard("zero_counting_trend", counting))
    if suite in ("uniqueness", "all") and (len(pots) >= 2 or suite == "uniqueness"):

        def fourform():
            if len(pots) == 2:
                pair = PotentialPair(pots[0], pots[1], args.prefix)
            else:
                pair = PotentialPair(q, q, args.prefix)
            ks = [1.0 + 0.2j, 2.0, 3.5 - 0.8j, 5.0 + 1.0j, 0.75]
            worst = 0.0
            samples = []
            for k in ks:
                ev = uniqueness.g1(pair, k)
                forms = ev.populated()
                scale = max(max(abs(f) for f in forms), 1e-10)
                spread = max(abs(x - y) for x in forms for y in forms)
                rel = spread / scale
                worst = max(worst, rel)
                samples.append({"k": [ev.k.real, ev.k.imag], "residual": rel})
            return {
                "name": "four_form_agreement",
                "threshold": uniqueness.FOUR_FORM_TOLERANCE,
                "max_rel_residual": worst,
                "pass": worst <= uniqueness.FOUR_FORM_TOLERANCE,
                "samples": samples,
            }

        checks.append(guard("four_form_agreement", fourform))
    return checks


def cmd_verify(args) -> int:
    pots = _load_potentials(args, 1, exactly=False)
    suite = args.suite
    valid = {"identities", "asymptotics", "reflection", "counting", "uniqueness", "all"}
    if suite not in valid:
        raise DomainError(f"--suite must be one of {sorted(valid)}")
    runners = _suite_checks(args, suite, pots)
    results = parallel_map(lambda fn: fn(), runners, threads=args.threads)
    all_pass = all(r.get("pass", True) or r.get("skipped", False) for r in results)
    settings = _base_settings(args)
    settings.update({"suite": suite, "radius": args.radius, "prefix": args.prefix})
    report = {"settings": settings, "checks": results, "pass": all_pass}
    write_text(args.out, canonical_json(report))
    for r in results:
        status = "SKIP" if r.get("skipped") else ("PASS" if r.get("pass") else "FAIL")
        print(f"{status:4s} {r['name']}" + (f" ({r['reason']})" if r.get("skipped") else ""))
    return EXIT_OK if all_pass else EXIT_CHECK_FAILED


def cmd_reconstruct(args) -> int:
    (q,) = _load_potentials(args, 1)
    if not args.zeros:
        raise DomainError("reconstruct needs --zeros ZERO_SET.json")
    import json

    try:
        with open(args.zeros, encoding="utf-8") as fh:
            zs_data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read zero set {args.zeros}: {exc}") from exc
    zs = spectrum.zero_set_from_dict(zs_data)
    radius = args.radius or spectrum.coverage_radius(zs.region)
    zs = spectrum.restrict_to_disk(zs, radius)
    probes = [radius / 16, radius / 10, radius / 6, radius / 4]
    recon = identities.hadamard_reconstruct(zs, probes)
    ks = _parse_grid(args.grid) if args.grid else np.linspace(1.0, 10.0, 50) + 0j
    direct = jost.omega_many(q, ks)
    hat = recon.omega_hat(ks)
    rel = np.abs(hat - direct) / np.abs(direct)

    settings = _base_settings(args)
    settings.update(
        {
            "zeros_file": os.path.basename(args.zeros),
            "truncation_radius": radius,
            "probes": probes,
            "s_exponent": recon.s_exponent,
        }
    )
    lines = _settings_lines(settings)
    lines.append(f"# c_omega = {fmt_float(recon.c_omega.real)} + {fmt_float(recon.c_omega.imag)}i")
    for kp, est in recon.limit_samples:
        lines.append(
            f"# prefactor_sample k={fmt_float(kp)}: {fmt_float(est.real)} + {fmt_float(est.imag)}i"
        )
    lines.append("k,abs_omega_direct,abs_omega_hat,rel_error")
    for i in range(len(ks)):
        lines.append(
            ",".join(
                fmt_float(v)
                for v in (ks[i].real, abs(direct[i]), abs(hat[i]), rel[i])
            )
        )
    write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_uniqueness(args) -> int:
    pots = _load_potentials(args, 2)
    pair = PotentialPair(pots[0], pots[1], args.prefix)
    config = uniqueness.DemoConfig(
        theorem=args.theorem,
        radius=args.radius or 12.0,
        search_tol=args.tol,
    )
    try:
        report = uniqueness.theorem_demo(pair, config)
    except Inapplicable as exc:
        report = {"theorem": args.theorem, "skipped": True, "reason": str(exc)}
        write_text(args.out, canonical_json({"settings": _base_settings(args), "report": report}))
        print(f"SKIP theorem {args.theorem}: {exc}")
        return EXIT_OK
    settings = _base_settings(args)
    settings.update({"theorem": args.theorem, "prefix": args.prefix, "radius": config.radius})
    write_text(args.out, canonical_json({"settings": settings, "report": report}))
    print(("PASS" if report["pass"] else "FAIL") + f" theorem {args.theorem}: {report['conclusion']}")
    return EXIT_OK if report["pass"] else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resolab",
        description="Jost functions, resonances and spectral identities for potentials on [0, 1]",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_required=True):
        p.add_argument("--potential", action="append", help="potential JSON file (repeatable)")
        p.add_argument("--region", help="re0,re1,im0,im1")
        p.add_argument("--grid", help="start:stop:count[,imag]")
        p.add_argument("--radius", type=float, default=None)
        p.add_argument("--suite", default="all")
        p.add_argument("--out", required=out_required)
        p.add_argument("--format", default=None, choices=["json", "csv", "svg"])
        p.add_argument("--tol", type=float, default=1e-10)
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        p.add_argument("--prefix", type=float, default=0.5)
        p.add_argument("--theorem", type=int, default=1)
        p.add_argument("--zeros", help="zero-set JSON file")
        p.add_argument("--function", default="omega", choices=["omega", "s"])

    for name in ("scatter", "resonances", "verify", "reconstruct", "uniqueness"):
        common(sub.add_parser(name))
    return parser


_HANDLERS = {
    "scatter": cmd_scatter,
    "resonances": cmd_resonances,
    "verify": cmd_verify,
    "reconstruct": cmd_reconstruct,
    "uniqueness": cmd_uniqueness,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    if args.format is None:
        args.format = "csv" if args.command in ("scatter", "reconstruct") else "json"
    if args.tol <= 0:
        print("error: tolerances must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _HANDLERS[args.command](args)
    except (PotentialFormatError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResolabError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
