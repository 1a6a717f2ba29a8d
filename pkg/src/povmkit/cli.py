"""Command-line interface.

Exit codes: 0 success, 1 a verdict requested via --assert did not hold,
2 usage, I/O, or parse errors.  All numeric output is deterministic for
fixed inputs and seeds; floats in JSON use the shortest round-trip repr and
CSV uses 17 significant digits.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import abelian, dilation, extremality, io, phase
from .core import DiscretePovm, ToleranceConfig, validate_povm
from .errors import PovmkitError
from .fock import FockVector, coherent_state, number_state, squeezed_state

PROG = "povmkit"


def _tol_from_args(args) -> ToleranceConfig:
    return ToleranceConfig(
        psd_tol=args.psd_tol, norm_tol=args.norm_tol, rank_rel_tol=args.rank_rel_tol
    )


def _add_common(parser: argparse.ArgumentParser, assert_choices=None):
    parser.add_argument("--psd-tol", type=float, default=1e-9,
                        help="positivity/Hermiticity tolerance (default 1e-9)")
    parser.add_argument("--norm-tol", type=float, default=1e-9,
                        help="normalization/isometry tolerance (default 1e-9)")
    parser.add_argument("--rank-rel-tol", type=float, default=1e-10,
                        help="relative rank threshold (default 1e-10)")
    if assert_choices:
        parser.add_argument("--assert", dest="expected", choices=assert_choices,
                            help="exit 1 unless the computed verdict matches")


def _add_grid(parser: argparse.ArgumentParser, extent: float, step: float):
    parser.add_argument("--extent", type=float, default=extent,
                        help=f"grid half-width (default {extent})")
    parser.add_argument("--step", type=float, default=step,
                        help=f"grid step (default {step})")


def _add_state(parser: argparse.ArgumentParser, cutoff: int = 32):
    parser.add_argument("--state", required=True,
                        help="h<n> | coherent:<re>,<im> | squeezed:<r>,<theta>,<re>,<im>")
    parser.add_argument("--cutoff", type=int, default=cutoff,
                        help=f"Fock cutoff (default {cutoff})")


def parse_state(spec: str, cutoff: int) -> FockVector:
    """Built-in named states for --state."""
    try:
        if spec.startswith("h") and ":" not in spec:
            return number_state(int(spec[1:]), cutoff)
        kind, _, rest = spec.partition(":")
        parts = [float(p) for p in rest.split(",")] if rest else []
        if kind == "coherent" and len(parts) == 2:
            return coherent_state(complex(parts[0], parts[1]), cutoff)
        if kind == "squeezed" and len(parts) == 4:
            return squeezed_state(parts[0], parts[1], complex(parts[2], parts[3]), cutoff)
    except ValueError:
        pass
    except PovmkitError:
        raise
    raise UsageError(f"unrecognized state spec {spec!r}")


class UsageError(PovmkitError):
    pass


def _emit(obj: dict, args=None) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")


def _check_assert(verdict: str, expected: str | None) -> int:
    if expected is not None and verdict != expected:
        sys.stderr.write(f"assertion failed: verdict is {verdict!r}, expected {expected!r}\n")
        return 1
    return 0


def _grid(args) -> phase.PhaseGrid:
    return phase.PhaseGrid(args.extent, args.step)


def _write_csv(args, rows):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            io.write_csv_rows(fh, rows)
    else:
        io.write_csv_rows(sys.stdout, rows)


def cmd_validate(args) -> int:
    obj = io.load_json(args.povm)
    if not isinstance(obj, dict) or "effects" not in obj:
        raise io.FormatError('POVM file must hold a JSON object with an "effects" list')
    effects = [io.decode_matrix(e, f"effects[{i}]") for i, e in enumerate(obj["effects"])]
    report = validate_povm(effects, _tol_from_args(args))
    _emit(report.as_dict())
    return _check_assert("valid" if report.ok else "invalid", args.expected)


def cmd_dilate(args) -> int:
    cfg = _tol_from_args(args)
    povm = io.load_povm(args.povm, cfg)
    dil = dilation.minimal_dilation(povm, cfg)
    family = dilation.coherent_family(dil)
    payload = {
        "fiber_dims": list(dil.fiber_dims),
        "total_dim": dil.total_dim,
        "isometry": io.encode_matrix(dil.isometry),
        "coherent_vectors": [
            [io.encode_vector(v) for v in vecs] for vecs in family.vectors
        ],
    }
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(payload) + "\n")
        _emit({"fiber_dims": list(dil.fiber_dims), "total_dim": dil.total_dim,
               "written": args.output})
    else:
        _emit(payload)
    return 0


def cmd_extremal(args) -> int:
    cfg = _tol_from_args(args)
    povm = io.load_povm(args.povm, cfg)
    verdict = extremality.extremality_test(povm, cfg)
    _emit({
        "extremal": verdict.extremal,
        "kernel_dim": verdict.kernel_dim,
        "min_singular_value": verdict.min_singular_value,
        "quick_reject": extremality.quick_reject(povm, cfg) is not None,
    })
    return _check_assert("extremal" if verdict.extremal else "non-extremal", args.expected)


def cmd_decompose(args) -> int:
    cfg = _tol_from_args(args)
    povm = io.load_povm(args.povm, cfg)
    verdict = extremality.extremality_test(povm, cfg)
    if verdict.extremal:
        raise UsageError("POVM is extremal: nothing to decompose")
    deco = extremality.convex_decompose(povm, verdict, cfg)
    plus_path = f"{args.output}_plus.json"
    minus_path = f"{args.output}_minus.json"
    io.save_povm(deco.m_plus, plus_path)
    io.save_povm(deco.m_minus, minus_path)
    avg_resid = max(
        float(np.linalg.norm((p + m) / 2 - e, 2))
        for p, m, e in zip(deco.m_plus.effects, deco.m_minus.effects, povm.effects)
    )
    diff = max(
        float(np.linalg.norm(p - m, 2))
        for p, m in zip(deco.m_plus.effects, deco.m_minus.effects)
    )
    _emit({
        "epsilon": deco.epsilon,
        "average_residual": avg_resid,
        "components_differ_by": diff,
        "plus": plus_path,
        "minus": minus_path,
    })
    return 0


def cmd_ic(args) -> int:
    cfg = _tol_from_args(args)
    povm = io.load_povm(args.povm, cfg)
    ic = extremality.informational_completeness(povm, cfg)
    _emit({"informationally_complete": ic, "required_span": povm.dim**2})
    return _check_assert("ic" if ic else "not-ic", args.expected)


def cmd_sample(args) -> int:
    from .core import sample_outcomes

    cfg = _tol_from_args(args)
    povm = io.load_povm(args.povm, cfg)
    rho = io.load_state(args.rho, cfg)
    counts = sample_outcomes(rho, povm, args.shots, args.seed, cfg)
    _emit({"counts": [int(c) for c in counts], "shots": args.shots, "seed": args.seed})
    return 0


def _mesh_rows(psi, grid, values):
    x, y = grid.mesh()
    zs = (x + 1j * y).ravel()
    return list(zip(zs, values.ravel()))


def cmd_phase_q(args) -> int:
    psi = parse_state(args.state, args.cutoff)
    grid = _grid(args)
    x, y = grid.mesh()
    q = phase.q_function(psi, x + 1j * y)
    _write_csv(args, _mesh_rows(psi, grid, q.astype(np.complex128)))
    return 0


def cmd_phase_char(args) -> int:
    psi = parse_state(args.state, args.cutoff)
    grid = _grid(args)
    x, y = grid.mesh()
    vals = phase.char_function(psi, x + 1j * y)
    _write_csv(args, _mesh_rows(psi, grid, vals))
    return 0


def cmd_phase_scan(args) -> int:
    psi = parse_state(args.state, args.cutoff)
    verdict = phase.extremality_scan(psi, _grid(args), zero_tol=args.zero_tol)
    _emit(verdict.as_dict())
    word = "consistent-with-extremal" if verdict.consistent_with_extremal else "zeros-found"
    return _check_assert(word, args.expected)


def cmd_phase_fourier(args) -> int:
    psi = parse_state(args.state, args.cutoff)
    grid = _grid(args)
    wgrid = phase.PhaseGrid(args.wextent, args.wstep)
    wx, wy = wgrid.mesh()
    ws = (wx + 1j * wy).ravel()
    vals = phase.q_fourier(psi, ws, grid)
    _write_csv(args, list(zip(ws, vals)))
    return 0


def cmd_phase_verify_h1(args) -> int:
    points = [complex(p) for p in args.points.split(",") if p]
    report = phase.verify_h1_decomposition(_grid(args), points)
    _emit(report.as_dict())
    return 0


def cmd_phase_discretize(args) -> int:
    cfg = _tol_from_args(args)
    psi = parse_state(args.state, args.cutoff)
    povm, info = phase.discretize_covariant_povm(psi, _grid(args), args.cutoff, cfg)
    io.save_povm(povm, args.output)
    report = validate_povm(povm.effects, cfg)
    summary = info.as_dict()
    summary["n_effects"] = povm.n_outcomes
    summary["validation"] = report.as_dict()
    summary["written"] = args.output
    _emit(summary)
    return 0


def _parse_labels(text: str):
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad --labels value {text!r}: {exc}") from None


def _load_seed_matrix(path):
    obj = io.load_json(path)
    if isinstance(obj, dict) and "seed" in obj:
        return io.decode_matrix(obj["seed"], "seed")
    if isinstance(obj, list):
        return io.decode_matrix(obj, "seed")
    raise io.FormatError('seed file must hold {"seed": matrix} or a bare matrix')


def cmd_covariant_build(args) -> int:
    cfg = _tol_from_args(args)
    rep = abelian.CyclicRep(args.group_order, _parse_labels(args.labels))
    cov = abelian.build_covariant(rep, _load_seed_matrix(args.seed), cfg)
    residual = abelian.covariance_check(cov)
    if args.output:
        io.save_povm(cov.povm(cfg), args.output, extra={
            "group_order": rep.group_order,
            "char_labels": list(rep.char_labels),
            "seed": io.encode_matrix(cov.seed),
        })
    _emit({
        "dim": rep.dim,
        "group_order": rep.group_order,
        "covariance_residual": residual,
        "written": args.output,
    })
    return 0


def _load_covariant(path, cfg) -> tuple:
    obj = io.load_json(path)
    for key in ("group_order", "char_labels", "seed"):
        if not isinstance(obj, dict) or key not in obj:
            raise io.FormatError(f'covariant POVM file is missing "{key}"')
    rep = abelian.CyclicRep(obj["group_order"], tuple(obj["char_labels"]))
    cov = abelian.build_covariant(rep, io.decode_matrix(obj["seed"], "seed"), cfg)
    effects = None
    if "effects" in obj:
        effects = [io.decode_matrix(e, f"effects[{i}]") for i, e in enumerate(obj["effects"])]
    return cov, effects


def cmd_covariant_check(args) -> int:
    cfg = _tol_from_args(args)
    cov, file_effects = _load_covariant(args.povm, cfg)
    if file_effects is not None:
        # Check the stored effects, not the rebuilt ones.
        n = cov.rep.group_order
        if len(file_effects) != n:
            raise io.FormatError(f"expected {n} effects, found {len(file_effects)}")
        worst = 0.0
        for g in range(n):
            ph = cov.rep.phases(g)
            for h in range(n):
                moved = ph[:, None] * file_effects[h] * ph.conj()[None, :]
                worst = max(worst, float(np.linalg.norm(moved - file_effects[(g + h) % n], 2)))
        residual = worst
    else:
        residual = abelian.covariance_check(cov)
    covariant = residual < 1e-12
    _emit({"covariance_residual": residual, "covariant": covariant})
    return _check_assert("covariant" if covariant else "not-covariant", args.expected)


def cmd_covariant_extremal(args) -> int:
    cfg = _tol_from_args(args)
    cov, _ = _load_covariant(args.povm, cfg)
    verdict = abelian.covariant_extremality(cov, cfg)
    _emit({
        "extremal": verdict.extremal,
        "kernel_dim": verdict.kernel_dim,
        "min_singular_value": verdict.min_singular_value,
        "rank": verdict.family.rank,
    })
    return _check_assert("extremal" if verdict.extremal else "non-extremal", args.expected)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG,
        description="POVM toolkit: validation, dilation, extremality, phase-space scans, covariant constructions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a POVM file and print residuals")
    p.add_argument("povm")
    _add_common(p, ("valid", "invalid"))
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("dilate", help="minimal Naimark dilation and coherent vectors")
    p.add_argument("povm")
    p.add_argument("--output", help="write the full dilation JSON here")
    _add_common(p)
    p.set_defaults(func=cmd_dilate)

    p = sub.add_parser("extremal", help="extremality verdict for a POVM file")
    p.add_argument("povm")
    _add_common(p, ("extremal", "non-extremal"))
    p.set_defaults(func=cmd_extremal)

    p = sub.add_parser("decompose", help="split a non-extremal POVM into two POVMs")
    p.add_argument("povm")
    p.add_argument("--output", default="decomposition",
                   help="prefix for <prefix>_plus.json / <prefix>_minus.json")
    _add_common(p)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("ic", help="informational completeness of a POVM file")
    p.add_argument("povm")
    _add_common(p, ("ic", "not-ic"))
    p.set_defaults(func=cmd_ic)

    p = sub.add_parser("sample", help="sample outcome counts from Born statistics")
    p.add_argument("povm")
    p.add_argument("--rho", required=True, help="density-state JSON file")
    p.add_argument("--shots", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("phase-q", help="Husimi Q values on a grid (CSV)")
    _add_state(p)
    _add_grid(p, 6.0, 0.05)
    p.add_argument("--output")
    _add_common(p)
    p.set_defaults(func=cmd_phase_q)

    p = sub.add_parser("phase-char", help="characteristic function on a grid (CSV)")
    _add_state(p)
    _add_grid(p, 6.0, 0.05)
    p.add_argument("--output")
    _add_common(p)
    p.set_defaults(func=cmd_phase_char)

    p = sub.add_parser("phase-scan", help="zero-set scan of the characteristic function")
    _add_state(p)
    _add_grid(p, 6.0, 0.05)
    p.add_argument("--zero-tol", type=float, default=1e-6)
    _add_common(p, ("consistent-with-extremal", "zeros-found"))
    p.set_defaults(func=cmd_phase_scan)

    p = sub.add_parser("phase-fourier", help="numeric Fourier transform of the Q function (CSV)")
    _add_state(p)
    _add_grid(p, 8.0, 0.05)
    p.add_argument("--wextent", type=float, default=2.0)
    p.add_argument("--wstep", type=float, default=0.25)
    p.add_argument("--output")
    _add_common(p)
    p.set_defaults(func=cmd_phase_fourier)

    p = sub.add_parser("phase-verify-h1", help="verify the explicit two-way split at h_1")
    _add_grid(p, 10.0, 0.25)
    p.add_argument("--points", default="0,1,1j,1+1j,-2",
                   help="comma-separated complex test points")
    _add_common(p)
    p.set_defaults(func=cmd_phase_verify_h1)

    p = sub.add_parser("phase-discretize", help="grid discretization of the covariant observable")
    _add_state(p, cutoff=12)
    _add_grid(p, 6.0, 0.5)
    p.add_argument("--output", required=True, help="POVM JSON destination")
    _add_common(p)
    p.set_defaults(func=cmd_phase_discretize)

    p = sub.add_parser("covariant-build", help="build a cyclic-group covariant POVM from a seed")
    p.add_argument("--group-order", type=int, required=True)
    p.add_argument("--labels", required=True, help="comma-separated character labels")
    p.add_argument("--seed", required=True, help="seed matrix JSON file")
    p.add_argument("--output", help="write POVM JSON (with covariant metadata) here")
    _add_common(p)
    p.set_defaults(func=cmd_covariant_build)

    p = sub.add_parser("covariant-check", help="covariance residual of a built POVM file")
    p.add_argument("povm")
    _add_common(p, ("covariant", "not-covariant"))
    p.set_defaults(func=cmd_covariant_check)

    p = sub.add_parser("covariant-extremal", help="structured extremality test for a covariant POVM")
    p.add_argument("povm")
    _add_common(p, ("extremal", "non-extremal"))
    p.set_defaults(func=cmd_covariant_extremal)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        sys.stderr.write(f"{PROG}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}\n")
        return 2
    except (PovmkitError, OSError) as exc:
        sys.stderr.write(f"{PROG}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
