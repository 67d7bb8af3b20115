"""Command-line front end with deterministic, machine-readable reports.

Reports are JSON (or CSV for the tabular commands) with every numeric
result wrapped as {"value": ..., "provenance": "exact"|"heuristic"|
"asymptotic"}.  Floats are printed with 12 significant digits and a rerun
with the same arguments and seed is byte-identical; ``--threads`` only
caps solver workers and never changes output.

Exit codes: 0 report produced, 2 usage error, 3 input/parse error,
4 infeasible size.  Numerical verdicts are never conveyed via exit codes.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

import numpy as np

from .entanglement import (is_ppt, is_useful_for_teleportation, phi_fidelity,
                           ppt_threshold, teleport_fidelity)
from .games import InfeasibleSizeError, local_bound_exact, local_bound_heuristic
from .kvgame import build_kv_game, kv_score
from .linalg import DimensionLimitError
from .states import (DensityMatrix, PureSchmidtState, almeida_state,
                     isotropic_from_fraction, isotropic_from_visibility,
                     max_entangled_density, pure_from_schmidt, sigma_state)
from .superactivation import (almeida_threshold, certify_k_copy,
                              min_copies_bound, sigma_threshold, theta_star)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_INFEASIBLE = 4

ASCENT_TOL = 1e-10

#: Largest visibility with a known local model for the Almeida family.
ALMEIDA_LOCAL_VISIBILITY = 5.0 / 12.0


class CliInputError(Exception):
    """Bad state specification or configuration input (exit code 3)."""


class CliUsageError(Exception):
    """Semantically invalid flag combination (exit code 2)."""


# ---------------------------------------------------------------------------
# deterministic rendering

def _render(obj, indent: int = 0) -> str:
    pad = "  " * indent
    child = "  " * (indent + 1)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".12g")
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{child}{json.dumps(str(k))}: {_render(v, indent + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{child}{_render(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot render {type(obj)!r}")


def render_report(report: dict) -> str:
    return _render(report) + "\n"


def flagged(value, provenance: str) -> dict:
    if provenance not in ("exact", "heuristic", "asymptotic"):
        raise ValueError(f"unknown provenance '{provenance}'")
    return {"value": value, "provenance": provenance}


def input_digest(command: str, arguments: dict) -> str:
    payload = _render({"command": command, "arguments": arguments})
    return hashlib.sha256(payload.encode()).hexdigest()


def make_report(command: str, arguments: dict, results: dict, *, seed: int,
                tolerances: dict, notes=()) -> dict:
    report = {
        "command": command,
        "arguments": arguments,
        "input_digest": input_digest(command, arguments),
        "seed": seed,
        "tolerances": tolerances,
        "results": results,
    }
    if notes:
        report["notes"] = list(notes)
    return report


# ---------------------------------------------------------------------------
# state specification parsing

def _clamp_theta(theta: float) -> float:
    """Snap rounded inputs like 0.7854 back onto the [0, pi/4] domain."""
    quarter = np.pi / 4
    if quarter < theta <= quarter + 1e-4:
        return float(quarter)
    return theta


def _parse_floats(text: str, flag: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise CliInputError(f"{flag}: could not parse '{text}' as a comma-separated "
                            f"list of numbers") from exc


def _load_json(path: str, what: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except OSError as exc:
        raise CliInputError(f"{what}: cannot read '{path}': {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliInputError(f"{what}: '{path}' line {exc.lineno}: {exc.msg}") from exc


def parse_state(ns) -> tuple[DensityMatrix, dict]:
    """Build the density matrix named by the family flags.

    Returns the state and a canonical echo of the specification used for
    the input digest.  Raises :class:`CliInputError` with a field-level
    diagnostic on any inconsistency.
    """
    family = ns.family
    if family is None:
        raise CliInputError("--family is required to specify a state")
    theta = _clamp_theta(ns.theta) if ns.theta is not None else None
    try:
        if family == "isotropic":
            if ns.d is None:
                raise CliInputError("isotropic family: --d is required")
            if (ns.p is None) == (ns.fidelity is None):
                raise CliInputError("isotropic family: give exactly one of --p, --fidelity")
            if ns.p is not None:
                iso = isotropic_from_visibility(ns.d, ns.p)
                echo = {"family": "isotropic", "d": ns.d, "p": ns.p}
            else:
                iso = isotropic_from_fraction(ns.d, ns.fidelity)
                echo = {"family": "isotropic", "d": ns.d, "fidelity": ns.fidelity}
            return iso.density(), echo
        if family == "pure_schmidt":
            if ns.schmidt is None:
                raise CliInputError("pure_schmidt family: --lambda is required")
            coeffs = np.asarray(_parse_floats(ns.schmidt, "--lambda"))
            norm = float(np.linalg.norm(coeffs))
            if norm <= 0:
                raise CliInputError("--lambda: coefficients must not all vanish")
            lam = PureSchmidtState(coeffs / norm)  # input normalized before use
            echo = {"family": "pure_schmidt",
                    "lambda": [float(c) for c in lam.coefficients]}
            return pure_from_schmidt(lam), echo
        if family == "sigma":
            if ns.p is None:
                raise CliInputError("sigma family: --p is required")
            if ns.schmidt is not None:
                coeffs = np.asarray(_parse_floats(ns.schmidt, "--lambda"))
                norm = float(np.linalg.norm(coeffs))
                if norm <= 0:
                    raise CliInputError("--lambda: coefficients must not all vanish")
                lam = PureSchmidtState(coeffs / norm)
            elif theta is not None:
                lam = PureSchmidtState([np.cos(theta), np.sin(theta)])
            else:
                raise CliInputError("sigma family: give --theta or --lambda")
            echo = {"family": "sigma",
                    "lambda": [float(c) for c in lam.coefficients], "p": ns.p}
            return sigma_state(lam, ns.p), echo
        if family == "almeida":
            if theta is None or ns.p is None:
                raise CliInputError("almeida family: --theta and --p are required")
            echo = {"family": "almeida", "theta": theta, "p": ns.p}
            return almeida_state(theta, ns.p), echo
        if family == "dense":
            if ns.state_json is None:
                raise CliInputError("dense family: --state-json is required")
            doc = _load_json(ns.state_json, "state file")
            for key in ("dimA", "dimB", "re"):
                if key not in doc:
                    raise CliInputError(f"state file: missing field '{key}'")
            re_part = np.asarray(doc["re"], dtype=float)
            im_part = np.asarray(doc.get("im", np.zeros_like(re_part)), dtype=float)
            if re_part.shape != im_part.shape:
                raise CliInputError("state file: 're' and 'im' shapes differ")
            matrix = re_part + 1j * im_part
            rho = DensityMatrix(int(doc["dimA"]), int(doc["dimB"]), matrix)
            digest = hashlib.sha256(matrix.tobytes()).hexdigest()
            echo = {"family": "dense", "dimA": int(doc["dimA"]),
                    "dimB": int(doc["dimB"]), "matrix_sha256": digest}
            return rho, echo
    except DimensionLimitError:
        raise
    except ValueError as exc:
        raise CliInputError(f"{family} family: {exc}") from exc
    raise CliInputError(f"unknown family '{family}'")


def _parse_c_ratios(text: str) -> list[float]:
    values = _parse_floats(text, "--c-ratio")
    if not values or any(v <= 0 for v in values):
        raise CliInputError("--c-ratio: need positive values")
    return values


def _load_config(ns) -> dict:
    if ns.config is None:
        return {}
    doc = _load_json(ns.config, "config file")
    if not isinstance(doc, dict):
        raise CliInputError("config file: top level must be an object")
    return doc


# ---------------------------------------------------------------------------
# commands

def cmd_analyze(ns) -> dict:
    rho, state_echo = parse_state(ns)
    if rho.dim_a != rho.dim_b:
        raise CliInputError("analyze needs a square bipartition (dim_a == dim_b)")
    config = _load_config(ns)
    c_ratios = _parse_c_ratios(ns.c_ratio)
    if "c_ratio" in config and ns.c_ratio == "1.0":
        c_ratios = [float(config["c_ratio"])]

    verdict = is_useful_for_teleportation(rho, restarts=ns.restarts,
                                          tol=ASCENT_TOL, seed=ns.seed)
    d = rho.dim_a
    fraction = min(max(verdict.fraction, 1.0 / d**2), 1.0)
    ppt = is_ppt(rho)
    copies_table = []
    for ratio in c_ratios:
        copies = min_copies_bound(fraction, d, ratio) if verdict.useful else None
        copies_table.append({"c_ratio": flagged(ratio, "exact"),
                             "min_copies": flagged(copies, "asymptotic")})

    results = {
        "local_dim": flagged(d, "exact"),
        "phi_fidelity": flagged(phi_fidelity(rho), "exact"),
        "entanglement_fraction": flagged(verdict.fraction, "heuristic"),
        "teleport_useful": verdict.useful,
        "teleport_fidelity": flagged(teleport_fidelity(fraction, d), "heuristic"),
        "classical_fidelity": flagged(2.0 / (d + 1.0), "exact"),
        "ppt": ppt.is_ppt,
        "ppt_min_eigenvalue": flagged(ppt.min_eigenvalue, "exact"),
        "min_copies_bounds": copies_table,
    }
    notes = ["entanglement fraction from multi-start ascent; "
             "min-copies bound valid modulo unknown universal constants"]
    if state_echo.get("family") == "almeida":
        if ns.p <= ALMEIDA_LOCAL_VISIBILITY:
            notes.append("visibility within the known local-model window (p <= 5/12)")
        else:
            notes.append("visibility outside the known local-model window (p > 5/12)")
    arguments = {"state": state_echo, "c_ratio": c_ratios, "restarts": ns.restarts}
    return make_report("analyze", arguments, results, seed=ns.seed,
                       tolerances={"ascent_tol": ASCENT_TOL, "useful_tol": 1e-12},
                       notes=notes)


def cmd_kv(ns) -> dict:
    game = build_kv_game(ns.ell, ns.eta)
    if ns.family is not None:
        rho, state_echo = parse_state(ns)
        if rho.dim_a != game.n or rho.dim_b != game.n:
            raise CliInputError(f"state has dims ({rho.dim_a},{rho.dim_b}) but the "
                                f"game needs ({game.n},{game.n})")
    else:
        rho = max_entangled_density(game.n)
        state_echo = {"family": "max_entangled", "d": game.n}

    if ns.ell == 2:
        bound = local_bound_exact(game.functional, threads=ns.threads)
    elif ns.exact:
        raise InfeasibleSizeError(
            f"use heuristic: exact enumeration needs {game.n}^{game.num_questions} "
            f"strategies at ell={ns.ell}; rerun without --exact")
    else:
        bound = local_bound_heuristic(game.functional, restarts=ns.restarts,
                                      seed=ns.seed)
    score = kv_score(game, rho, bound)
    bound_flag = "exact" if bound.exact else "heuristic"
    results = {
        "n_outcomes": flagged(game.n, "exact"),
        "n_questions": flagged(game.num_questions, "exact"),
        "local_bound": flagged(bound.value, bound_flag),
        "bell_value": flagged(score.bell_value, "exact"),
        "nonlocality_fraction": flagged(score.nonlocality_fraction, bound_flag),
        "certified": score.certified,
        "nonlocal": score.certified and score.nonlocality_fraction > 1.0,
    }
    notes = []
    if not bound.exact:
        notes.append("heuristic local bound only lower-bounds the true bound; "
                     "the fraction may overstate nonlocality and is not certified")
    arguments = {"ell": ns.ell, "eta": ns.eta, "state": state_echo,
                 "exact": bool(ns.exact), "restarts": ns.restarts}
    return make_report("kv", arguments, results, seed=ns.seed,
                       tolerances={"behavior_tol": 1e-10}, notes=notes)


def cmd_certify(ns) -> dict:
    rho, state_echo = parse_state(ns)
    result = certify_k_copy(rho, ns.k, ns.eta, restarts=ns.restarts,
                            seed=ns.seed, threads=ns.threads)
    bound_flag = "exact" if result.exact_bound else "heuristic"
    results = {
        "copies": flagged(ns.k, "exact"),
        "local_bound": flagged(result.local_bound, bound_flag),
        "bell_value": flagged(result.bell_value, "exact"),
        "nonlocality_fraction": flagged(result.nonlocality_fraction, bound_flag),
        "certified": result.certified,
        "verdict": ("k-copy nonlocal (certified)" if result.certified
                    else "not certified"),
    }
    arguments = {"state": state_echo, "k": ns.k, "eta": ns.eta,
                 "restarts": ns.restarts}
    return make_report("certify", arguments, results, seed=ns.seed,
                       tolerances={"behavior_tol": 1e-10})


def _threshold_row(family: str, theta: float, tol: float) -> dict:
    if family == "sigma":
        lam = PureSchmidtState([np.cos(theta), np.sin(theta)])
        activation = sigma_threshold(lam)
        ppt = ppt_threshold("sigma", theta=theta, tol=tol)
    else:
        activation = almeida_threshold(theta)
        ppt = ppt_threshold("almeida", theta=theta, tol=tol)
    return {
        "theta": flagged(theta, "exact"),
        "activation_threshold": flagged(activation, "exact"),
        "ppt_threshold": flagged(ppt, "exact"),
        "gap_empty": activation is not None and activation <= ppt + max(tol, 1e-9),
    }


def cmd_thresholds(ns) -> dict:
    if ns.family not in ("sigma", "almeida"):
        raise CliUsageError("thresholds supports --family sigma|almeida")
    if ns.theta is None and ns.ploc is None and ns.grid is None:
        raise CliUsageError("thresholds needs --theta, --ploc or --grid")

    results: dict = {}
    notes = []
    if ns.theta is not None:
        row = _threshold_row(ns.family, _clamp_theta(ns.theta), ns.tol)
        results.update(row)
        if row["gap_empty"]:
            notes.append("activation threshold meets the separability threshold: "
                         "every entangled member is activation-useful")
    if ns.ploc is not None:
        if ns.family != "almeida":
            raise CliUsageError("--ploc applies to the almeida family")
        results["p_loc"] = flagged(ns.ploc, "exact")
        results["theta_star"] = flagged(theta_star(ns.ploc), "exact")
        notes.append("angles above theta_star admit a local model at p_loc yet "
                     "activate under copies")
    grid_rows = []
    if ns.grid is not None:
        if ns.grid < 1:
            raise CliUsageError("--grid must be positive")
        for i in range(ns.grid):
            theta = (i + 1) * (np.pi / 4) / ns.grid
            grid_rows.append(_threshold_row(ns.family, float(theta), ns.tol))
        results["grid"] = grid_rows

    arguments = {"family": ns.family, "theta": ns.theta, "ploc": ns.ploc,
                 "grid": ns.grid}
    return make_report("thresholds", arguments, results, seed=ns.seed,
                       tolerances={"bisection_tol": ns.tol}, notes=notes)


def cmd_figure1(ns) -> dict:
    if not 2 <= ns.dmax <= 6:
        raise CliUsageError("--dmax must lie in [2, 6]")
    config = _load_config(ns)
    p_locals = config.get("p_L", {})
    rows = []
    for d in range(2, ns.dmax + 1):
        p_s = ppt_threshold("isotropic", d=d, tol=ns.tol)
        p_l = p_locals.get(str(d))
        rows.append({
            "d": flagged(d, "exact"),
            "p_s": flagged(p_s, "exact"),
            "p_L": flagged(float(p_l), "exact") if p_l is not None else flagged(None, "exact"),
            "regime": "entangled => k-copy nonlocal for p > p_s",
        })
    notes = ["p_s from PPT bisection; p_L only echoed from configuration, "
             "never guessed"]
    arguments = {"dmax": ns.dmax, "p_L_config": {k: float(v) for k, v in
                                                 sorted(p_locals.items())}}
    return make_report("figure1", arguments, {"rows": rows}, seed=ns.seed,
                       tolerances={"bisection_tol": ns.tol}, notes=notes)


# ---------------------------------------------------------------------------
# CSV rendering for the tabular commands

def _csv_value(cell) -> str:
    if isinstance(cell, dict) and "value" in cell:
        cell = cell["value"]
    if cell is None:
        return ""
    if isinstance(cell, bool):
        return "true" if cell else "false"
    if isinstance(cell, (float, np.floating)):
        return format(float(cell), ".12g")
    return str(cell)


def _csv_provenance(cell) -> str:
    if isinstance(cell, dict) and "provenance" in cell:
        return cell["provenance"]
    return ""


def render_csv(report: dict) -> str:
    command = report["command"]
    if command == "figure1":
        rows = report["results"]["rows"]
        columns = ["d", "p_s", "p_L", "regime"]
    elif command == "thresholds" and "grid" in report["results"]:
        rows = report["results"]["grid"]
        columns = ["theta", "activation_threshold", "ppt_threshold", "gap_empty"]
    elif command == "thresholds":
        rows = [report["results"]]
        columns = [k for k in report["results"] if k != "grid"]
    else:
        raise CliUsageError(f"--csv is not supported for '{command}'")
    lines = [f"# command: {command}",
             f"# input_digest: {report['input_digest']}",
             f"# seed: {report['seed']}"]
    header = []
    for col in columns:
        header.append(col)
        if any(_csv_provenance(row.get(col)) for row in rows):
            header.append(f"{col}_provenance")
    lines.append(",".join(header))
    for row in rows:
        cells = []
        for col in columns:
            cells.append(_csv_value(row.get(col)))
            if f"{col}_provenance" in header:
                cells.append(_csv_provenance(row.get(col)))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument plumbing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--tol", type=float, default=1e-9,
                        help="bisection tolerance (default 1e-9)")
    common.add_argument("--restarts", type=int, default=32,
                        help="ascent/heuristic restarts (default 32)")
    common.add_argument("--c-ratio", dest="c_ratio", default="1.0",
                        help="constant ratio(s), comma separated (default 1.0)")
    common.add_argument("--eta", type=float, default=0.25,
                        help="game noise rate (default 0.25)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker cap; never changes results")
    common.add_argument("--csv", action="store_true",
                        help="CSV output for tabular commands")
    common.add_argument("--config", default=None,
                        help="optional JSON config (p_L constants, c_ratio)")

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--family",
                       choices=["isotropic", "pure_schmidt", "sigma", "almeida", "dense"])
    state.add_argument("--d", type=int, help="local dimension")
    state.add_argument("--p", type=float, help="visibility in [0, 1]")
    state.add_argument("--fidelity", type=float, help="entanglement fraction")
    state.add_argument("--theta", type=float, help="Schmidt angle in [0, pi/4]")
    state.add_argument("--lambda", dest="schmidt",
                       help="comma-separated Schmidt coefficients (normalized)")
    state.add_argument("--state-json", dest="state_json",
                       help="dense state file with dimA, dimB, re, im")

    parser = argparse.ArgumentParser(
        prog="telebell",
        description="Teleportation-usefulness and k-copy nonlocality toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[common, state],
                   help="entanglement fraction, teleportation and copy bounds")
    kv = sub.add_parser("kv", parents=[common, state],
                        help="coset-game value and nonlocality fraction")
    kv.add_argument("--ell", type=int, choices=[2, 3], required=True)
    kv.add_argument("--exact", action="store_true",
                    help="require the exact local bound")
    certify = sub.add_parser("certify", parents=[common, state],
                             help="nonlocality fraction of k copies")
    certify.add_argument("--k", type=int, required=True)
    thresholds = sub.add_parser("thresholds", parents=[common, state],
                                help="activation and separability thresholds")
    thresholds.add_argument("--ploc", type=float,
                            help="local-model visibility for theta_star")
    thresholds.add_argument("--grid", type=int,
                            help="number of grid angles in (0, pi/4]")
    figure1 = sub.add_parser("figure1", parents=[common],
                             help="separability thresholds per dimension")
    figure1.add_argument("--dmax", type=int, default=5)

    return parser


_COMMANDS = {
    "analyze": cmd_analyze,
    "kv": cmd_kv,
    "certify": cmd_certify,
    "thresholds": cmd_thresholds,
    "figure1": cmd_figure1,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        report = _COMMANDS[ns.command](ns)
        text = render_csv(report) if ns.csv else render_report(report)
    except CliUsageError as exc:
        print(f"telebell: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CliInputError as exc:
        print(f"telebell: input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InfeasibleSizeError, DimensionLimitError) as exc:
        print(f"telebell: infeasible size: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"telebell: input error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    sys.stdout.write(text)
    return EXIT_OK


def run() -> None:
    sys.exit(main())
