"""Command line front end.

Subcommands:

    list        built-in boxes, reference scenarios, solver examples
    show        print a box table, optionally under a constraint pattern
    verify      exhaustive no-signaling check of a box
    analyze     signaling report for a sender/receiver split
    deutsch     solve the loop fixed-point equation for a small system
    reproduce   rebuild the reference scenario tables and compare

Exit codes: 0 on success, 1 when a requested check fails (signaling
witness found, scenario mismatch, solver did not converge), 2 on usage
or input errors.  All output is deterministic; the NONLOCAL_CTC_SEED
environment variable is accepted for interface compatibility but has
no effect, since every computation here is exact or derived from fixed
starting points.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .boxes import (BoxName, BoxSpecError, NoSignalBox, box_from_spec,
                    box_to_spec, chsh_value, is_no_signaling, named_box,
                    parity_equation)
from .ctc import constrain, constrained_to_json, parse_pattern
from .deutsch import (EXAMPLE_NAMES, classical_consistency_crosscheck, cr_output,
                      example, fixed_point, is_basis_permutation, matrix_from_json,
                      matrix_to_json, MAX_ITERATIONS, RESIDUAL_TOL)
from .forms import input_names, output_names, party_names
from .signaling import report_json, scan_report_json
from .tables import (SCENARIO_KEYS, SCENARIOS, render_mapping, scenario,
                     scenario_header, scenario_relation, verify_scenario)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


class CliError(Exception):
    """Input or usage problem; reported on stderr with exit code 2."""


def _load_box(args) -> tuple[NoSignalBox, str]:
    path = getattr(args, "spec", None)
    if getattr(args, "box", None):
        name = args.box.lower()
        if name.startswith("spec:"):
            path = args.box[len("spec:"):]
        else:
            return named_box(name), name
    if not path:
        raise CliError("give a box with --box NAME, --box spec:FILE "
                       "or --spec FILE")
    try:
        if path == "-":
            data = json.load(sys.stdin)
        else:
            with open(path) as handle:
                data = json.load(handle)
    except OSError as err:
        raise CliError(f"cannot read {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise CliError(f"{path} is not valid JSON: {err}") from err
    label = "stdin" if path == "-" else path
    return box_from_spec(data, label=label), label


def _split_parties(text: str) -> list[str]:
    return [tok for tok in text.replace(",", " ").split() if tok]


def _pattern_from(args, n: int) -> tuple[int, ...]:
    raw = getattr(args, "ctc", None)
    if not raw:
        return ()
    return parse_pattern(n, _split_parties(raw))


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2))


def _format_float(x: float) -> str:
    return f"{x:.6f}"


def cmd_list(args) -> int:
    boxes = []
    for name in BoxName:
        box = named_box(name)
        boxes.append({
            "name": name.value,
            "parties": box.n,
            "relation": parity_equation(box.form),
            "constraint": [list(m) for m in box.form.sorted_monomials()],
        })
    payload = {
        "boxes": boxes,
        "scenarios": [
            {"key": s.key, "box": s.box.value,
             "ctc": [party_names(named_box(s.box).n)[i] for i in s.pattern]}
            for s in SCENARIOS.values()
        ],
        "deutsch_examples": list(EXAMPLE_NAMES),
    }
    if args.json:
        _print_json(payload)
        return EXIT_OK
    print("boxes:")
    for info in payload["boxes"]:
        print(f"  {info['name']:<12} {info['parties']} parties   {info['relation']}")
    print("scenarios:")
    for info in payload["scenarios"]:
        print(f"  {info['key']:<4} {info['box']} with self-consistent "
              f"parties: {', '.join(info['ctc'])}")
    print("deutsch examples:")
    print(f"  {', '.join(payload['deutsch_examples'])}")
    return EXIT_OK


def _describe_box(box: NoSignalBox, label: str) -> str:
    if box.form is not None:
        return f"box {label} ({box.n} parties): {parity_equation(box.form)}"
    return f"box {label} ({box.n} parties): explicit table"


def cmd_show(args) -> int:
    box, label = _load_box(args)
    pattern = _pattern_from(args, box.n)
    names = party_names(box.n)
    if not pattern:
        if args.json:
            _print_json(box_to_spec(box))
            return EXIT_OK
        print(_describe_box(box, label))
        ins = " ".join(input_names(box.n))
        outs = " ".join(output_names(box.n))
        print(f"{ins} | {outs} : p")
        for inputs in sorted(box.rows):
            for outputs in sorted(box.rows[inputs]):
                left = " ".join(map(str, inputs))
                right = " ".join(map(str, outputs))
                print(f"{left} | {right} : {box.rows[inputs][outputs]}")
        return EXIT_OK
    cbox = constrain(box, pattern)
    if args.json:
        _print_json({
            "box": label,
            "ctc": [names[i] for i in pattern],
            "rows": constrained_to_json(cbox),
        })
        return EXIT_OK
    print(_describe_box(box, label))
    print(f"self-consistent parties: {', '.join(names[i] for i in pattern)}")
    in_syms = input_names(box.n)
    outs = " ".join(output_names(box.n))
    for inputs in sorted(cbox.rows):
        row = cbox.rows[inputs]
        left = " ".join(f"{nm}={b}" for nm, b in zip(in_syms, inputs))
        if row.paradox:
            print(f"{left} : PARADOX (no self-consistent outcome)")
            continue
        parts = [f"({outs})=({' '.join(map(str, out))}) w.p. {p}"
                 for out, p in sorted(row.outcomes.items())]
        print(f"{left} : {'; '.join(parts)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    targets: list[tuple[NoSignalBox, str]]
    if getattr(args, "box", None) or getattr(args, "spec", None):
        targets = [_load_box(args)]
    else:
        targets = [(named_box(name), name.value) for name in BoxName]
    results = []
    all_ok = True
    for box, label in targets:
        verdict = is_no_signaling(box)
        info = {"box": label, "no_signaling": verdict.ok}
        if box.n == 2:
            info["chsh"] = str(chsh_value(box))
        if not verdict.ok:
            all_ok = False
            w = verdict.witness
            names = party_names(box.n)
            info["witness"] = {
                "coalition": [names[i] for i in w.coalition],
                "inputs_a": list(w.inputs_a),
                "inputs_b": list(w.inputs_b),
                "marginal_a": {"".join(map(str, k)): str(v)
                               for k, v in sorted(w.marginal_a.items())},
                "marginal_b": {"".join(map(str, k)): str(v)
                               for k, v in sorted(w.marginal_b.items())},
            }
        results.append(info)
    if args.json:
        _print_json({"results": results, "ok": all_ok})
    else:
        for info in results:
            if info["no_signaling"]:
                extra = f" (CHSH value {info['chsh']})" if "chsh" in info else ""
                print(f"{info['box']}: no-signaling OK{extra}")
            else:
                w = info["witness"]
                print(f"{info['box']}: SIGNALING for coalition "
                      f"({', '.join(w['coalition'])}): inputs {w['inputs_a']} "
                      f"vs {w['inputs_b']} give different marginals")
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def cmd_analyze(args) -> int:
    box, label = _load_box(args)
    pattern = _pattern_from(args, box.n)
    cbox = constrain(box, pattern)
    names = party_names(box.n)
    if bool(args.sender) != bool(args.receivers):
        raise CliError("--sender and --receivers go together; "
                       "give both or neither")
    if not args.sender:
        return _analyze_scan(args, cbox, label, names, pattern)
    sender_ids = parse_pattern(box.n, _split_parties(args.sender))
    if len(sender_ids) != 1:
        raise CliError("--sender takes exactly one party")
    sender = sender_ids[0]
    coalition = parse_pattern(box.n, _split_parties(args.receivers))
    try:
        payload = report_json(label, cbox, sender, coalition)
    except ValueError as err:
        raise CliError(str(err)) from err
    if args.json:
        _print_json(payload)
        return EXIT_OK
    print(_describe_box(box, label))
    constrained = ", ".join(names[i] for i in pattern) if pattern else "none"
    print(f"self-consistent parties: {constrained}")
    print(f"sender: {names[sender]}; receivers: "
          f"{', '.join(names[i] for i in coalition)}")
    setting_names = [input_names(box.n)[i] for i in coalition]
    for entry in payload["entries"]:
        setting = " ".join(f"{nm}={b}" for nm, b in
                           zip(setting_names, entry["setting"]))
        if entry["dependent"]:
            rule = ", ".join(f"{obs}->{guess}"
                             for obs, guess in entry["rule"].items())
            line = (f"setting {setting}: dependent; guess {rule}; "
                    f"success {entry['success']}; "
                    f"information {_format_float(entry['mi_bits'])} bits")
        else:
            line = f"setting {setting}: independent"
        if entry["impractical"]:
            line += " [receiver inside the constrained loop]"
        print(line)
        if entry["note"]:
            print(f"  note: {entry['note']}")
    s = payload["summary"]
    print(f"summary: {s['dependent_settings']}/{s['settings']} settings "
          f"dependent ({s['dependent_cases']}/{s['cases']} cases); "
          f"max success {s['max_success']}; mean information "
          f"{_format_float(s['mean_mi_bits'])} bits")
    return EXIT_OK


def _analyze_scan(args, cbox, label, names, pattern) -> int:
    try:
        payload = scan_report_json(label, cbox)
    except ValueError as err:
        raise CliError(str(err)) from err
    if args.json:
        _print_json(payload)
        return EXIT_OK
    print(_describe_box(cbox.box, label))
    constrained = ", ".join(names[i] for i in pattern) if pattern else "none"
    print(f"self-consistent parties: {constrained}")
    for report in payload["reports"]:
        s = report["summary"]
        line = (f"direction {report['sender']} -> "
                f"{','.join(report['coalition'])}: "
                f"{s['dependent_settings']}/{s['settings']} settings dependent "
                f"({s['dependent_cases']}/{s['cases']} cases)")
        if s["impractical"]:
            line += " [receiver inside the constrained loop]"
        print(line)
    s = payload["summary"]
    print(f"overall: {s['dependent_directions']}/{s['directions']} directions "
          f"signal; {s['dependent_settings']}/{s['settings']} settings "
          f"dependent ({s['dependent_cases']}/{s['cases']} cases)")
    return EXIT_OK


def _format_matrix(matrix: np.ndarray) -> list[str]:
    lines = []
    for row in np.asarray(matrix):
        cells = ", ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in row)
        lines.append(f"  [{cells}]")
    return lines


def cmd_deutsch(args) -> int:
    if args.example and args.file:
        raise CliError("give either --example or --file, not both")
    if args.example:
        u, rho, d_loop = example(args.example)
        label = args.example.lower()
    elif args.file:
        try:
            if args.file == "-":
                data = json.load(sys.stdin)
            else:
                with open(args.file) as handle:
                    data = json.load(handle)
        except OSError as err:
            raise CliError(f"cannot read {args.file}: {err}") from err
        except json.JSONDecodeError as err:
            raise CliError(f"{args.file} is not valid JSON: {err}") from err
        if not isinstance(data, dict):
            raise CliError("problem file must be a JSON object")
        try:
            u = matrix_from_json(data["unitary"], name="unitary")
            rho = matrix_from_json(data["rho_cr"], name="rho_cr")
            d_loop = data["d_loop"]
        except KeyError as err:
            raise CliError(f"problem file is missing field {err}") from err
        except ValueError as err:
            raise CliError(str(err)) from err
        if not isinstance(d_loop, int) or isinstance(d_loop, bool) or d_loop < 1:
            raise CliError("field 'd_loop' must be a positive integer")
        label = "stdin" if args.file == "-" else args.file
    else:
        raise CliError("give a problem with --example NAME or --file FILE")

    try:
        result = fixed_point(u, rho, d_loop, tol=args.tol,
                             max_iterations=args.max_iter)
    except ValueError as err:
        raise CliError(str(err)) from err
    rho_out = cr_output(u, rho, result.sigma)

    crosscheck = None
    if args.crosscheck:
        if is_basis_permutation(u) is None:
            raise CliError("crosscheck needs a basis-permutation unitary")
        crosscheck = classical_consistency_crosscheck(u, rho, d_loop, tol=args.tol)

    ok = result.converged and (crosscheck is None or crosscheck.ok)
    if args.json:
        payload = {
            "problem": label,
            "converged": result.converged,
            "iterations": result.iterations,
            "residual": result.residual,
            "from_average": result.from_average,
            "sigma": matrix_to_json(result.sigma),
            "cr_output": matrix_to_json(rho_out),
        }
        if crosscheck is not None:
            payload["crosscheck"] = {
                "permutation": crosscheck.permutation,
                "diagonal": crosscheck.diagonal,
                "invariance_residual": crosscheck.invariance_residual,
                "consistent_sets": {str(k): list(v) for k, v in
                                    sorted(crosscheck.consistent_sets.items())},
                "prediction": crosscheck.prediction,
                "prediction_match": crosscheck.prediction_match,
                "ok": crosscheck.ok,
            }
        payload["ok"] = ok
        _print_json(payload)
        return EXIT_OK if ok else EXIT_CHECK_FAILED

    print(f"problem {label}: CR dim {rho.shape[0]}, loop dim {d_loop}")
    status = "converged" if result.converged else "DID NOT CONVERGE"
    source = "averaged iterates" if result.from_average else "raw iterate"
    print(f"{status} after {result.iterations} iteration(s), "
          f"residual {result.residual:.3e} ({source})")
    print("loop state sigma*:")
    for line in _format_matrix(result.sigma):
        print(line)
    print("CR output state:")
    for line in _format_matrix(rho_out):
        print(line)
    if crosscheck is not None:
        print(f"crosscheck: permutation {crosscheck.permutation}; "
              f"diagonal {'ok' if crosscheck.diagonal else 'FAILED'}; "
              f"invariance residual {crosscheck.invariance_residual:.3e}")
        sets = "; ".join(f"{k}:{{{','.join(map(str, v))}}}"
                         for k, v in sorted(crosscheck.consistent_sets.items()))
        print(f"consistent loop values per CR value: {sets}")
        if crosscheck.prediction is None:
            print("conditioning prediction: none (some branch has no "
                  "self-consistent value)")
        else:
            pred = ", ".join(_format_float(x) for x in crosscheck.prediction)
            verdict = "matches" if crosscheck.prediction_match else "DIFFERS"
            print(f"conditioning prediction: [{pred}] {verdict}")
        print(f"crosscheck {'OK' if crosscheck.ok else 'FAILED'}")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_reproduce(args) -> int:
    choice = "all" if args.all else args.table
    if choice == "all":
        keys = list(SCENARIO_KEYS)
    else:
        keys = [scenario(choice).key]
    results = []
    all_ok = True
    for key in keys:
        s = SCENARIOS[key]
        check = verify_scenario(s)
        all_ok = all_ok and check.ok
        results.append((s, check))
    if args.json:
        names = party_names
        payload = {
            "scenarios": [
                {
                    "key": s.key,
                    "box": s.box.value,
                    "ctc": [names(named_box(s.box).n)[i] for i in s.pattern],
                    "relation": scenario_relation(s),
                    "rows": [{"in": list(i), "out": list(o)}
                             for i, o in sorted((check.computed or {}).items())],
                    "ok": check.ok,
                }
                for s, check in results
            ],
            "ok": all_ok,
        }
        _print_json(payload)
        return EXIT_OK if all_ok else EXIT_CHECK_FAILED
    for s, check in results:
        print(scenario_header(s))
        print(f"induced relation: {scenario_relation(s)}")
        if check.computed is None:
            print("check: FAIL (constrained box is not deterministic)")
            print()
            continue
        for line in render_mapping(s, check.computed):
            print(line)
        print(f"check: {'OK' if check.ok else 'FAIL'} "
              f"(computed table {'matches' if check.ok else 'differs from'} "
              f"the frozen reference)")
        print()
    print(f"overall: {'OK' if all_ok else 'FAIL'}")
    return EXIT_OK if all_ok else EXIT_CHECK_FAILED


def _add_box_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--box", metavar="NAME",
                        help="built-in box name "
                             f"({', '.join(b.value for b in BoxName)})")
    parser.add_argument("--spec", metavar="FILE",
                        help="JSON box spec file, or - for stdin")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctcbox",
        description="exact analysis of correlation boxes under "
                    "self-consistency constraints",
        epilog="NONLOCAL_CTC_SEED is accepted in the environment for "
               "interface compatibility and ignored: all computations are "
               "deterministic. Exit codes: 0 ok, 1 check failed, 2 bad input.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", help="list built-in boxes and scenarios")
    p_list.add_argument("--json", action="store_true")
    p_list.set_defaults(func=cmd_list)

    p_show = sub.add_parser("show", help="print a box table")
    _add_box_arguments(p_show)
    p_show.add_argument("--ctc", metavar="PARTIES",
                        help="comma-separated self-consistent parties "
                             "(names or indices)")
    p_show.add_argument("--json", action="store_true")
    p_show.set_defaults(func=cmd_show)

    p_verify = sub.add_parser("verify",
                              help="check the no-signaling conditions")
    p_verify.add_argument("check", nargs="?", default="no-signaling",
                          choices=["no-signaling"],
                          help="property to verify (default: no-signaling)")
    _add_box_arguments(p_verify)
    p_verify.add_argument("--json", action="store_true")
    p_verify.set_defaults(func=cmd_verify)

    p_analyze = sub.add_parser("analyze", help="signaling report")
    _add_box_arguments(p_analyze)
    p_analyze.add_argument("--ctc", metavar="PARTIES",
                           help="comma-separated self-consistent parties")
    p_analyze.add_argument("--sender", metavar="PARTY",
                           help="signaling party; omit both --sender and "
                                "--receivers to scan every split")
    p_analyze.add_argument("--receivers", metavar="PARTIES",
                           help="comma-separated receiving coalition")
    p_analyze.add_argument("--json", action="store_true")
    p_analyze.set_defaults(func=cmd_analyze)

    p_deutsch = sub.add_parser("deutsch",
                               help="solve the loop fixed-point equation")
    p_deutsch.add_argument("--example", metavar="NAME",
                           help=f"built-in instance ({', '.join(EXAMPLE_NAMES)})")
    p_deutsch.add_argument("--file", metavar="FILE",
                           help="JSON problem with unitary, rho_cr, d_loop")
    p_deutsch.add_argument("--tol", type=float, default=RESIDUAL_TOL)
    p_deutsch.add_argument("--max-iter", type=int, default=MAX_ITERATIONS,
                           metavar="N", help="iteration budget for the solver")
    p_deutsch.add_argument("--crosscheck", action="store_true",
                           help="compare against classical conditioning "
                                "(permutation unitaries only)")
    p_deutsch.add_argument("--json", action="store_true")
    p_deutsch.set_defaults(func=cmd_deutsch)

    p_rep = sub.add_parser("reproduce",
                           help="rebuild the reference scenario tables")
    p_rep.add_argument("--table", default="all", metavar="KEY",
                       help=f"one of {', '.join(SCENARIO_KEYS)} or all")
    p_rep.add_argument("--all", action="store_true",
                       help="rebuild every scenario (same as --table all)")
    p_rep.add_argument("--json", action="store_true")
    p_rep.set_defaults(func=cmd_reproduce)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, BoxSpecError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
