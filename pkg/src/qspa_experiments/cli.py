""" qspa command line: chc, truth-table, nmr-run, verify, leakage, tomo

exit codes: 0 success, 1 invalid input or unreadable file, 2 failed verification
"""
import numpy as np, pandas as pd
import argparse, json, sys
from .util import max_abs
from .util.qlin import CNOT, projector, fidelity
from .protocol import Bb84Label, PureQubitState, KnowledgeModel, MAX_ROUNDS, apply_chc, \
    condense, chc_unitary, truth_table_frame, verify_truth_tables, leakage_curve, \
    leakage_frame, reference_states
from .protocol.adversary import KNOWLEDGE_SETS
from .nmr import QSPA_MODES, FREEDOMS, cnot_pulse_sequence, qspa_pulse_sequence, \
    sequence_unitary, equivalent_up_to_phase, load_sequence, replay_log, run_nmr_pipeline
from .tomography import simulate_readout_set, add_readout_noise, reconstruct, records_frame, \
    figure_data
from .io import resolve_config, output_path, write_density_matrix, read_density_matrix


AMPLITUDE_ATOL = 1e-6
# flags whose values may start with "-" (labels like -z, amplitudes like -0.6,0.8)
_SIGNED_VALUE_FLAGS = ("--in1", "--in2", "--knows")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValueError(message)


class VerificationFailure(Exception):
    pass


def parse_qubit(text):
    """ a BB84 label (+z, -z, +x, -x) or comma-separated amplitudes "a,b" """
    if text in {str(x) for x in Bb84Label}:
        return PureQubitState.from_label(text)
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected a BB84 label or 'a,b' amplitudes, got {text!r}")
    try:
        a, b = (complex(p.replace(" ", "")) for p in parts)
    except ValueError:
        raise ValueError(f"malformed amplitudes {text!r}")
    return PureQubitState.from_amplitudes(a, b, atol=AMPLITUDE_ATOL)


def parse_knowledge(text):
    if text in KNOWLEDGE_SETS:
        return text
    try:
        return tuple(int(i) for i in text.split(","))
    except ValueError:
        raise ValueError(f"--knows expects one of {KNOWLEDGE_SETS} or indices like 0,2, got {text!r}")


def _merge_signed_values(argv):
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _SIGNED_VALUE_FLAGS and i + 1 < len(argv) and not argv[i + 1].startswith("--"):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def _write_json(path, obj):
    with open(path, "w") as fp:
        fp.write(json.dumps(obj, indent=2, default=lambda x: x.item()) + "\n")
    return path


def _write_table(cfg, stem, df):
    path = output_path(cfg, f"{stem}.{cfg.format}")
    if cfg.format == "csv":
        df.to_csv(path, index=False)
    else:
        _write_json(path, df.to_dict(orient="records"))
    return path


def _amplitudes(q):
    return {"a": [q.a.real, q.a.imag], "b": [q.b.real, q.b.imag]}


def cmd_chc(cfg, args):
    phi1, phi2 = parse_qubit(args.in1), parse_qubit(args.in2)
    joint = apply_chc(phi1, phi2)
    policy = args.outcome if args.outcome is not None else np.random.default_rng(cfg.seed)
    res = condense(joint, policy)

    rho = projector(joint)
    write_density_matrix(output_path(cfg, "chc_joint.json"), rho, "chc", cfg.config_hash())
    _write_table(cfg, "chc_joint_figure", figure_data(rho))
    label = str(res.condensed_label) if res.condensed_label is not None else None
    _write_json(output_path(cfg, "chc_condensation.json"), {
        "inputs": [_amplitudes(phi1), _amplitudes(phi2)],
        "outcome": res.outcome,
        "probability": res.probability,
        "condensed": _amplitudes(res.condensed),
        "condensed_label": label,
    })
    print(f"outcome {res.outcome} (p={res.probability:.6g}) condensed",
          label if label else f"({res.condensed.a:.6g}, {res.condensed.b:.6g})")
    return 0


def cmd_truth_table(cfg, args):
    for o in (0, 1):
        path = output_path(cfg, f"truth_table_outcome{o}.csv")
        truth_table_frame(o).to_csv(path)
        print(f"outcome {o}\n{truth_table_frame(o)}")

    report = verify_truth_tables()
    print(f"verified {report.cases} cases, {report.mismatches} mismatches, "
          f"max deviation {report.max_deviation:.3e}")
    if report.mismatches:
        raise VerificationFailure(f"truth table mismatches: {report.failures}")
    return 0


def cmd_nmr_run(cfg, args):
    sys_ = cfg.spin_system
    phi1, phi2 = parse_qubit(args.in1), parse_qubit(args.in2)
    qspa = load_sequence(args.sequence) if args.sequence else None
    run = run_nmr_pipeline(phi1, phi2, sys_, args.mode, qspa)

    h = cfg.config_hash()
    for name, rho in [("input", run.input_state), ("output", run.output_state)]:
        write_density_matrix(output_path(cfg, f"nmr_{name}.json"), rho, f"nmr-run {name}", h)
        _write_table(cfg, f"nmr_{name}_figure", figure_data(rho))
    with open(output_path(cfg, "nmr_replay.txt"), "w") as fp:
        fp.write(replay_log(sys_))

    expect = projector(apply_chc(phi1, phi2))
    print(pd.DataFrame({"populations": run.populations}, index=["00", "01", "10", "11"]))
    print(f"fidelity to circuit-level output {fidelity(run.output_state, expect):.12f}")
    return 0


def cmd_verify(cfg, args):
    sys_ = cfg.spin_system
    if args.target == "cnot":
        seq, V = cnot_pulse_sequence(sys_), CNOT
        freedoms = args.freedoms or "global-only"
    else:
        seq, V = qspa_pulse_sequence(sys_, args.mode), chc_unitary()
        freedoms = args.freedoms or "global-plus-z"

    res = equivalent_up_to_phase(sequence_unitary(seq, sys_), V, freedoms)
    _write_json(output_path(cfg, f"verify_{args.target}.json"), {
        "target": args.target, "mode": args.mode, "freedoms": freedoms,
        "verdict": res.verdict, "fitted_phases": res.fitted_phases,
        "max_deviation": res.max_deviation,
    })
    print(f"{args.target} ({args.mode}, {freedoms}): verdict {res.verdict}, "
          f"residual {res.max_deviation:.3e}, phases {res.fitted_phases}")

    diagnostic = args.target == "qspa" and args.mode == "paper-literal"
    if not (res.verdict or diagnostic):
        raise VerificationFailure(f"{seq.label} is not equivalent, residual {res.max_deviation:.3e}")
    return 0


def cmd_leakage(cfg, args):
    model = KnowledgeModel(parse_knowledge(args.knows), args.knows_outcomes)
    df = leakage_frame(leakage_curve(model, args.max_rounds, args.method))
    _write_table(cfg, "leakage_curve", df)
    print(df)
    return 0


def _tomo_source(name):
    states = reference_states()
    if name in states:
        return states[name]
    return read_density_matrix(name).density_matrix()


def cmd_tomo(cfg, args):
    truth = _tomo_source(args.source)
    records = simulate_readout_set(truth)
    if args.noise > 0:
        records = add_readout_noise(records, args.noise, np.random.default_rng(cfg.seed))
    elif args.noise < 0:
        raise ValueError(f"--noise must be >= 0, got {args.noise}")
    res = reconstruct(records)

    h = cfg.config_hash()
    records_frame(records).to_csv(output_path(cfg, "tomo_records.csv"), index=False)
    write_density_matrix(output_path(cfg, "tomo_reconstruction.json"), res.rho, "tomo", h)
    _write_table(cfg, "tomo_figure", figure_data(res.rho))
    summary = {
        "source": args.source,
        "noise": args.noise,
        "residual": res.residual,
        "condition_number": res.condition_number,
        "fidelity": res.fidelity(truth),
        "min_eigenvalue": res.min_eigenvalue,
        "max_error": max_abs(res.rho.data - truth.data),
    }
    _write_json(output_path(cfg, "tomo_summary.json"), summary)
    print(pd.Series(summary))
    return 0


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--config", default=None, help="flat key = value file")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--format", choices=["json", "csv"], default=None)

    parser = _Parser(prog="qspa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chc", parents=[common], help="circuit-level CHC and condensation")
    p.add_argument("--in1", default="+z")
    p.add_argument("--in2", default="+z")
    p.add_argument("--outcome", type=int, choices=[0, 1], default=None,
                   help="forced target outcome; sampled from --seed when omitted")
    p.set_defaults(handler=cmd_chc)

    p = sub.add_parser("truth-table", parents=[common], help="emit and verify both truth tables")
    p.set_defaults(handler=cmd_truth_table)

    p = sub.add_parser("nmr-run", parents=[common], help="pulse-level pipeline")
    p.add_argument("--in1", default="1,0")
    p.add_argument("--in2", default="0,1")
    p.add_argument("--mode", choices=QSPA_MODES, default="verified-default")
    p.add_argument("--sequence", default=None, help="pulse file replacing the QSPA sequence")
    p.set_defaults(handler=cmd_nmr_run)

    p = sub.add_parser("verify", parents=[common], help="gate vs pulse equivalence")
    p.add_argument("target", choices=["cnot", "qspa"])
    p.add_argument("--mode", choices=QSPA_MODES, default="verified-default")
    p.add_argument("--freedoms", choices=FREEDOMS, default=None)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("leakage", parents=[common], help="adversary guess probability per round")
    p.add_argument("--knows", default="all")
    p.add_argument("--knows-outcomes", action="store_true")
    p.add_argument("--max-rounds", type=int, default=3, help=f"at most {MAX_ROUNDS}")
    p.add_argument("--method", choices=["table", "algebra"], default="table")
    p.set_defaults(handler=cmd_leakage)

    p = sub.add_parser("tomo", parents=[common], help="readout simulation and linear inversion")
    p.add_argument("--source", default="basis-output",
                   help="basis-input, basis-output, general-input, general-output or a JSON file")
    p.add_argument("--noise", type=float, default=0.0)
    p.set_defaults(handler=cmd_tomo)
    return parser


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(_merge_signed_values(argv))
        cfg = resolve_config(
            {"seed": args.seed, "out": args.out, "format": args.format}, args.config)
        return args.handler(cfg, args)
    except (ValueError, OSError) as e:
        print(f"qspa: error: {e}", file=sys.stderr)
        return 1
    except (VerificationFailure, AssertionError) as e:
        print(f"qspa: verification failed: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
