"""Command-line entry point: ``decaylaw <command> [flags]``.

Precedence for every option is flag > ``--config`` key=value file > default.
Exit codes: 0 ok, 1 verification failure or other error, 2 usage or input
error, 3 alpha guard rejection, 4 cap overflow.
"""

from __future__ import annotations

import argparse
import contextlib
import hashlib
import io
import json
import sys
import tempfile
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .errors import DecayLawError, GuardRejected, InvalidInput
from .weights import Alpha

OUTPUT_KEYS = ("out", "csv", "summary", "stats")
INPUT_KEYS = ("pair", "graph", "pattern", "sentence")
NOT_RECORDED = ("config", "manifest", "func", "command", "jobs")


class ManifestRecorder:
    """Routes command output to files or stdout and remembers digests."""

    def __init__(self):
        self.outputs: dict[str, str] = {}

    def write(self, path: str | None, text: str) -> None:
        data = text.encode("utf-8")
        digest = hashlib.sha256(data).hexdigest()
        if path is None or path == "-":
            sys.stdout.write(text)
            sys.stdout.flush()
            self.outputs["<stdout>"] = digest
        else:
            Path(path).write_bytes(data)
            self.outputs[str(path)] = digest


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _alpha(ns) -> Alpha:
    return Alpha.parse(ns.alpha, guard_v_max=ns.guard_v_max, guard_e_max=ns.guard_e_max)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in str(text).replace(" ", "").split(",") if x)
    except ValueError as exc:
        raise InvalidInput(f"expected comma-separated integers, got {text!r}") from exc
    return vals


def _steps(text) -> int | None:
    if text is None or str(text) in ("fix", "fixpoint", "none"):
        return None
    return int(text)


def _load_pair(spec: str):
    from .patterns import load_pattern

    return load_pattern(spec)


# ---------------------------------------------------------------------------
# commands


def cmd_sample(ns, rec: ManifestRecorder) -> int:
    from .graphio import format_graph
    from .sampler import SampleConfig, sample, sample_stats

    cfg = SampleConfig(ns.model, ns.n, _alpha(ns), ns.seed, ns.p1_mode)
    M = sample(cfg)
    rec.write(ns.out, format_graph(M, model=ns.model, alpha=str(cfg.alpha)))
    if ns.stats:
        rec.write(ns.stats, _json(sample_stats(cfg, M)))
    return 0


def cmd_decide(ns, rec: ManifestRecorder) -> int:
    from .relations import decide

    _, pair = _load_pair(ns.pair)
    verdict = decide(pair, ns.relation, _alpha(ns))
    rec.write(ns.out, _json({"schema": 1, **verdict.to_json()}))
    return 0


def cmd_xi(ns, rec: ManifestRecorder) -> int:
    from .weights import weight, xi_set, xi_value, zeta_value

    alpha = _alpha(ns)
    _, pair = _load_pair(ns.pair)
    lams = xi_set(pair, alpha)
    xi = xi_value(pair, alpha)
    zeta = zeta_value(pair, alpha)

    def frac(x):
        return None if x is None else {"exact": f"{x.numerator}/{x.denominator}", "decimal": float(x)}

    body = {
        "schema": 1,
        "alpha": str(alpha),
        "xi_set": [{"blocks": lam.as_lists(), "w": frac(weight(pair, lam, alpha).w)} for lam in lams],
        "xi": frac(xi),
        "zeta": frac(zeta),
    }
    rec.write(ns.out, _json(body))
    return 0


def cmd_closure(ns, rec: ManifestRecorder) -> int:
    from .closures import cl_km_trace, rcl_k, scl_k
    from .graphio import read_graph

    M = read_graph(ns.graph).structure
    X = frozenset(_int_list(ns.set))
    body: dict = {"schema": 1, "operator": ns.operator, "set": sorted(X)}
    if ns.operator == "cl":
        alpha = _alpha(ns)
        m = None if ns.m is None else ns.m
        trace = cl_km_trace(X, M, ns.k, m, alpha)
        body.update({"k": ns.k, "m": m, "alpha": str(alpha), **trace.to_json(), "result": sorted(trace.result)})
    else:
        fn = scl_k if ns.operator == "scl" else rcl_k
        steps = ns.m
        body.update({"k": steps, "result": sorted(fn(X, M, steps))})
    rec.write(ns.out, _json(body))
    return 0


def cmd_experiment(ns, rec: ManifestRecorder) -> int:
    from .experiments.runner import ExperimentConfig, records_to_csv, run_experiment, summarize

    name, pattern = _load_pair(ns.pattern)
    cfg = ExperimentConfig(
        kind=ns.kind, pattern_name=name, pattern=pattern, model=ns.model, n_grid=_int_list(ns.n_grid),
        trials=ns.trials, placements=ns.placements, boundary=not ns.no_boundary, seed=ns.seed,
        alpha=_alpha(ns), mode=ns.mode or "", eps=ns.eps, k=ns.k, t=ns.t, min_gap=ns.min_gap,
        closure_steps=_steps(ns.closure_steps), node_cap=ns.node_cap, pass_fraction=ns.pass_fraction,
    )
    records = run_experiment(cfg, jobs=ns.jobs)
    rec.write(ns.csv, records_to_csv(records))
    if ns.summary:
        rec.write(ns.summary, _json(summarize(cfg, records)))
    return 0


def cmd_fo(ns, rec: ManifestRecorder) -> int:
    from .experiments.fo import estimate_probability, parse_sentence

    path = Path(ns.sentence)
    text = path.read_text(encoding="utf-8") if path.exists() else ns.sentence
    sentence = parse_sentence(text)
    rows = estimate_probability(sentence, ns.model, _int_list(ns.n_grid), ns.trials, seed=ns.seed,
                                alpha=_alpha(ns), p1_mode=ns.p1_mode)
    body = {"schema": 1, "sentence": sentence.text, "rank": sentence.rank, "model": ns.model,
            "alpha": ns.alpha, "seed": ns.seed, "rows": [r.to_json() for r in rows]}
    rec.write(ns.out, _json(body))
    return 0


def cmd_verify(ns, rec: ManifestRecorder) -> int:
    from .verify import PROPERTIES, report, run_verify, summary_line

    alpha = _alpha(ns)
    exclude = {x for x in (ns.exclude or "").split(",") if x}
    unknown = exclude - set(PROPERTIES)
    if unknown:
        raise InvalidInput(f"unknown properties: {', '.join(sorted(unknown))}")
    tally = run_verify(ns.instances, ns.seed, ns.max_new, alpha, jobs=ns.jobs)
    for name in exclude:
        tally.checks.pop(name, None)
    tally.violations = [v for v in tally.violations if v["property"] not in exclude]
    if ns.out:
        body = report(tally, ns.instances, ns.seed, ns.max_new, alpha)
        body["excluded"] = sorted(exclude)
        rec.write(ns.out, _json(body))
    line = summary_line(tally)
    rec.write(None, line + "\n")
    if tally.violations:
        by_prop: dict[str, int] = {}
        for v in tally.violations:
            by_prop[v["property"]] = by_prop.get(v["property"], 0) + 1
        detail = ", ".join(f"{k}={n}" for k, n in sorted(by_prop.items()))
        print(f"decaylaw: verification failed: {detail}", file=sys.stderr)
        return 1
    return 0


def cmd_replay(ns, rec: ManifestRecorder) -> int:
    """Re-run a manifest into a scratch directory and compare digests."""
    from .graphio import file_digest

    man = json.loads(Path(ns.manifest_file).read_text(encoding="utf-8"))
    if man.get("schema") != 1 or "config" not in man:
        raise InvalidInput("not a decaylaw manifest")
    for path, digest in man.get("inputs", {}).items():
        if not Path(path).exists() or file_digest(path) != digest:
            raise InvalidInput(f"input {path} is missing or changed since the manifest was written")
    config = dict(man["config"])
    command = man["command"]
    parser = build_parser()
    sub_defaults = _subparser(parser, command)
    ns2 = sub_defaults.parse_args([*_positional(command, config)])
    moved = {}
    with tempfile.TemporaryDirectory() as tmp:
        for key, value in config.items():
            setattr(ns2, key, value)
        for key in OUTPUT_KEYS:
            orig = getattr(ns2, key, None)
            if orig and orig != "-":
                new = str(Path(tmp) / f"{key}{Path(orig).suffix}")
                setattr(ns2, key, new)
                moved[new] = orig
        ns2.jobs = ns.jobs
        inner = ManifestRecorder()
        with contextlib.redirect_stdout(io.StringIO()):
            code = COMMANDS[command](ns2, inner)
        got = {moved.get(k, k): v for k, v in inner.outputs.items()}
    want = man.get("outputs", {})
    files = {k: {"expected": want.get(k), "actual": got.get(k), "match": want.get(k) == got.get(k)}
             for k in sorted(set(want) | set(got))}
    ok = all(f["match"] for f in files.values()) and code == man.get("exit_code", 0)
    rec.write(ns.out, _json({"schema": 1, "command": command, "identical": ok, "files": files}))
    return 0 if ok else 1


COMMANDS: dict[str, Callable] = {
    "sample": cmd_sample,
    "decide": cmd_decide,
    "xi": cmd_xi,
    "closure": cmd_closure,
    "experiment": cmd_experiment,
    "fo": cmd_fo,
    "verify": cmd_verify,
    "replay": cmd_replay,
}


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="key=value defaults (flags still win)")
    common.add_argument("--manifest", metavar="FILE", help="write a run manifest (config, inputs, output digests)")
    common.add_argument("--alpha", default="7/10", help="exponent p/q (default 7/10)")
    common.add_argument("--guard-v-max", type=int, default=6, help="genericity guard bound on v")
    common.add_argument("--guard-e-max", type=int, default=64, help="genericity guard bound on e")
    common.add_argument("--jobs", type=int, default=1, help="worker processes; output does not depend on it")

    parser = argparse.ArgumentParser(prog="decaylaw", description="Weight calculus, closures and random-graph experiments.")
    parser.add_argument("--version", action="version", version=f"decaylaw {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("sample", parents=[common], help="sample a random graph")
    p.add_argument("--model", choices=("m0", "m1", "m05"), default="m0")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p1-mode", choices=("clamped", "pure"), default="clamped")
    p.add_argument("--out", help="graph file (default stdout)")
    p.add_argument("--stats", help="write sampling statistics JSON")

    p = sub.add_parser("decide", parents=[common], help="decide a starred relation on a pair")
    p.add_argument("--pair", required=True, help="pair file or builtin pattern name")
    p.add_argument("--relation", required=True, choices=("c", "i", "s", "a", "pr", "star", "star_star"))
    p.add_argument("--out", help="verdict JSON (default stdout)")

    p = sub.add_parser("xi", parents=[common], help="print Xi(A,B), xi and zeta")
    p.add_argument("--pair", required=True, help="pair file or builtin pattern name")
    p.add_argument("--out", help="JSON output (default stdout)")

    p = sub.add_parser("closure", parents=[common], help="closure trace of a vertex set")
    p.add_argument("--graph", required=True)
    p.add_argument("--set", required=True, help="comma-separated vertices, may be empty")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--m", type=int, default=None, help="number of stages (default: fixpoint)")
    p.add_argument("--operator", choices=("cl", "scl", "rcl"), default="cl")
    p.add_argument("--out", help="trace JSON (default stdout)")

    p = sub.add_parser("experiment", parents=[common], help="run an extension experiment")
    p.add_argument("kind", choices=("extensions", "disjoint", "window", "far", "witness"))
    p.add_argument("--pattern", required=True, help="pair file or builtin pattern name")
    p.add_argument("--model", choices=("m0", "m1", "m05"), default="m0")
    p.add_argument("--n-grid", default="1000,2000,4000,8000,16000")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--placements", type=int, default=5, help="uniform base placements per trial")
    p.add_argument("--no-boundary", action="store_true", help="skip the boundary placements")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("induced", "positive"), default=None,
                   help="embedding mode (default: induced for extensions/witness, positive otherwise)")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--k", type=int, default=10, help="tuple size for far, closure size for witness")
    p.add_argument("--t", type=int, default=4, help="outer closure size for witness")
    p.add_argument("--min-gap", type=int, default=1)
    p.add_argument("--closure-steps", default="1", help="closure stages in the witness search, or 'fix'")
    p.add_argument("--node-cap", type=int, default=10**7)
    p.add_argument("--pass-fraction", type=float, default=0.95)
    p.add_argument("--csv", help="measurement rows (default stdout)")
    p.add_argument("--summary", help="write the fitted-slope summary JSON")

    p = sub.add_parser("fo", parents=[common], help="estimate the probability of a first-order sentence")
    p.add_argument("--sentence", required=True, help="file holding an s-expression sentence, or the sentence itself")
    p.add_argument("--model", choices=("m0", "m1", "m05"), default="m1")
    p.add_argument("--n-grid", default="100,200,400")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p1-mode", choices=("clamped", "pure"), default="clamped")
    p.add_argument("--out", help="probability table JSON (default stdout)")

    p = sub.add_parser("verify", parents=[common], help="run the algebraic property suite")
    p.add_argument("--instances", type=int, default=500)
    p.add_argument("--max-new", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exclude", default="", help="comma-separated property names to skip")
    p.add_argument("--out", help="full JSON report")

    p = sub.add_parser("replay", parents=[common], help="re-run a manifest and compare output digests")
    p.add_argument("manifest_file", metavar="MANIFEST")
    p.add_argument("--out", help="comparison JSON (default stdout)")
    return parser


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def _positional(command: str, config: dict) -> list[str]:
    """Required arguments needed to materialise a namespace for ``command``."""
    if command == "experiment":
        return [config["kind"], "--pattern", config["pattern"]]
    if command in ("decide",):
        return ["--pair", config["pair"], "--relation", config["relation"]]
    if command == "xi":
        return ["--pair", config["pair"]]
    if command == "closure":
        return ["--graph", config["graph"], "--set", config["set"]]
    if command == "fo":
        return ["--sentence", config["sentence"]]
    return []


def read_config_file(path: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInput(f"{path}:{lineno}: expected key=value")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(sub: argparse.ArgumentParser, cfg: dict[str, str]) -> None:
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in cfg.items():
        act = actions.get(key)
        if act is None or key in ("config", "manifest", "help") or not act.option_strings:
            raise InvalidInput(f"unknown config key {key!r}")
        if isinstance(act, argparse._StoreTrueAction):
            defaults[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            conv = act.type or str
            try:
                defaults[key] = conv(value)
            except (TypeError, ValueError) as exc:
                raise InvalidInput(f"bad value for config key {key!r}: {value!r}") from exc
            if act.choices and defaults[key] not in act.choices:
                raise InvalidInput(f"config key {key!r} must be one of {', '.join(act.choices)}")
        if act.required:
            act.required = False
    sub.set_defaults(**defaults)


def _parse(argv: Sequence[str]) -> argparse.Namespace:
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    command = next((a for a in argv if a in COMMANDS), None)
    if known.config and command:
        _apply_config(_subparser(parser, command), read_config_file(known.config))
    return parser.parse_args(argv)


def _write_manifest(ns, rec: ManifestRecorder, code: int) -> None:
    from .graphio import file_digest

    config = {k: v for k, v in vars(ns).items() if k not in NOT_RECORDED}
    inputs = {}
    for key in INPUT_KEYS:
        val = getattr(ns, key, None)
        if val and Path(val).is_file():
            inputs[val] = file_digest(val)
    body = {
        "schema": 1,
        "tool": "decaylaw",
        "version": __version__,
        "command": ns.command,
        "config": config,
        "seed": getattr(ns, "seed", None),
        "inputs": inputs,
        "outputs": dict(sorted(rec.outputs.items())),
        "exit_code": code,
    }
    Path(ns.manifest).write_text(_json(body), encoding="utf-8")


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        ns = _parse(argv)
    except SystemExit as exc:  # argparse usage errors already printed
        return int(exc.code or 0)
    except DecayLawError as exc:
        print(f"decaylaw: error: {exc}", file=sys.stderr)
        return exc.exit_code
    rec = ManifestRecorder()
    try:
        code = COMMANDS[ns.command](ns, rec)
    except GuardRejected as exc:
        print(f"decaylaw: alpha rejected: {exc}", file=sys.stderr)
        return exc.exit_code
    except DecayLawError as exc:
        print(f"decaylaw: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"decaylaw: error: {exc}", file=sys.stderr)
        return 2
    if ns.manifest:
        _write_manifest(ns, rec, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
