"""Command-line experiment runner.

Each subcommand reads its own section of an INI-style config (plus a shared
``[estimator]`` section), validates everything, then computes and writes CSV
or JSON artifacts to ``--out``.

Example config::

    [moments]
    model = 8:2
    eps = 1,1,1,1 ; 1,2,1,2

    [estimator]
    n_samples = 100000
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import itertools
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np

from . import qfock, qmoments, sykmc
from .majorana import MajoranaRep, MultiIndex, psi_R
from .partitions import PairPartition, crossings, enumerate_pair_partitions, SetPartition
from .qmoments import FiniteModel, FluctuationSpec
from .selftest import run_selftest

KINDS = ("moments", "fluct", "process", "fock", "cauchy", "converge")
CSV_HEADER = ["label", "oracle_num", "oracle_den", "oracle_float", "mc", "stderr", "z", "asymptotic"]


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# comparison rows and reporting


@dataclass
class ComparisonRow:
    label: str
    oracle: Fraction | None = None
    mc: float | None = None
    stderr: float | None = None
    asymptotic: float | None = None

    @property
    def z(self) -> float | None:
        if self.mc is None or self.oracle is None or not self.stderr:
            return None
        return (self.mc - float(self.oracle)) / self.stderr

    @property
    def flagged(self) -> bool:
        return self.z is not None and abs(self.z) > 3


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def rows_to_csv(rows: Sequence[ComparisonRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        o = r.oracle
        w.writerow([
            r.label,
            "" if o is None else o.numerator,
            "" if o is None else o.denominator,
            _fmt(o), _fmt(r.mc), _fmt(r.stderr), _fmt(r.z), _fmt(r.asymptotic),
        ])
    return buf.getvalue()


def rows_from_csv(text: str) -> list[ComparisonRow]:
    opt = lambda s: float(s) if s != "" else None
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        oracle = None
        if rec["oracle_num"] != "":
            oracle = Fraction(int(rec["oracle_num"]), int(rec["oracle_den"]))
        out.append(ComparisonRow(rec["label"], oracle, opt(rec["mc"]), opt(rec["stderr"]),
                                 opt(rec["asymptotic"])))
    return out


def report(rows: Sequence[ComparisonRow], stream: TextIO | None = None) -> str:
    """Print an aligned table (``!`` marks |z| > 3) and return the CSV text."""
    if not rows:
        raise ValueError("nothing to report")
    stream = stream or sys.stdout
    head = ["label", "oracle", "oracle_float", "mc", "stderr", "z", "asymptotic", ""]
    body = []
    for r in rows:
        body.append([
            r.label,
            "" if r.oracle is None else str(r.oracle),
            "" if r.oracle is None else f"{float(r.oracle):.6f}",
            "" if r.mc is None else f"{r.mc:.6f}",
            "" if r.stderr is None else f"{r.stderr:.2e}",
            "" if r.z is None else f"{r.z:+.2f}",
            "" if r.asymptotic is None else f"{r.asymptotic:.6f}",
            "!" if r.flagged else "",
        ])
    widths = [max(len(row[i]) for row in [head] + body) for i in range(len(head))]
    for row in [head] + body:
        stream.write("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n")
    return rows_to_csv(rows)


# ---------------------------------------------------------------------------
# config parsing


@dataclass
class ExperimentConfig:
    kind: str
    models: list[FiniteModel] = field(default_factory=lambda: [FiniteModel(8, 2)])
    words: list[tuple[int, ...]] = field(default_factory=lambda: [(1, 1, 1, 1)])
    sizes: tuple[int, ...] = (2, 2)
    times: list[tuple[Fraction, ...]] = field(default_factory=lambda: [(Fraction(1, 2), Fraction(1), Fraction(1, 2), Fraction(1))])
    q: Fraction | None = None
    law: str = "gaussian"
    p: int = 2
    max_k: int = 6
    depth: int = 500
    re_grid: tuple[float, float, int] = (-3.0, 3.0, 61)
    im_values: tuple[float, ...] = (0.1, 0.5, 1.0)
    pairing: str = "{1,3}{2,4}"
    budget: int = qmoments.DEFAULT_BUDGET
    estimator: sykmc.EstimatorConfig = field(default_factory=sykmc.EstimatorConfig)
    mc: bool = True


def _line_of(text: str, section: str, key: str) -> int | None:
    current = None
    for no, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip()
        elif current == section and s.split("=")[0].strip().lower() == key:
            return no
    return None


def _ints(s: str) -> tuple[int, ...]:
    return tuple(int(x) for x in s.replace(" ", "").split(",") if x)


def _model(s: str) -> FiniteModel:
    n, q = s.split(":")
    return FiniteModel(int(n), int(q))


_FIELDS = {
    "model": lambda s: [_model(s)],
    "models": lambda s: [_model(t) for t in s.split(",") if t.strip()],
    "eps": lambda s: [_ints(w) for w in s.split(";") if w.strip()],
    "sizes": _ints,
    "times": lambda s: [tuple(Fraction(x.strip()) for x in w.split(",") if x.strip())
                        for w in s.split(";") if w.strip()],
    "q": Fraction,
    "law": str,
    "p": int,
    "max_k": int,
    "depth": int,
    "re": lambda s: (float(s.split(":")[0]), float(s.split(":")[1]), int(s.split(":")[2])),
    "im": lambda s: tuple(float(x) for x in s.split(",") if x.strip()),
    "pairing": str,
    "budget": int,
    "mc": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
}
_DEST = {"model": "models", "models": "models", "eps": "words", "re": "re_grid", "im": "im_values"}
_EST_FIELDS = {"mode": str, "n_samples": int, "batches": int, "probes": int, "chunk_size": int}


def load_config(kind: str, path: str | None, seed: int | None = None,
                threads: int | None = None) -> ExperimentConfig:
    """Parse and validate; raises :class:`ConfigError` with section/field/line info."""
    cfg = ExperimentConfig(kind)
    text = ""
    if path:
        text = Path(path).read_text()
        parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
        try:
            parser.read_string(text, source=path)
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from exc

        def where(section, key):
            line = _line_of(text, section, key)
            return f"{path}:{line} [{section}] {key}" if line else f"{path} [{section}] {key}"

        if parser.has_section(kind):
            for key, raw in parser.items(kind):
                if key not in _FIELDS:
                    raise ConfigError(f"{where(kind, key)}: unknown field")
                try:
                    setattr(cfg, _DEST.get(key, key), _FIELDS[key](raw))
                except (ValueError, ZeroDivisionError, IndexError) as exc:
                    raise ConfigError(f"{where(kind, key)}: {exc}") from exc
        est = {}
        if parser.has_section("estimator"):
            for key, raw in parser.items("estimator"):
                if key not in _EST_FIELDS:
                    raise ConfigError(f"{where('estimator', key)}: unknown field")
                try:
                    est[key] = _EST_FIELDS[key](raw)
                except ValueError as exc:
                    raise ConfigError(f"{where('estimator', key)}: {exc}") from exc
        try:
            cfg.estimator = sykmc.EstimatorConfig(**est)
        except ValueError as exc:
            raise ConfigError(f"{path} [estimator]: {exc}") from exc
    if seed is not None:
        cfg.estimator.seed = seed
    if threads is not None:
        cfg.estimator.workers = threads
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig):
    if cfg.kind not in KINDS:
        raise ConfigError(f"unknown experiment kind {cfg.kind!r}")
    if cfg.law not in sykmc.LAWS:
        raise ConfigError(f"[{cfg.kind}] law: unknown coupling law {cfg.law!r}")
    if cfg.kind == "fluct":
        try:
            for w in cfg.words:
                FluctuationSpec(cfg.sizes, w)
        except ValueError as exc:
            raise ConfigError(f"[fluct] sizes/eps: {exc}") from exc
        if cfg.law != "gaussian":
            raise ConfigError("[fluct] law: fluctuations need Gaussian couplings")
    if cfg.kind in ("moments", "fluct") and any(len(w) == 0 or min(w) < 1 for w in cfg.words):
        raise ConfigError(f"[{cfg.kind}] eps: colors must be positive integers")
    if cfg.kind == "process" and any(t < 0 for w in cfg.times for t in w):
        raise ConfigError("[process] times: must be nonnegative")
    if cfg.kind in ("fock",) and (cfg.q is None or abs(cfg.q) >= 1):
        raise ConfigError("[fock] q: required, with |q| < 1")
    if cfg.kind == "cauchy":
        if cfg.q is None or abs(cfg.q) > 1:
            raise ConfigError("[cauchy] q: required, with |q| <= 1")
        if any(v <= 0 for v in cfg.im_values):
            raise ConfigError("[cauchy] im: imaginary parts must be > 0")
    if cfg.kind == "converge":
        try:
            pi = PairPartition.parse(cfg.pairing)
        except ValueError as exc:
            raise ConfigError(f"[converge] pairing: {exc}") from exc
        if not pi.blocks:
            raise ConfigError("[converge] pairing: empty")


# ---------------------------------------------------------------------------
# experiments


def _asymptotic_q(cfg: ExperimentConfig, model: FiniteModel) -> float:
    return float(cfg.q) if cfg.q is not None else qmoments.q_from_model(model.n, model.q).q


def run_moments(cfg: ExperimentConfig):
    law = sykmc.LAWS[cfg.law]
    rows, records = [], []
    for model in cfg.models:
        for w in cfg.words:
            oracle = qmoments.exact_finite_n_moment(w, model, law.moment, cfg.budget)
            est = sykmc.mc_moment(w, model, law, cfg.estimator) if cfg.mc else None
            asym = qmoments.q_wick_moment(w, _asymptotic_q(cfg, model))
            label = f"eps={''.join(map(str, w))} n={model.n} q_n={model.q}"
            rows.append(ComparisonRow(label, Fraction(oracle), est and est.value, est and est.stderr, float(asym)))
            records.append(_record(label, oracle, est, asym, model, cfg))
    return rows, records


def run_fluct(cfg: ExperimentConfig):
    rows, records = [], []
    for model in cfg.models:
        for w in cfg.words:
            spec = FluctuationSpec(cfg.sizes, w)
            est = sykmc.mc_fluctuation(spec, model, cfg.estimator) if cfg.mc else None
            asym = qmoments.fluctuation_limit(spec, _asymptotic_q(cfg, model))
            label = f"sizes={','.join(map(str, cfg.sizes))} eps={''.join(map(str, w))} n={model.n} q_n={model.q}"
            rows.append(ComparisonRow(label, None, est and est.value, est and est.stderr, float(asym)))
            records.append(_record(label, None, est, asym, model, cfg))
    return rows, records


def run_process(cfg: ExperimentConfig):
    rows, records = [], []
    for model in cfg.models:
        for t in cfg.times:
            oracle = qmoments.exact_finite_n_process_moment(t, model, cfg.budget)
            est = sykmc.mc_process_moment([float(x) for x in t], model, cfg.estimator) if cfg.mc else None
            asym = qmoments.q_brownian_moment([float(x) for x in t], _asymptotic_q(cfg, model))
            label = f"t=({','.join(str(x) for x in t)}) n={model.n} q_n={model.q}"
            rows.append(ComparisonRow(label, Fraction(oracle), est and est.value, est and est.stderr, float(asym)))
            records.append(_record(label, oracle, est, asym, model, cfg))
    return rows, records


def run_converge(cfg: ExperimentConfig):
    pi = PairPartition.parse(cfg.pairing)
    rows, records = [], []
    workers = max(cfg.estimator.workers, 1)
    for model in cfg.models:
        s = qmoments.s_pi(pi, model, cfg.budget, workers=workers)
        qp = qmoments.q_from_model(model.n, model.q)
        target = float(cfg.q) ** crossings(pi) if cfg.q is not None else qp.q ** crossings(pi)
        sign = qmoments.pairwise_sign_expectation(model)
        label = f"pi={pi} n={model.n} q_n={model.q} lambda={model.lam:g}"
        rows.append(ComparisonRow(label, s, None, None, target))
        rec = _record(label, s, None, target, model, cfg)
        rec["abs_error"] = abs(float(s) - target)
        rec["pairwise_sign"] = qmoments.frac_json(sign)
        rec["pairwise_sign_abs_error"] = abs(float(sign) - math.exp(-2 * model.lam))
        records.append(rec)
    return rows, records


def _record(label, oracle, est, asym, model, cfg) -> dict:
    rec = {"label": label}
    if oracle is not None:
        rec["value"] = qmoments.frac_json(Fraction(oracle))
    rec["asymptotic"] = float(asym)
    if est is not None:
        rec["mc"] = est.to_record(model, cfg.estimator.seed)
    return rec


def run_fock(cfg: ExperimentConfig):
    q = float(cfg.q)
    lines = ["word,wick,vacuum,abs_diff"]
    worst = 0.0
    for k in range(1, cfg.max_k + 1):
        for w in itertools.product(range(1, cfg.p + 1), repeat=k):
            wick = qmoments.q_wick_moment(w, cfg.q)
            vac = qfock.vacuum_moment(w, q)
            diff = abs(vac - float(wick))
            worst = max(worst, diff)
            lines.append(f"{''.join(map(str, w))},{float(wick)!r},{float(vac)!r},{float(diff)!r}")
    return "\n".join(lines) + "\n", {"p": cfg.p, "q": q, "max_k": cfg.max_k, "max_abs_diff": worst}


def run_cauchy(cfg: ExperimentConfig):
    lo, hi, count = cfg.re_grid
    re = np.linspace(lo, hi, count)
    q = float(cfg.q)
    lines = ["re_z,im_z,re_g,im_g"]
    worst = None
    for im in cfg.im_values:
        z = re + 1j * im
        g = qfock.cauchy_continued_fraction(z, q, cfg.depth)
        if q == 0:
            dev = float(np.abs(g - qfock.semicircle_cauchy(z)).max())
            worst = dev if worst is None else max(worst, dev)
        for a, b in zip(z, np.atleast_1d(g)):
            a, b = complex(a), complex(b)
            lines.append(f"{a.real!r},{a.imag!r},{b.real!r},{b.imag!r}")
    summary = {"q": q, "depth": cfg.depth, "points": len(lines) - 1}
    if worst is not None:
        summary["max_abs_diff_semicircle"] = worst
    return "\n".join(lines) + "\n", summary


def _write_meta(cfg: ExperimentConfig, out: Path):
    meta = {
        "kind": cfg.kind,
        "seed": cfg.estimator.seed,
        "models": [{"n": m.n, "q_n": m.q} for m in cfg.models],
        "n_samples": cfg.estimator.n_samples,
        "law": cfg.law,
    }
    (out / f"{cfg.kind}.meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def run(cfg: ExperimentConfig, out: Path, fmt: str = "csv", stream: TextIO | None = None) -> int:
    stream = stream or sys.stdout
    out.mkdir(parents=True, exist_ok=True)
    _write_meta(cfg, out)
    if cfg.kind in ("fock", "cauchy"):
        text, summary = (run_fock if cfg.kind == "fock" else run_cauchy)(cfg)
        (out / f"{cfg.kind}.csv").write_text(text)
        if fmt == "json":
            (out / f"{cfg.kind}.json").write_text(json.dumps(summary, indent=2) + "\n")
        for key, val in summary.items():
            stream.write(f"{key}: {val}\n")
        return 0
    runner = {"moments": run_moments, "fluct": run_fluct, "process": run_process,
              "converge": run_converge}[cfg.kind]
    rows, records = runner(cfg)
    text = report(rows, stream)
    if fmt == "json":
        (out / f"{cfg.kind}.json").write_text(json.dumps(records, indent=2) + "\n")
    else:
        (out / f"{cfg.kind}.csv").write_text(text)
    return 0


# ---------------------------------------------------------------------------
# entry point


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sykq", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind)
        sp.add_argument("--config", help="INI file with a [%s] section" % kind)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", default=".")
        sp.add_argument("--threads", type=int)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_parser("selftest")
    dp = sub.add_parser("partitions", help="dump P_2(k) in canonical block notation")
    dp.add_argument("k", type=int)
    pp = sub.add_parser("pauli", help="print Psi_R as a Pauli string")
    pp.add_argument("n", type=int)
    pp.add_argument("indices", help="comma separated, e.g. 1,2")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "selftest":
        return 0 if run_selftest() else 1
    if args.command == "partitions":
        for pi in enumerate_pair_partitions(args.k):
            print(pi)
        return 0
    if args.command == "pauli":
        R = MultiIndex(_ints(args.indices), args.n)
        print(psi_R(R, MajoranaRep(args.n)))
        return 0
    try:
        cfg = load_config(args.command, args.config, args.seed, args.threads)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg, Path(args.out), args.format)
    except qmoments.BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
