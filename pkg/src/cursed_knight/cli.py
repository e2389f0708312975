"""Command-line front end: ``solve``, ``sweep`` and ``verify``.

Exit codes: 0 success, 1 configuration error, 2 solver non-convergence,
3 failed verification.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .bands import (
    BandValidationError,
    DistributionBand,
    load_band,
    band_from_dict,
    zero_uncertainty_band,
)
from .equilibria import (
    EquilibriumResult,
    ambiguous_ckne_threshold,
    solve_all_ckne,
    solve_ambiguous_ckne,
    solve_ambiguous_cursed_uncursed,
    solve_bne,
    solve_cursed_no_uncertainty,
    solve_cursed_uncursed,
    solve_knight_nash_cutoff,
    solve_partial,
    solve_symmetric_ckne,
    symmetric_ckne_threshold,
)
from .oracle import GeneralStrategy, bruteforce_min_value, simulate_game, verify_equilibrium
from .roots import ConvergenceError
from .valuation import TRADE, CutoffStrategy, ValueQuery, trade_values
from .welfare import welfare_report

log = logging.getLogger("cursed_knight")

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_VERIFY = 0, 1, 2, 3

SOLVE_CONCEPTS = (
    "bne",
    "cursed",
    "knight-nash",
    "symmetric-ckne",
    "all-ckne",
    "cursed-uncursed",
    "ambiguous-ckne",
    "ambiguous-cursed-uncursed",
    "partial",
    "welfare",
)
SWEEP_CONCEPTS = ("symmetric-ckne", "ambiguous-ckne", "welfare")
VERIFY_CONCEPTS = ("symmetric-ckne", "ambiguous-ckne", "knight-nash", "bne", "welfare")
BAND_FREE = ("bne", "partial", "welfare")
SIG = "%.12g"


class ConfigError(Exception):
    """Invalid command-line configuration."""


class VerificationFailed(Exception):
    """An oracle check disagreed with the analytic result."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


@dataclass
class RunConfig:
    """Parsed options of one CLI invocation."""

    command: str
    concept: str
    family: str | None = None
    param: float | None = None
    band_file: str | None = None
    chi1: float = 0.0
    chi2: float = 0.0
    start: float = 0.0
    stop: float = 1.0
    steps: int = 11
    chi_other: float = 1.0
    player: int = 1
    n: int = 1_000_000
    seed: int = 0
    perturb: float = 0.0
    grid_n: int = 1000
    output: str | None = None
    fmt: str = "json"

    def validate(self) -> None:
        if self.family is not None and self.band_file is not None:
            raise ConfigError("use either --family or --band-file, not both")
        if self.command == "sweep":
            if self.steps < 2:
                raise ConfigError("--steps must be at least 2")
            if self.concept != "welfare" and self.family is None:
                raise ConfigError("threshold sweeps need --family")
        for name in ("chi1", "chi2", "chi_other"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"--{name.replace('_', '-')} must lie in [0, 1]")
        if self.n < 1:
            raise ConfigError("--n must be positive")
        if self.player not in (1, 2):
            raise ConfigError("--player must be 1 or 2")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cursed-knight", description="Equilibria of the trading game under Knightian uncertainty.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at debug level")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def band_opts(p):
        p.add_argument("--family", help="contamination, triangle, epsilon, uniform or a built-in band name")
        p.add_argument("--param", type=float, help="family parameter")
        p.add_argument("--band-file", help="band JSON file")

    def out_opts(p, default_fmt):
        p.add_argument("--output", "-o", help="output path; stdout when omitted")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=default_fmt)

    solve = sub.add_parser("solve", help="solve one equilibrium concept")
    solve.add_argument("--concept", required=True, choices=SOLVE_CONCEPTS)
    band_opts(solve)
    solve.add_argument("--chi1", type=float, default=0.0)
    solve.add_argument("--chi2", type=float, default=0.0)
    solve.add_argument("--grid-n", type=int, default=256, help="lattice size for all-ckne")
    out_opts(solve, "json")

    sweep = sub.add_parser("sweep", help="threshold or welfare curve over a parameter range")
    sweep.add_argument("--concept", required=True, choices=SWEEP_CONCEPTS)
    sweep.add_argument("--family", help="band family whose parameter is swept")
    sweep.add_argument("--start", type=float, required=True)
    sweep.add_argument("--stop", type=float, required=True)
    sweep.add_argument("--steps", type=int, default=11)
    sweep.add_argument("--chi-other", type=float, default=1.0, help="opponent cursedness in welfare sweeps")
    sweep.add_argument("--player", type=int, default=1, help="player whose cursedness is swept")
    out_opts(sweep, "csv")

    verify = sub.add_parser("verify", help="run the oracle checks for one scenario")
    verify.add_argument("--concept", required=True, choices=VERIFY_CONCEPTS)
    band_opts(verify)
    verify.add_argument("--chi1", type=float, default=0.0)
    verify.add_argument("--chi2", type=float, default=0.0)
    verify.add_argument("--n", type=int, default=1_000_000, help="simulated games")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--perturb", type=float, default=0.0, help="shift added to the equilibrium threshold")
    verify.add_argument("--grid-n", type=int, default=1000)
    out_opts(verify, "json")
    return parser


def parse_config(argv) -> RunConfig:
    ns = _build_parser().parse_args(argv)
    fields = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__}
    cfg = RunConfig(**fields)
    cfg.validate()
    return cfg


def resolve_band(cfg: RunConfig) -> DistributionBand:
    if cfg.band_file is not None:
        try:
            return load_band(cfg.band_file)
        except OSError as exc:
            raise ConfigError(f"cannot read band file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"band file is not valid JSON: {exc}") from None
    if cfg.family is not None:
        doc = {"family": cfg.family}
        if cfg.param is not None:
            doc["param"] = cfg.param
        return band_from_dict(doc)
    if cfg.concept in BAND_FREE or cfg.concept == "cursed":
        return zero_uncertainty_band()
    raise ConfigError(f"concept {cfg.concept!r} needs --family or --band-file")


# -- solve ------------------------------------------------------------------------

def _solve_result(cfg: RunConfig, band: DistributionBand) -> EquilibriumResult:
    c = cfg.concept
    if c == "bne":
        return solve_bne()
    if c == "cursed":
        return solve_cursed_no_uncertainty(band.center)
    if c == "knight-nash":
        return solve_knight_nash_cutoff(band)
    if c == "symmetric-ckne":
        return solve_symmetric_ckne(band)
    if c == "all-ckne":
        return solve_all_ckne(band, cfg.grid_n)
    if c == "cursed-uncursed":
        return solve_cursed_uncursed(band)
    if c == "ambiguous-ckne":
        return solve_ambiguous_ckne(band)
    if c == "ambiguous-cursed-uncursed":
        return solve_ambiguous_cursed_uncursed(band)
    return solve_partial(cfg.chi1, cfg.chi2, band.center)


def cmd_solve(cfg: RunConfig) -> tuple[int, str]:
    band = resolve_band(cfg)
    _log_band(band)
    if cfg.concept == "welfare":
        r = welfare_report(cfg.chi1, cfg.chi2)
        log.info("method: closed-form")
        doc = {
            "concept": "welfare",
            "band": band.describe(),
            "chi": [cfg.chi1, cfg.chi2],
            "thresholds": list(r.thresholds),
            "U": [r.U1, r.U2],
            "V": [r.V1, r.V2],
            "method": "closed-form",
        }
        if cfg.fmt == "csv":
            return EXIT_OK, _csv(["player", "chi", "U", "V"], [[1, cfg.chi1, r.U1, r.V1], [2, cfg.chi2, r.U2, r.V2]])
        return EXIT_OK, _json(doc)
    result = _solve_result(cfg, band)
    log.info("method: %s", result.method)
    for w in result.warnings:
        log.warning(w)
    if cfg.fmt == "csv":
        rows = [[i, a, b, r] for i, ((a, b), r) in enumerate(zip(result.profiles, result.residuals))]
        return EXIT_OK, _csv(["profile", "threshold1", "threshold2", "residual"], rows)
    doc = result.to_dict()
    doc["band"] = band.describe()
    return EXIT_OK, _json(doc)


# -- sweep ------------------------------------------------------------------------

def cmd_sweep(cfg: RunConfig) -> tuple[int, str]:
    values = np.linspace(cfg.start, cfg.stop, cfg.steps)
    if cfg.concept == "welfare":
        log.info("band: uniform center (welfare depends on trade probabilities only)")
        log.info("method: closed-form")
        rows = []
        for chi in values:
            chi = float(chi)
            if cfg.player == 1:
                r = welfare_report(chi, cfg.chi_other)
                rows.append([chi, r.U1, r.V1])
            else:
                r = welfare_report(cfg.chi_other, chi)
                rows.append([chi, r.U2, r.V2])
        header = ["chi", "U", "V"]
    else:
        solver = symmetric_ckne_threshold if cfg.concept == "symmetric-ckne" else ambiguous_ckne_threshold
        log.info("band: %s family swept over [%s, %s]", cfg.family, SIG % cfg.start, SIG % cfg.stop)
        log.info("method: bisection")
        rows = []
        for p in values:
            band = band_from_dict({"family": cfg.family, "param": float(p)})
            rows.append([float(p), solver(band)])
        header = ["param", "threshold"]
    if cfg.fmt == "json":
        return EXIT_OK, _json({"concept": cfg.concept, "columns": header, "rows": rows})
    return EXIT_OK, _csv(header, rows)


# -- verify -----------------------------------------------------------------------

def _check(name: str, passed: bool, **measured) -> dict:
    out = {"check": name, "passed": bool(passed)}
    out.update({k: float(v) if isinstance(v, (float, np.floating)) else v for k, v in measured.items()})
    return out


def _verify_symmetric(cfg: RunConfig, band: DistributionBand) -> tuple[list, dict]:
    ambiguous = cfg.concept == "ambiguous-ckne"
    concept = "ambiguous-cursed" if ambiguous else "maxmin-cursed-under-Fstar"
    theta = ambiguous_ckne_threshold(band) if ambiguous else symmetric_ckne_threshold(band)
    played = min(max(theta + cfg.perturb, 0.0), 1.0)
    checks = []
    cert = verify_equilibrium(
        (GeneralStrategy.cutoff(played), GeneralStrategy.cutoff(played)), (concept, concept), band, cfg.grid_n
    )
    checks.append(_check("no-profitable-deviation", cert.certified, max_improvement=cert.max_improvement,
                         worst_type=cert.worst_types[int(np.argmax(cert.improvements))]))
    mean, se = simulate_game(GeneralStrategy.cutoff(played), GeneralStrategy.cutoff(played), band.center, cfg.n,
                             cfg.seed)
    checks.append(_check("symmetric-payoff-half", abs(mean - 0.5) <= 3.0 * se, mean=mean, stderr=se, target=0.5))
    query = ValueQuery(played, TRADE, CutoffStrategy(played), band)
    brute = bruteforce_min_value(query, concept, samples=500, seed=cfg.seed)
    exact = float(trade_values(concept, played, played, band))
    checks.append(_check("trade-value-minimum", -1e-9 <= brute - exact < 1e-3, bruteforce=brute, closed_form=exact))
    return checks, {"threshold": theta, "played": played}


def _verify_trivial(cfg: RunConfig, band: DistributionBand) -> tuple[list, dict]:
    concept = "rational" if cfg.concept == "bne" else "maxmin-rational"
    played = min(max(cfg.perturb, 0.0), 1.0)
    s = GeneralStrategy.cutoff(played)
    cert = verify_equilibrium((s, s), (concept, concept), band, cfg.grid_n)
    checks = [_check("no-profitable-deviation", cert.certified, max_improvement=cert.max_improvement)]
    mean, se = simulate_game(s, s, band.center, cfg.n, cfg.seed)
    checks.append(_check("symmetric-payoff-half", abs(mean - 0.5) <= 3.0 * se, mean=mean, stderr=se, target=0.5))
    return checks, {"threshold": 0.0, "played": played}


def _verify_welfare(cfg: RunConfig, band: DistributionBand) -> tuple[list, dict]:
    r = welfare_report(cfg.chi1, cfg.chi2)
    p1, p2 = (min(max(p + cfg.perturb, 0.0), 1.0) for p in r.thresholds)
    mean, se = simulate_game(GeneralStrategy.cutoff(p1), GeneralStrategy.cutoff(p2), band.center, cfg.n, cfg.seed)
    checks = [_check("actual-utility", abs(mean - r.U1) <= 3.0 * se, mean=mean, stderr=se, target=r.U1)]
    cert = verify_equilibrium(
        (GeneralStrategy.cutoff(p1), GeneralStrategy.cutoff(p2)), ("partial", "partial"), band, cfg.grid_n,
        chis=(cfg.chi1, cfg.chi2),
    )
    checks.append(_check("no-profitable-deviation", cert.certified, max_improvement=cert.max_improvement))
    return checks, {"thresholds": [p1, p2]}


def cmd_verify(cfg: RunConfig) -> tuple[int, str]:
    band = resolve_band(cfg)
    if cfg.concept == "welfare":
        band = zero_uncertainty_band()
    _log_band(band)
    log.info("method: oracle checks (simulation n=%d seed=%d, grid_n=%d)", cfg.n, cfg.seed, cfg.grid_n)
    if cfg.concept in ("symmetric-ckne", "ambiguous-ckne"):
        checks, extra = _verify_symmetric(cfg, band)
    elif cfg.concept == "welfare":
        checks, extra = _verify_welfare(cfg, band)
    else:
        checks, extra = _verify_trivial(cfg, band)
    passed = all(c["passed"] for c in checks)
    doc = {"concept": cfg.concept, "band": band.describe(), "perturb": cfg.perturb, "passed": passed,
           "checks": checks}
    doc.update(extra)
    for c in checks:
        log.info("%s: %s", c["check"], "pass" if c["passed"] else "FAIL")
    text = _json(doc) if cfg.fmt == "json" else _csv(
        ["check", "passed"], [[c["check"], int(c["passed"])] for c in checks]
    )
    return (EXIT_OK if passed else EXIT_VERIFY), text


# -- output -------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return SIG % v
    return str(v)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, default=float) + "\n"


def _log_band(band: DistributionBand) -> None:
    log.info("band: %s", json.dumps(band.describe(), sort_keys=True))


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    verbose = "-v" in argv or "--verbose" in argv
    logging.basicConfig(level=logging.DEBUG if verbose else logging.INFO, format="%(levelname)s %(message)s",
                        stream=sys.stderr)
    try:
        cfg = parse_config(argv)
        handler = {"solve": cmd_solve, "sweep": cmd_sweep, "verify": cmd_verify}[cfg.command]
        code, text = handler(cfg)
        _emit(text, cfg.output)
        return code
    except (ConfigError, BandValidationError, ValueError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        log.error("solver did not converge: %s", exc)
        return EXIT_CONVERGENCE
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_CONFIG
