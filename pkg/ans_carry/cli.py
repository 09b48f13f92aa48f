from __future__ import annotations

import argparse
import logging
import sys
from contextlib import nullcontext
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import TYPE_CHECKING, Any

from mpmath import mpf

from ans_carry.AlgebraicReal import AlgebraicReal, parse_beta
from ans_carry.BetaProfile import BetaProfile
from ans_carry.bundles.probes import h_points, k4_points
from ans_carry.bundles.serialize import decimal_str, dump_json, write_csv
from ans_carry.CarryAnalyzer import empirical_cp, filtered_cp, local_growth, probe
from ans_carry.Dfa import base_dfa, builtin, read_dfa
from ans_carry.exception import CarryError, InitializationError, ParseError, PrecisionError
from ans_carry.GreedyBasis import GreedyBasis, builtin_basis, read_basis
from ans_carry.Odometer import layer_cp
from ans_carry.RationalBase import RationalBase
from ans_carry.Signature import read_signature
from ans_carry.SpectralReport import decide_cp
from ans_carry.SystemSource import (
    H_LEVEL_MAX,
    DfaSource,
    GreedySource,
    RationalBaseSource,
    SignatureSource,
    SystemSource,
    builtin_source,
)

if TYPE_CHECKING:
    from collections.abc import Sequence
    from contextlib import AbstractContextManager
    from typing import TextIO

    from ans_carry.Dfa import Dfa

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNDETERMINED = 2

Commands = ("analyze", "estimate", "probe", "measures")
SystemKeys = ("builtin", "builtin_lang", "base", "rational", "dfa", "signature", "basis", "beta", "beta_file")


@dataclass(frozen=True, slots=True)
class RunConfig:
    r"""
    One command run: exactly one system and positive budgets.

    Values come from a `key=value` config file overridden by the flags.
    """

    command: str
    builtin: str | None = None
    builtin_lang: str | None = None
    base: int | None = None
    rational: str | None = None
    dfa: str | None = None
    signature: str | None = None
    basis: str | None = None
    beta: str | None = None
    beta_file: str | None = None
    interval: str | None = None
    n: int = 1_000_000
    level_max: int = 16
    k: int = 30
    checkpoints: str = "default"
    sequence: str | None = None
    levels: str = "2:16"
    output: str | None = None
    format: str = "json"
    mode: str = "numba"
    tolerance: str | None = None

    @property
    def system_key(self) -> str:
        return next(key for key in SystemKeys if getattr(self, key) is not None)

    @property
    def system_value(self) -> Any:
        return getattr(self, self.system_key)

    def validate(self) -> RunConfig:
        if self.command not in Commands:
            raise InitializationError(f"command must be in {Commands}, but given {self.command}!")
        given = [key for key in SystemKeys if getattr(self, key) is not None]
        if len(given) != 1:
            raise InitializationError(f"exactly one system is needed, but given {given or 'none'}")
        for name in ("n", "level_max", "k"):
            if getattr(self, name) < 1:
                raise InitializationError(f"{name} must be positive, but given {getattr(self, name)}!")
        if self.format not in ("json", "csv"):
            raise InitializationError(f"format must be json or csv, but given {self.format}!")
        if self.mode not in ("python", "numba", "parallel"):
            raise InitializationError(f"mode must be python, numba or parallel, but given {self.mode}!")
        if self.interval is not None and self.beta is None:
            raise InitializationError("--interval goes with --beta")
        if self.command == "probe" and self.sequence is None:
            raise InitializationError("probe needs --sequence")
        self.checkpoint_list()
        self.level_range()
        self.tolerance_value()
        self.interval_bounds()
        if self.beta is not None:
            self.beta_coefficients()
        if self.sequence is not None:
            self.sequence_points()
        return self

    def checkpoint_list(self) -> list[int] | None:
        if self.checkpoints == "default":
            return None
        try:
            return [int(x) for x in self.checkpoints.replace(",", " ").split()]
        except ValueError as exc:
            raise ParseError(f"cannot read the checkpoints {self.checkpoints!r}") from exc

    def level_range(self) -> range:
        first, sep, last = self.levels.partition(":")
        try:
            return range(int(first), int(last) + 1) if sep else range(int(first), int(first) + 1)
        except ValueError as exc:
            raise ParseError(f"cannot read the levels {self.levels!r}, expected first:last") from exc

    def tolerance_value(self) -> Fraction | None:
        if self.tolerance is None:
            return None
        try:
            return Fraction(self.tolerance)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"cannot read the tolerance {self.tolerance!r}") from exc

    def interval_bounds(self) -> tuple[Fraction, Fraction] | None:
        if self.interval is None:
            return None
        try:
            lo, hi = (Fraction(x) for x in self.interval.replace(",", " ").split())
        except ValueError as exc:
            raise ParseError(f"cannot read the interval {self.interval!r}: {exc}") from exc
        return lo, hi

    def beta_coefficients(self) -> list[int]:
        try:
            return [int(c) for c in self.beta.replace(",", " ").split()]
        except ValueError as exc:
            raise ParseError(f"cannot read the polynomial {self.beta!r}") from exc

    def sequence_points(self) -> list[int] | None:
        """Word counts of an integer sequence, None for the named sequences M and K4"""
        if self.sequence.lower() in ("m", "k4"):
            return None
        try:
            return [int(x) for x in self.sequence.replace(",", " ").split()]
        except ValueError as exc:
            raise ParseError(f"cannot read the sequence {self.sequence!r}, expected M, K4 or integers") from exc

    def metadata(self) -> dict[str, Any]:
        return {"command": self.command, "system": f"{self.system_key}={self.system_value}"}


_int_keys = {"base", "n", "level_max", "k"}


def read_config(path: str) -> dict[str, Any]:
    """`key=value` lines, `#` comments"""
    names = {f.name for f in fields(RunConfig)}
    values = {}
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep or key not in names or key == "command":
                raise ParseError(f"unknown setting {line!r}", filename=path, line=lineno)
            value = value.strip()
            try:
                values[key] = int(value) if key in _int_keys else value
            except ValueError as exc:
                raise ParseError(str(exc), filename=path, line=lineno) from exc
    return values


def make_config(args: argparse.Namespace) -> RunConfig:
    values = read_config(args.config) if args.config else {}
    for f in fields(RunConfig):
        flag = getattr(args, f.name, None)
        if flag is not None:
            values[f.name] = flag
    values["command"] = args.command
    return RunConfig(**values).validate()


def _rational(text: str) -> RationalBase:
    p, sep, q = text.partition("/")
    try:
        return RationalBase(int(p), int(q) if sep else 1)
    except ValueError as exc:
        raise ParseError(f"cannot read the rational base {text!r}") from exc


def _beta(cfg: RunConfig) -> BetaProfile:
    if cfg.beta_file is not None:
        with open(cfg.beta_file) as f:
            return BetaProfile(parse_beta(f.read(), filename=cfg.beta_file))
    return BetaProfile(AlgebraicReal(cfg.beta_coefficients(), cfg.interval_bounds()))


def build_dfa(cfg: RunConfig) -> Dfa:
    match cfg.system_key:
        case "builtin":
            return builtin(cfg.builtin)
        case "base":
            return base_dfa(cfg.base)
        case "dfa":
            return read_dfa(cfg.dfa)
    raise InitializationError(f"analyze needs an automaton, but given --{cfg.system_key.replace('_', '-')}")


def build_basis(cfg: RunConfig) -> tuple[GreedyBasis, BetaProfile | None]:
    match cfg.system_key:
        case "builtin":
            return builtin_basis(cfg.builtin), None
        case "base":
            return GreedyBasis.integer_base(cfg.base), None
        case "basis":
            return read_basis(cfg.basis), None
        case "beta" | "beta_file":
            profile = _beta(cfg)
            return profile.basis(), profile
    raise InitializationError(f"measures needs a basis, but given --{cfg.system_key.replace('_', '-')}")


def build_source(cfg: RunConfig) -> SystemSource:
    match cfg.system_key:
        case "builtin" | "builtin_lang":
            return builtin_source(cfg.system_value, max(cfg.level_max, H_LEVEL_MAX))
        case "base":
            return GreedySource(GreedyBasis.integer_base(cfg.base))
        case "rational":
            return RationalBaseSource(_rational(cfg.rational))
        case "dfa":
            return DfaSource(read_dfa(cfg.dfa), name=cfg.dfa)
        case "signature":
            return SignatureSource(read_signature(cfg.signature), name=cfg.signature)
        case "basis":
            return GreedySource(read_basis(cfg.basis), name=cfg.basis)
        case _:
            return GreedySource.from_beta(_beta(cfg))


def _mode(cfg: RunConfig, src: SystemSource) -> str:
    if cfg.mode == "parallel" and not src.random_access:
        return "numba"
    return cfg.mode


def _open_output(cfg: RunConfig) -> AbstractContextManager[TextIO]:
    if cfg.output is None:
        return nullcontext(sys.stdout)
    return open(cfg.output, "w", encoding="utf-8")


def cmd_analyze(cfg: RunConfig) -> int:
    dfa = build_dfa(cfg)
    verdict = decide_cp(dfa)
    growth = local_growth(DfaSource(dfa, name=str(cfg.system_value)), cfg.level_max)
    with _open_output(cfg) as stream:
        dump_json(cfg.metadata(), {"verdict": verdict.to_dict(), "local_growth": growth.to_dict()}, stream)
    return EXIT_OK if verdict.exists else EXIT_UNDETERMINED


def cmd_estimate(cfg: RunConfig) -> int:
    src = build_source(cfg)
    report = empirical_cp(src, cfg.n, cfg.checkpoint_list(), _mode(cfg, src))
    with _open_output(cfg) as stream:
        if cfg.format == "csv":
            report.write_csv(stream)
        else:
            dump_json(cfg.metadata(), report.to_dict(), stream)
    tolerance = cfg.tolerance_value()
    if tolerance is not None and report.deviation is not None:
        if report.deviation > mpf(tolerance.numerator) / tolerance.denominator:
            logger.warning("mean %s is off the closed form by %s", decimal_str(report.mean), decimal_str(report.deviation))
            return EXIT_UNDETERMINED
    return EXIT_OK


def _probe_points(cfg: RunConfig, src: SystemSource) -> list[int]:
    match cfg.sequence.lower():
        case "m":
            return h_points(cfg.level_range())
        case "k4":
            if not isinstance(src, DfaSource):
                raise InitializationError("the K4 sequence needs an automaton")
            return k4_points(src.language, cfg.level_range())
    return cfg.sequence_points()


def cmd_probe(cfg: RunConfig) -> int:
    src = build_source(cfg)
    points = probe(src, _probe_points(cfg, src), _mode(cfg, src))
    filtered = filtered_cp(src, cfg.level_max)
    with _open_output(cfg) as stream:
        if cfg.format == "csv":
            rows = ((p.n, p.scp, p.mean, decimal_str(p.mean)) for p in points)
            write_csv(("n", "scp", "mean", "mean_decimal"), rows, stream, cfg.metadata())
        else:
            data = {"probe": [p.to_dict() for p in points], "filtered": filtered.to_dict()}
            dump_json(cfg.metadata(), data, stream)
    return EXIT_UNDETERMINED if filtered.trend == "diverging" else EXIT_OK


def cmd_measures(cfg: RunConfig) -> int:
    basis, profile = build_basis(cfg)
    try:
        table = layer_cp(basis, cfg.k, cfg.n, cfg.tolerance_value(), cfg.mode)
    except PrecisionError as exc:
        logger.error("%s", exc)
        return EXIT_UNDETERMINED
    metadata = cfg.metadata()
    if profile is not None:
        metadata["parry"] = profile.parry
        metadata["quasi_greedy"] = profile.d_star_str()
    with _open_output(cfg) as stream:
        if cfg.format == "csv":
            table.write_csv(stream, metadata)
        else:
            data = table.to_dict()
            if profile is not None:
                data["beta"] = profile.to_dict()
            dump_json(metadata, data, stream)
    return EXIT_OK


_commands = {
    "analyze": cmd_analyze,
    "estimate": cmd_estimate,
    "probe": cmd_probe,
    "measures": cmd_measures,
}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ans_carry", description="Carry propagation in abstract numeration systems")
    parser.add_argument("command", choices=Commands)
    parser.add_argument("--config", help="key=value settings, overridden by the flags")
    system = parser.add_mutually_exclusive_group()
    system.add_argument("--builtin", help="base(p), fibonacci, fina, tribonacci, k1, k1prime, k2, k3, k4, chain, h")
    system.add_argument("--builtin-lang", dest="builtin_lang", help="builtin language (H)")
    system.add_argument("--base", type=int, help="integer base p")
    system.add_argument("--rational", help="rational base p/q")
    system.add_argument("--dfa", help="automaton file")
    system.add_argument("--signature", help="signature file")
    system.add_argument("--basis", help="basis file, one integer per line")
    system.add_argument("--beta", help='integer polynomial of β, highest degree first, e.g. "1 -1 -1"')
    system.add_argument("--beta-file", dest="beta_file", help="file with `poly:` and `interval:` lines")
    parser.add_argument("--interval", help='isolating interval of β, e.g. "1 2"')
    parser.add_argument("--n", type=int, help="number of words")
    parser.add_argument("--level-max", dest="level_max", type=int, help="largest length for the count tables")
    parser.add_argument("--k", type=int, help="number of layers")
    parser.add_argument("--checkpoints", help="'default' or a list of word counts")
    parser.add_argument("--sequence", help="probe sequence: M, K4 or a list of word counts")
    parser.add_argument("--levels", help="probe levels first:last")
    parser.add_argument("--output", help="output file, stdout by default")
    parser.add_argument("--format", choices=("json", "csv"))
    parser.add_argument("--mode", choices=("python", "numba", "parallel"))
    parser.add_argument("--tolerance", help="accepted deviation, a rational")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true")
    verbosity.add_argument("--quiet", "-q", action="store_true")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.ERROR if args.quiet else logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = make_config(args)
        logger.debug("running %s on %s", cfg.command, cfg.system_key)
        return _commands[cfg.command](cfg)
    except CarryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
