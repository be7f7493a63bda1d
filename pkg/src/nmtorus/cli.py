"""Command-line interface: ``nmtorus {afa,nm,scan-k,portrait,verify}``.

Exit codes: 0 success, 1 invalid configuration, 2 computation failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from nmtorus import __version__
from nmtorus.analysis import build_pair, m_vs_k_scan, run_nm
from nmtorus.classical import initial_grid, phase_portrait
from nmtorus.errors import ValidationError
from nmtorus.io import read_header, write_echo, write_nm, write_portrait, write_scan
from nmtorus.maps import coupling_from_hbar_units, hbar
from nmtorus.nonmarkov import ORACLE_GUARD
from nmtorus.verify import run_checks

log = logging.getLogger("nmtorus")

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE, EXIT_VERIFY = 0, 1, 2, 3


class ConfigError(ValidationError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass
class RunConfig:
    family: str = "pcm"
    n: int = 512
    a: float = 1.0
    kick: float = 0.25
    k: float | None = None
    k_prime: float | None = None
    delta: float | None = None
    delta_over_hbar: float | None = None
    horizon: int = 100
    out: str = "."
    seed: int = 0
    workers: int | None = None
    # scan-k
    k_grid: list = field(default_factory=lambda: [0.001, 0.25, 1.0])
    eval_time: int = 20
    # portrait
    grid: int = 20
    steps: int = 500
    # verify
    samples: int = 200

    def validate(self, command: str) -> None:
        if self.family not in ("pcm", "harper"):
            raise ConfigError("family", f"must be 'pcm' or 'harper', got {self.family!r}")
        if not isinstance(self.n, int) or self.n < 4 or self.n > 8192 or self.n & (self.n - 1):
            raise ConfigError("n", f"must be a power of two between 4 and 8192, got {self.n}")
        if command in ("afa", "nm", "verify", "scan-k") and (self.delta is None) == (self.delta_over_hbar is None):
            raise ConfigError("delta", "give exactly one of --delta and --delta-over-hbar")
        if self.horizon < 1:
            raise ConfigError("horizon", "must be >= 1")
        if self.family == "pcm" and not self.a > 0:
            raise ConfigError("a", "must be positive")
        if self.family == "harper" and self.k is None and command not in ("scan-k", "portrait"):
            raise ConfigError("k", "required for the harper family")
        if command == "scan-k" and not self.k_grid:
            raise ConfigError("k_grid", "must not be empty")
        if command == "scan-k" and self.eval_time < 1:
            raise ConfigError("eval_time", "must be >= 1")
        if command == "verify" and self.n > ORACLE_GUARD:
            raise ConfigError("n", f"verify runs dense oracles and needs N <= {ORACLE_GUARD}, got {self.n}")
        if command == "verify" and self.samples < 1:
            raise ConfigError("samples", "must be >= 1")
        if command == "portrait" and (self.grid < 1 or self.steps < 0):
            raise ConfigError("grid", "grid must be >= 1 and steps >= 0")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers", "must be >= 1")

    def coupling(self) -> float:
        if self.delta is not None:
            return float(self.delta)
        return coupling_from_hbar_units(self.delta_over_hbar, self.n)

    def map_params(self) -> dict:
        if self.family == "pcm":
            return {"a": self.a, "K": self.kick}
        k_prime = self.k if self.k_prime is None else self.k_prime
        return {"k": self.k, "k_prime": k_prime}


CONFIG_FIELDS = {f.name for f in dataclasses.fields(RunConfig)}


def load_config_file(path) -> dict:
    """JSON or YAML mapping, or a previous output CSV (its header is reused)."""
    path = Path(path)
    if path.suffix == ".csv":
        data = read_header(path).get("config", {})
    elif path.suffix in (".yaml", ".yml"):
        import yaml

        data = yaml.safe_load(path.read_text()) or {}
    else:
        data = json.loads(path.read_text())
    data = {str(k).replace("-", "_"): v for k, v in data.items()}
    unknown = set(data) - CONFIG_FIELDS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown configuration key")
    return data


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON/YAML config file or a previous output CSV; flags override it")
    common.add_argument("--family", choices=["pcm", "harper"])
    common.add_argument("--n", type=int, help="Hilbert-space dimension N (power of two)")
    common.add_argument("--a", type=float, help="cat-map chaoticity parameter")
    common.add_argument("--kick", type=float, help="cat-map kick depth K")
    common.add_argument("--k", type=float, help="Harper position-kick strength")
    common.add_argument("--k-prime", type=float, help="Harper momentum-kick strength (default: k)")
    coupling = common.add_mutually_exclusive_group()
    coupling.add_argument("--delta", type=float, help="raw coupling (delta K or delta k)")
    coupling.add_argument("--delta-over-hbar", type=float, help="coupling in units of hbar = 1/(2 pi N)")
    common.add_argument("--horizon", type=int, help="number of map steps T")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="seed for sampling-based checks")
    common.add_argument("--workers", type=int, help="worker threads (default: all cores)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="nmtorus", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"nmtorus {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("afa", parents=[common], help="average fidelity amplitude f(t)")
    sub.add_parser("nm", parents=[common], help="non-Markovianity measure M(t)")
    scan = sub.add_parser("scan-k", parents=[common], help="M(eval_time) against Harper k")
    scan.add_argument("--k-grid", type=_float_list, help="comma-separated k values")
    scan.add_argument("--eval-time", type=int)
    portrait = sub.add_parser("portrait", parents=[common], help="classical phase portraits")
    portrait.add_argument("--k-grid", type=_float_list, help="comma-separated Harper k values")
    portrait.add_argument("--grid", type=int, help="initial conditions per axis")
    portrait.add_argument("--steps", type=int)
    verify = sub.add_parser("verify", parents=[common], help="small-N oracle checks")
    verify.add_argument("--samples", type=int)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        values.update(load_config_file(args.config))
    flags = {k: v for k, v in vars(args).items() if k in CONFIG_FIELDS and v is not None}
    if "delta" in flags or "delta_over_hbar" in flags:
        values.pop("delta", None)
        values.pop("delta_over_hbar", None)
    values.update(flags)
    try:
        config = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError("config", str(exc)) from None
    config.validate(args.command)
    return config


def _header(command: str, config: RunConfig, **derived) -> dict:
    return {
        "command": command,
        "config": dataclasses.asdict(config),
        "derived": derived,
        "package": f"nmtorus {__version__}",
        "conventions": {"hbar": "1/(2 pi N)", "lattice": "q_n = n/N, p_m = m/N, zero Bloch phases"},
    }


def _stem(kind: str, config: RunConfig, delta: float) -> str:
    return f"{kind}_{config.family}_N{config.n}_delta{delta:.6g}"


def cmd_afa(config: RunConfig, with_nm: bool = False) -> list[Path]:
    delta = config.coupling()
    pair = build_pair(config.family, config.n, config.map_params(), delta)
    echo, nm = run_nm(pair, config.horizon, config.workers)
    header = _header("nm" if with_nm else "afa", config, delta=delta, hbar=hbar(config.n), label=pair.label)
    out = Path(config.out)
    paths = [write_echo(out / f"{_stem('afa', config, delta)}.csv", echo, header)]
    if with_nm:
        paths.append(write_nm(out / f"{_stem('nm', config, delta)}.csv", nm, header))
    return paths


def cmd_nm(config: RunConfig) -> list[Path]:
    return cmd_afa(config, with_nm=True)


def cmd_scan_k(config: RunConfig) -> tuple[list[Path], int]:
    delta = config.coupling()
    scan = m_vs_k_scan(config.k_grid, config.n, delta, config.eval_time, config.k_prime, config.workers)
    header = _header("scan-k", config, delta=delta, hbar=hbar(config.n), failed_points=scan.failed)
    name = f"{_stem('scan_k', config, delta)}_t{config.eval_time}.csv"
    path = write_scan(Path(config.out) / name, scan, header)
    for k, err in zip(scan.grid, scan.errors):
        if err:
            log.warning("k=%g failed: %s", k, err)
    return [path], scan.failed


def cmd_portrait(config: RunConfig) -> list[Path]:
    grid = initial_grid(config.grid)
    paths = []
    if config.family == "harper":
        ks = [config.k] if config.k is not None else config.k_grid
        runs = [({"k": k, "k_prime": k if config.k_prime is None else config.k_prime}, f"k{k:g}") for k in ks]
    else:
        runs = [({"a": config.a, "K": config.kick}, f"a{config.a:g}_K{config.kick:g}")]
    for params, tag in runs:
        orbits = phase_portrait(config.family, params, grid, config.steps)
        header = _header("portrait", config, map_params=params, orbits=len(orbits))
        name = f"portrait_{config.family}_{tag}_g{config.grid}_s{config.steps}.csv"
        paths.append(write_portrait(Path(config.out) / name, orbits, header))
    return paths


def cmd_verify(config: RunConfig) -> bool:
    pair = build_pair(config.family, config.n, config.map_params(), config.coupling())
    print(f"oracle checks for {pair.label}, horizon {config.horizon}")
    results = run_checks(pair, config.horizon, config.samples, config.seed)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print("all checks passed" if ok else "VERIFICATION FAILED")
    return ok


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        config = resolve_config(args)
    except (ValidationError, OSError, ValueError) as exc:
        print(f"nmtorus: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "verify":
            return EXIT_OK if cmd_verify(config) else EXIT_VERIFY
        if args.command == "scan-k":
            paths, failed = cmd_scan_k(config)
            if failed == len(config.k_grid):
                print("nmtorus: every scan point failed", file=sys.stderr)
                return EXIT_COMPUTE
        elif args.command == "portrait":
            paths = cmd_portrait(config)
        elif args.command == "nm":
            paths = cmd_nm(config)
        else:
            paths = cmd_afa(config)
    except ValidationError as exc:
        print(f"nmtorus: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:
        log.debug("computation failed", exc_info=True)
        print(f"nmtorus: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    for p in paths:
        print(p)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
