"""Command-line interface.

Subcommands ``spectrum``, ``xsec``, ``purity``, ``rho`` and
``lorentzian-demo``. Configuration comes from defaults, then an optional
``key = value`` file (``--config``), then per-key flags (``--sigma-thz 1.5``).

Exit codes: 0 success, 2 configuration error, 3 data-file error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .beamoptics import (BeamConfig, HelicitySpectrum, LensConfig, Options, Quadrature,
                         QuadratureError, SweepError, focus_coefficients, sweep)
from .materials import MaterialError, load_table, resolve_material
from .mie import Particle, cross_section, mie_set, omega_from_wavelength
from .quantum import (BASIS, BasisLabel, DegenerateExpansionError, NullStateError,
                      SpectralAmplitude, channel_weights, check_resolution, density_matrix,
                      frequency_grid, lorentzian_spectrum, purity,
                      purity_approx, purity_gaussian_overlap, purity_spectrum,
                      quasi_mono_params, required_lambda_range)
from .specfun import NumericalDomainError

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
THZ = 1e12  # sigma is quoted in THz of angular frequency (1e12 rad/s)


class ConfigError(ValueError):
    pass


class DataError(RuntimeError):
    pass


def _parse_lambda_in(text: str) -> tuple:
    """``start:stop:count`` (inclusive linspace) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("range must be start:stop:count")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ValueError("count must be >= 1")
        return tuple(float(v) for v in np.linspace(start, stop, count))
    values = tuple(float(v) for v in text.split(",") if v.strip())
    if not values:
        raise ValueError("empty wavelength list")
    return values


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class RunConfig:
    # particle
    radius_nm: float = 250.0
    material: str = "silicon.txt"
    # beam and lens
    waist_mm: float = 0.5
    q: int = 0
    s: int = -1
    na: float = 0.9
    focal_mm: float = 1.0
    # classical sweep
    lambda_min_nm: float = 975.0
    lambda_max_nm: float = 1150.0
    n_lambda: int = 176
    # quantum
    sigma_thz: float = 3.0
    lambda_in: str = "975:1150:176"
    lambda_step_nm: float = 0.125
    rho_lambda_nm: float = 1000.0
    rho_input: str = "psi_plus"
    # numerics
    quad_theta: int = 128
    quad_radial: int = 96
    quad_azimuthal: int = 64
    freq_grid_points: int = 64
    freq_window_sigmas: float = 6.0
    collimation_exponent: float = 1.0
    focal_phase: bool = True
    # lorentzian demo
    lorentz_omega_l: float = 1.75e15
    lorentz_gamma: float = 1e12
    lorentz_beta: float = 0.2
    demo_grid_points: int = 512

    def validate(self) -> "RunConfig":
        checks = [
            ("radius_nm", self.radius_nm > 0, "must be > 0"),
            ("waist_mm", self.waist_mm > 0, "must be > 0"),
            ("q", self.q >= 0, "must be >= 0"),
            ("s", self.s in (-1, 1), "must be +1 or -1"),
            ("na", 0.0 < self.na < 1.0, "must lie strictly inside (0, 1)"),
            ("focal_mm", self.focal_mm > 0, "must be > 0"),
            ("n_lambda", self.n_lambda >= 2, "must be >= 2"),
            ("lambda_min_nm", 0 < self.lambda_min_nm < self.lambda_max_nm,
             "must be positive and below lambda_max_nm"),
            ("sigma_thz", self.sigma_thz > 0, "must be > 0"),
            ("lambda_in", all(v > 0 for v in self.lambda_in_nm), "wavelengths must be > 0"),
            ("lambda_step_nm", self.lambda_step_nm > 0, "must be > 0"),
            ("rho_lambda_nm", self.rho_lambda_nm > 0, "must be > 0"),
            ("rho_input", self.rho_input in {b.value for b in BASIS}, "unknown basis label"),
            ("quad_theta", self.quad_theta >= 2, "must be >= 2"),
            ("quad_radial", self.quad_radial >= 2, "must be >= 2"),
            ("quad_azimuthal", self.quad_azimuthal >= 3, "must be >= 3"),
            ("freq_grid_points", self.freq_grid_points >= 2, "must be >= 2"),
            ("freq_window_sigmas", self.freq_window_sigmas > 0, "must be > 0"),
            ("collimation_exponent", np.isfinite(self.collimation_exponent), "must be finite"),
            ("lorentz_omega_l", self.lorentz_omega_l > 0, "must be > 0"),
            ("lorentz_gamma", self.lorentz_gamma > 0, "must be > 0"),
            ("demo_grid_points", self.demo_grid_points >= 2, "must be >= 2"),
        ]
        for key, ok, msg in checks:
            if not ok:
                raise ConfigError(f"{key} = {getattr(self, key)!r}: {msg}")
        if self.sigma_thz * THZ / float(omega_from_wavelength(max(self.lambda_in_nm + (self.rho_lambda_nm,)))) >= 1e-2:
            raise ConfigError(f"sigma_thz = {self.sigma_thz}: pulse is not quasi-monochromatic")
        return self

    # ----- derived objects
    @property
    def sigma(self) -> float:
        return self.sigma_thz * THZ

    def beam(self) -> BeamConfig:
        return BeamConfig(self.waist_mm, self.q, self.s)

    def lens(self) -> LensConfig:
        return LensConfig(self.na, self.focal_mm)

    def quadrature(self) -> Quadrature:
        return Quadrature(self.quad_theta, self.quad_radial, self.quad_azimuthal)

    def options(self) -> Options:
        return Options(self.collimation_exponent, self.focal_phase)

    def lambda_grid(self) -> np.ndarray:
        return np.linspace(self.lambda_min_nm, self.lambda_max_nm, self.n_lambda)

    def purity_lambda_grid(self, centres) -> np.ndarray:
        """Classical grid covering every pulse in ``centres`` at ``lambda_step_nm``."""
        lo, hi = required_lambda_range(centres, self.sigma, self.freq_window_sigmas)
        step = self.lambda_step_nm
        lo = np.floor(lo / step) * step
        hi = np.ceil(hi / step) * step
        return np.linspace(lo, hi, int(round((hi - lo) / step)) + 1)

    @property
    def lambda_in_nm(self) -> tuple:
        return _parse_lambda_in(self.lambda_in)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


_CONVERTERS = {int: int, float: float, str: str, bool: _parse_bool}
_FIELD_TYPES = {f.name: type(f.default) for f in fields(RunConfig)}


def _convert(key: str, raw: str):
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown configuration key {key!r}")
    try:
        value = _CONVERTERS[_FIELD_TYPES[key]](raw.strip())
        if key == "lambda_in":
            _parse_lambda_in(value)
        return value
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw.strip()!r} ({exc})") from None


def parse_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then the ``key = value`` file at ``path``, then ``overrides``."""
    values = {}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from None
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, raw = line.split("=", 1)
            key = key.strip()
            try:
                values[key] = _convert(key, raw)
            except ConfigError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
    for key, raw in (overrides or {}).items():
        values[key] = _convert(key, raw) if isinstance(raw, str) else raw
    return RunConfig(**values).validate()


# ------------------------------------------------------------ fingerprints

_CLASSICAL_KEYS = ("radius_nm", "waist_mm", "q", "s", "na", "focal_mm", "quad_theta",
                   "quad_radial", "quad_azimuthal", "collimation_exponent", "focal_phase")


def _digest(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _material_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def config_fingerprint(config: RunConfig, material_path: Path) -> str:
    d = config.as_dict()
    d["material"] = _material_digest(material_path)
    return _digest({"version": __version__, "config": d})


def spectrum_fingerprint(config: RunConfig, material_path: Path) -> str:
    """Hash of everything that determines alpha(omega), beta(omega) at a given wavelength."""
    d = {k: getattr(config, k) for k in _CLASSICAL_KEYS}
    d["material"] = _material_digest(material_path)
    return _digest({"version": __version__, "classical": d})


# ------------------------------------------------------------------ output

def fmt(x: float) -> str:
    """Shortest round-trip decimal representation."""
    return repr(float(x))


def _header(command: str, config: RunConfig, fingerprint: str, extra=()) -> list[str]:
    lines = [f"# helscat {__version__} {command}", f"# fingerprint: {fingerprint}"]
    lines += [f"# {line}" for line in extra]
    lines.append("# config: " + json.dumps(config.as_dict(), sort_keys=True, separators=(",", ":")))
    return lines


def write_output(text: str, out) -> None:
    """Write ``text`` to ``out`` atomically (temp file + rename), or stdout."""
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    out = Path(out)
    directory = out.parent if str(out.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{out.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header: list[str], columns: list[str], rows) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(line + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


SPECTRUM_COLUMNS = ["lambda_nm", "re_alpha", "im_alpha", "re_beta", "im_beta"]


def read_spectrum_csv(path) -> tuple[HelicitySpectrum, str]:
    """Load a cached spectrum; returns it with its recorded spectrum fingerprint."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read spectrum cache {path}: {exc}") from None
    fp = None
    delay = 0.0
    body = []
    for line in lines:
        if line.startswith("# spectrum_fingerprint:"):
            fp = line.split(":", 1)[1].strip()
        elif line.startswith("# delay_s:"):
            try:
                delay = float(line.split(":", 1)[1])
            except ValueError:
                raise DataError(f"{path}: malformed delay_s header") from None
        elif line and not line.startswith("#"):
            body.append(line)
    if fp is None:
        raise DataError(f"{path}: no spectrum_fingerprint header")
    rows = list(csv.reader(body))
    if not rows or rows[0] != SPECTRUM_COLUMNS:
        raise DataError(f"{path}: expected columns {','.join(SPECTRUM_COLUMNS)}")
    try:
        data = np.array([[float(v) for v in row] for row in rows[1:]])
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    if data.ndim != 2 or data.shape[0] < 2 or data.shape[1] != 5:
        raise DataError(f"{path}: need at least 2 rows of 5 columns")
    try:
        spec = HelicitySpectrum.from_wavelengths(
            data[:, 0], data[:, 1] + 1j * data[:, 2], data[:, 3] + 1j * data[:, 4], fp, delay)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    return spec, fp


# ---------------------------------------------------------------- commands

@dataclass
class Context:
    config: RunConfig
    material_path: Path
    threads: int
    out: str | None
    spectrum_cache: str | None = None
    force: bool = False
    for_purity: bool = False

    @property
    def particle(self) -> Particle:
        return Particle(self.config.radius_nm, load_table(self.material_path))

    @property
    def fingerprint(self) -> str:
        return config_fingerprint(self.config, self.material_path)

    @property
    def spectrum_fingerprint(self) -> str:
        return spectrum_fingerprint(self.config, self.material_path)

    def run_sweep(self, lambda_nm) -> HelicitySpectrum:
        c = self.config
        spec = sweep(c.beam(), c.lens(), self.particle, lambda_nm, c.quadrature(), c.options(),
                     self.threads, self.spectrum_fingerprint)
        power = np.abs(spec.alpha) ** 2 + np.abs(spec.beta) ** 2
        if np.any(power > 1.0 + 1e-9):
            i = int(np.argmax(power))
            raise NumericalDomainError(
                f"passivity violated at lambda = {spec.lambda_nm[i]} nm: |alpha|^2 + |beta|^2 = {power[i]}")
        return spec

    def spectrum_for(self, centres) -> HelicitySpectrum:
        """Cached or freshly swept spectrum able to serve pulses at ``centres``."""
        c = self.config
        if self.spectrum_cache is None:
            spec = self.run_sweep(c.purity_lambda_grid(centres))
            check_resolution(spec, c.sigma)
            return spec
        spec, fp = read_spectrum_csv(self.spectrum_cache)
        if fp != self.spectrum_fingerprint and not self.force:
            raise DataError(
                f"spectrum cache fingerprint {fp} does not match configuration fingerprint "
                f"{self.spectrum_fingerprint} (use --force to override)")
        lo, hi = required_lambda_range(centres, c.sigma, c.freq_window_sigmas, margin=0.0)
        have = spec.lambda_nm.min(), spec.lambda_nm.max()
        if lo < have[0] or hi > have[1]:
            raise DataError(f"spectrum cache covers [{have[0]}, {have[1]}] nm but the pulses need "
                            f"[{lo:.3f}, {hi:.3f}] nm")
        try:
            check_resolution(spec, c.sigma)
        except ValueError as exc:
            raise DataError(f"spectrum cache: {exc}") from None
        return spec


def run_spectrum(ctx: Context) -> int:
    c = ctx.config
    grid = c.purity_lambda_grid(c.lambda_in_nm) if ctx.for_purity else c.lambda_grid()
    spec = ctx.run_sweep(grid)
    order = np.argsort(spec.lambda_nm)
    rows = [(spec.lambda_nm[i], spec.alpha[i].real, spec.alpha[i].imag, spec.beta[i].real,
             spec.beta[i].imag) for i in order]
    header = _header("spectrum", c, ctx.fingerprint,
                     [f"spectrum_fingerprint: {ctx.spectrum_fingerprint}",
                      f"delay_s: {fmt(spec.delay)}",
                      "alpha, beta: dimensionless channel amplitudes (unit-power modes)"])
    write_output(_csv(header, SPECTRUM_COLUMNS, rows), ctx.out)
    return EXIT_OK


def run_xsec(ctx: Context) -> int:
    c = ctx.config
    particle = ctx.particle
    rows = []
    for lam in c.lambda_grid():
        omega = float(omega_from_wavelength(lam))
        mie = mie_set(omega, particle)
        focus = focus_coefficients(c.beam(), c.lens(), omega, mie.nmax, c.quad_theta, c.focal_phase)
        cs = cross_section(mie, focus)
        a2, b3 = cs.term("a", 2), cs.term("b", 3)
        rows.append((lam, cs.total, a2, b3, cs.total - a2 - b3))
    header = _header("xsec", c, ctx.fingerprint,
                     ["sigma: 2 pi / k^2 sum |C_n|^2 (|a_n|^2 + |b_n|^2), dimensionless for a "
                      "unit-power beam (2 pi times the scattered power fraction)"])
    write_output(_csv(header, ["lambda_nm", "sigma_total", "sigma_a2", "sigma_b3", "sigma_rest"],
                      rows), ctx.out)
    return EXIT_OK


def run_purity(ctx: Context) -> int:
    c = ctx.config
    spec = ctx.spectrum_for(c.lambda_in_nm)
    rows = purity_spectrum(spec, c.sigma, c.lambda_in_nm, c.freq_grid_points, c.freq_window_sigmas,
                           ctx.threads)
    header = _header("purity", c, ctx.fingerprint,
                     [f"spectrum_fingerprint: {ctx.spectrum_fingerprint}",
                      "purity: 1 - Tr rho^2; tau in s; shifts sigma^2 F in rad/s"])
    columns = ["lambda_in_nm", "purity_exact", "purity_approx", "tau_psi_s", "tau_chi_s",
               "shift_psi_rads", "shift_chi_rads"]
    write_output(_csv(header, columns, rows), ctx.out)
    return EXIT_OK


def _rho_document(rho, extra: dict) -> str:
    doc = {
        "basis": list(rho.basis),
        "re": [[float(v) for v in row] for row in rho.entries.real],
        "im": [[float(v) for v in row] for row in rho.entries.imag],
        "purity": purity(rho),
    }
    doc.update(extra)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def run_rho(ctx: Context) -> int:
    c = ctx.config
    spec = ctx.spectrum_for([c.rho_lambda_nm])
    sa = SpectralAmplitude(float(omega_from_wavelength(c.rho_lambda_nm)), c.sigma)
    grid = frequency_grid(sa, c.freq_grid_points, c.freq_window_sigmas)
    rho = density_matrix(channel_weights(c.rho_input, spec, sa, grid)).check()
    write_output(_rho_document(rho, {"fingerprint": ctx.fingerprint, "input": c.rho_input,
                                     "lambda_in_nm": c.rho_lambda_nm}), ctx.out)
    return EXIT_OK


def run_lorentzian_demo(ctx: Context) -> int:
    c = ctx.config
    spec = lorentzian_spectrum(c.lorentz_omega_l, c.lorentz_gamma, c.lorentz_beta)
    sa = SpectralAmplitude(c.lorentz_omega_l, c.sigma)
    grid = frequency_grid(sa, c.demo_grid_points, c.freq_window_sigmas)
    rho = density_matrix(channel_weights(BasisLabel.PSI_PLUS, spec, sa, grid)).check()
    params = quasi_mono_params(spec, sa)
    block = rho.block()
    lines = [
        f"# helscat {__version__} lorentzian-demo",
        f"# fingerprint: {ctx.fingerprint}",
        f"omega_l_rads = {fmt(c.lorentz_omega_l)}",
        f"gamma_rads = {fmt(c.lorentz_gamma)}",
        f"beta = {fmt(c.lorentz_beta)}",
        f"sigma_rads = {fmt(c.sigma)}",
        f"purity_exact = {fmt(purity(rho))}",
        f"purity_approx = {fmt(purity_approx(params))}",
        f"purity_gaussian_overlap = {fmt(purity_gaussian_overlap(params))}",
        f"tau_psi_s = {fmt(params.tau_psi)}",
        f"tau_chi_s = {fmt(params.tau_chi)}",
        "rho block (psi_plus, chi_plus):",
    ]
    for row in block:
        lines.append("  " + "  ".join(f"{fmt(v.real)}{v.imag:+.17g}j" for v in row))
    write_output("\n".join(lines) + "\n", ctx.out)
    return EXIT_OK


COMMANDS = {
    "spectrum": run_spectrum,
    "xsec": run_xsec,
    "purity": run_purity,
    "rho": run_rho,
    "lorentzian-demo": run_lorentzian_demo,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="helscat", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"helscat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                       help="worker threads for sweeps (results do not depend on it)")
        p.add_argument("--spectrum-cache", help="spectrum CSV to reuse instead of sweeping")
        p.add_argument("--force", action="store_true", help="accept a cache with another fingerprint")
        if name == "spectrum":
            p.add_argument("--for-purity", action="store_true",
                           help="sweep the fine grid the purity/rho commands need")
        group = p.add_argument_group("configuration overrides")
        for key in _FIELD_TYPES:
            group.add_argument("--" + key.replace("_", "-"), dest="set_" + key, metavar="VALUE")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k[4:]: v for k, v in vars(args).items() if k.startswith("set_") and v is not None}
    try:
        config = parse_config(args.config, overrides)
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        material_path = resolve_material(config.material)
        ctx = Context(config, material_path, args.threads, args.out, args.spectrum_cache,
                      args.force, getattr(args, "for_purity", False))
        return COMMANDS[args.command](ctx)
    except ConfigError as exc:
        print(f"helscat: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MaterialError, DataError) as exc:
        print(f"helscat: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SweepError as exc:
        code = EXIT_DATA if isinstance(exc.__cause__, MaterialError) else EXIT_NUMERIC
        print(f"helscat: {exc}", file=sys.stderr)
        return code
    except (NullStateError, QuadratureError, NumericalDomainError, DegenerateExpansionError,
            ArithmeticError) as exc:
        print(f"helscat: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
