"""Monte Carlo experiment runner.

Sweeps noise levels, generates independent channel uses, runs the selected
detectors on the same instances, and accumulates integer error counters.
Each trial owns a random substream keyed by (seed, sigma index, trial
index), and all statistics are derived from integer counters after the
sweep, so results are bit-identical regardless of how many worker
processes execute the trials.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baseline import detect_baseline, optimal_threshold
from .bounds import SFCountDistribution, asymptotic_bound, ber_lower_bound
from .channel import ChannelParams, SFPattern, sample_instance
from .detector import detect_array, detect_non_sf

DETECTOR_PROPOSED = "proposed"
DETECTOR_BASELINE = "baseline"
DETECTOR_ORACLE = "oracle"

DEFAULT_SIGMAS = tuple(float(s) for s in range(30, 421, 30))

CSV_FIELDS = (
    "sigma", "N", "q", "p0", "p1", "p2", "detector", "trials", "bits",
    "bit_errors", "ber", "sf_loc_trials", "sf_loc_errors", "sf_loc_err_rate",
    "sfrc_bits", "sfrc_errors", "sfrc_ber", "bound_finite",
    "bound_asymptotic", "seed", "elapsed_ms",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a sweep needs; defaults follow the reference experiments."""

    n: int = 128
    q: float = 0.5
    sigma_list: tuple[float, ...] = DEFAULT_SIGMAS
    sf_dist: SFCountDistribution = field(default_factory=lambda: SFCountDistribution(0.5, 0.4, 0.1))
    trials: int = 1000
    detectors: tuple[str, ...] = (DETECTOR_PROPOSED, DETECTOR_BASELINE)
    seed: int = 2024
    out: str | None = None
    oracle_sf: bool = False
    workers: int = 1
    r0: float = 1000.0
    r1: float = 100.0
    rs: float = 250.0

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be at least 1, got {self.trials}")
        if self.n < 2:
            raise ValueError(f"array dimension must be at least 2, got {self.n}")
        if not self.sigma_list or any(s <= 0 for s in self.sigma_list):
            raise ValueError(f"sigma list must be non-empty and positive, got {self.sigma_list}")
        bad = set(self.detectors) - {DETECTOR_PROPOSED, DETECTOR_BASELINE}
        if bad or not self.detectors:
            raise ValueError(f"detectors must be a non-empty subset of "
                             f"{{proposed, baseline}}, got {self.detectors}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")

    def params_at(self, sigma: float) -> ChannelParams:
        return ChannelParams(self.r0, self.r1, self.rs, sigma, self.q)

    def active_detectors(self) -> tuple[str, ...]:
        """Detector labels actually run; the genie replaces the proposed one."""
        return tuple(
            DETECTOR_ORACLE if (d == DETECTOR_PROPOSED and self.oracle_sf) else d
            for d in self.detectors
        )


@dataclass(frozen=True)
class ExperimentRecord:
    """Aggregated counters for one (sigma, detector) cell of a sweep."""

    sigma: float
    n: int
    q: float
    sf_dist: SFCountDistribution
    detector: str
    trials: int
    bits: int
    bit_errors: int
    sf_loc_trials: int
    sf_loc_errors: int
    sfrc_bits: int
    sfrc_errors: int
    bound_finite: float
    bound_asymptotic: float
    seed: int
    elapsed_ms: float

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits if self.bits else float("nan")

    @property
    def sf_loc_err_rate(self) -> float:
        return self.sf_loc_errors / self.sf_loc_trials if self.sf_loc_trials else float("nan")

    @property
    def sfrc_ber(self) -> float:
        return self.sfrc_errors / self.sfrc_bits if self.sfrc_bits else float("nan")


@dataclass(frozen=True)
class SFDiagnostics:
    """Per-trial failure diagnostics against the generation truth."""

    loc_error: bool | None
    sfrc_bits: int
    sfrc_errors: int


def sf_diagnostics(
    x: np.ndarray,
    sf: SFPattern,
    x_hat: np.ndarray,
    declared_locations: tuple[tuple[int, int], ...] | None,
) -> SFDiagnostics:
    """Score one detection against the true failure pattern.

    Localization is correct only when the declared locations equal the true
    ones as sets (an empty declaration matches an empty truth).  The
    row/column bit errors are counted over the union of the *true* failure
    rows and columns, whatever the detector declared there.  Detectors that
    do not declare failures pass None and are not scored on localization.
    """
    loc_error = None
    if declared_locations is not None:
        loc_error = set(declared_locations) != set(sf.pairs)
    if len(sf) == 0:
        return SFDiagnostics(loc_error=loc_error, sfrc_bits=0, sfrc_errors=0)
    mask = np.zeros(x.shape, dtype=bool)
    for (i, j) in sf.pairs:
        mask[i, :] = True
        mask[:, j] = True
    return SFDiagnostics(
        loc_error=loc_error,
        sfrc_bits=int(mask.sum()),
        sfrc_errors=int((x_hat[mask] != x[mask]).sum()),
    )


class _Counters:
    __slots__ = ("bits", "bit_errors", "sf_loc_trials", "sf_loc_errors", "sfrc_bits", "sfrc_errors")

    def __init__(self):
        self.bits = 0
        self.bit_errors = 0
        self.sf_loc_trials = 0
        self.sf_loc_errors = 0
        self.sfrc_bits = 0
        self.sfrc_errors = 0

    def add(self, other: "_Counters") -> None:
        for name in self.__slots__:
            setattr(self, name, getattr(self, name) + getattr(other, name))

    def as_tuple(self):
        return tuple(getattr(self, name) for name in self.__slots__)

    @classmethod
    def from_tuple(cls, values):
        c = cls()
        for name, v in zip(cls.__slots__, values):
            setattr(c, name, v)
        return c


def _run_chunk(cfg: ExperimentConfig, sigma_index: int, start: int, stop: int):
    """Run trials [start, stop) at one noise level; returns counter tuples."""
    sigma = cfg.sigma_list[sigma_index]
    params = cfg.params_at(sigma)
    p = cfg.sf_dist.as_tuple()
    active = cfg.active_detectors()
    threshold = optimal_threshold(params, cfg.sf_dist) if DETECTOR_BASELINE in active else None
    counters = {d: _Counters() for d in active}
    for t in range(start, stop):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=cfg.seed, spawn_key=(sigma_index, t)))
        x, sf, _, y = sample_instance(cfg.n, params, p, rng)
        for d in active:
            if d == DETECTOR_PROPOSED:
                result = detect_array(y, params)
                x_hat = result.x_hat
                declared = result.hypothesis.locations
            elif d == DETECTOR_ORACLE:
                x_hat = detect_non_sf(y, sf.pairs, x, params)
                declared = sf.pairs
            else:
                x_hat = detect_baseline(y, params, cfg.sf_dist, threshold)
                declared = None
            diag = sf_diagnostics(x, sf, x_hat, declared)
            c = counters[d]
            c.bits += x.size
            c.bit_errors += int((x_hat != x).sum())
            if diag.loc_error is not None:
                c.sf_loc_trials += 1
                c.sf_loc_errors += int(diag.loc_error)
            c.sfrc_bits += diag.sfrc_bits
            c.sfrc_errors += diag.sfrc_errors
    return {d: counters[d].as_tuple() for d in active}


def _chunk_ranges(trials: int, workers: int):
    chunk = max(1, -(-trials // (workers * 4)))
    return [(a, min(a + chunk, trials)) for a in range(0, trials, chunk)]


def run_experiment(cfg: ExperimentConfig, timer=time.perf_counter) -> list[ExperimentRecord]:
    """Run the full sweep; one record per (sigma, detector).

    All detectors see the same generated instances at a given sigma.  The
    ``timer`` is injectable so tests can pin the elapsed column.
    """
    records: list[ExperimentRecord] = []
    for sigma_index, sigma in enumerate(cfg.sigma_list):
        t_start = timer()
        active = cfg.active_detectors()
        totals = {d: _Counters() for d in active}
        ranges = _chunk_ranges(cfg.trials, cfg.workers)
        if cfg.workers > 1 and len(ranges) > 1:
            with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
                futures = [pool.submit(_run_chunk, cfg, sigma_index, a, b) for a, b in ranges]
                results = [f.result() for f in futures]
        else:
            results = [_run_chunk(cfg, sigma_index, a, b) for a, b in ranges]
        for chunk_result in results:
            for d, values in chunk_result.items():
                totals[d].add(_Counters.from_tuple(values))
        elapsed_ms = (timer() - t_start) * 1000.0
        params = cfg.params_at(sigma)
        fin = ber_lower_bound(cfg.n, cfg.sf_dist, params)
        asym = asymptotic_bound(cfg.sf_dist, params)
        for d in active:
            c = totals[d]
            records.append(ExperimentRecord(
                sigma=sigma, n=cfg.n, q=cfg.q, sf_dist=cfg.sf_dist, detector=d,
                trials=cfg.trials, bits=c.bits, bit_errors=c.bit_errors,
                sf_loc_trials=c.sf_loc_trials, sf_loc_errors=c.sf_loc_errors,
                sfrc_bits=c.sfrc_bits, sfrc_errors=c.sfrc_errors,
                bound_finite=fin, bound_asymptotic=asym, seed=cfg.seed,
                elapsed_ms=elapsed_ms,
            ))
    return records


# ---------------------------------------------------------------------------
# CSV persistence.  Numbers are written in full-precision decimal (shortest
# round-trip repr for floats), one row per (sigma, detector).
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_results(records: list[ExperimentRecord], path: str) -> None:
    """Write records as CSV with the fixed header; bit-exact given counters."""
    lines = [",".join(CSV_FIELDS)]
    for r in records:
        p = r.sf_dist
        row = (
            r.sigma, r.n, r.q, p.p0, p.p1, p.p2, r.detector, r.trials, r.bits,
            r.bit_errors, r.ber, r.sf_loc_trials, r.sf_loc_errors,
            r.sf_loc_err_rate, r.sfrc_bits, r.sfrc_errors, r.sfrc_ber,
            r.bound_finite, r.bound_asymptotic, r.seed, r.elapsed_ms,
        )
        lines.append(",".join(_fmt(v) for v in row))
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as err:
        raise OSError(f"cannot write results to {path!r}: {err}") from err


def read_results(path: str) -> list[ExperimentRecord]:
    """Parse a results CSV back into records (inverse of write_results)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln]
    except OSError as err:
        raise OSError(f"cannot read results from {path!r}: {err}") from err
    if not lines or lines[0] != ",".join(CSV_FIELDS):
        raise ValueError(f"unrecognized results header in {path!r}")
    records = []
    for ln in lines[1:]:
        v = dict(zip(CSV_FIELDS, ln.split(",")))
        records.append(ExperimentRecord(
            sigma=float(v["sigma"]), n=int(v["N"]), q=float(v["q"]),
            sf_dist=SFCountDistribution(float(v["p0"]), float(v["p1"]), float(v["p2"])),
            detector=v["detector"], trials=int(v["trials"]), bits=int(v["bits"]),
            bit_errors=int(v["bit_errors"]), sf_loc_trials=int(v["sf_loc_trials"]),
            sf_loc_errors=int(v["sf_loc_errors"]), sfrc_bits=int(v["sfrc_bits"]),
            sfrc_errors=int(v["sfrc_errors"]), bound_finite=float(v["bound_finite"]),
            bound_asymptotic=float(v["bound_asymptotic"]), seed=int(v["seed"]),
            elapsed_ms=float(v["elapsed_ms"]),
        ))
    return records


# ---------------------------------------------------------------------------
# Configuration: flat key=value files, flag values take precedence.
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {
    "n", "q", "sigma", "sf_dist", "trials", "detector", "seed", "out",
    "oracle_sf", "workers", "r0", "r1", "rs",
}


def parse_sigma_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError as err:
        raise ValueError(f"malformed sigma list {text!r}: {err}") from err
    if not values:
        raise ValueError("sigma list is empty")
    return values


def parse_sf_dist(text: str) -> SFCountDistribution:
    parts = [s for s in text.split(",") if s.strip()]
    if len(parts) != 3:
        raise ValueError(f"failure-count distribution needs 3 values, got {text!r}")
    try:
        p0, p1, p2 = (float(s) for s in parts)
    except ValueError as err:
        raise ValueError(f"malformed distribution {text!r}: {err}") from err
    return SFCountDistribution(p0, p1, p2)


def parse_detectors(text: str) -> tuple[str, ...]:
    if text == "both":
        return (DETECTOR_PROPOSED, DETECTOR_BASELINE)
    if text in (DETECTOR_PROPOSED, DETECTOR_BASELINE):
        return (text,)
    raise ValueError(f"detector must be proposed, baseline, or both, got {text!r}")


def load_config_file(path: str) -> dict:
    """Read a flat key=value config file (UTF-8, # comments)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise OSError(f"cannot read config {path!r}: {err}") from err
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = val.strip()
    return values


def build_config(file_values: dict | None = None, **flag_values) -> ExperimentConfig:
    """Merge config-file values with flag overrides into an ExperimentConfig."""
    merged = dict(file_values or {})
    unknown = set(merged) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key, val in flag_values.items():
        if val is not None:
            merged[key] = val
    cfg = ExperimentConfig()
    def _get(key, conv, default):
        if key not in merged:
            return default
        val = merged[key]
        return conv(val) if isinstance(val, str) else val
    def _get_bool(key, default):
        if key not in merged:
            return default
        val = merged[key]
        if isinstance(val, bool):
            return val
        if val.lower() in ("1", "true", "yes"):
            return True
        if val.lower() in ("0", "false", "no"):
            return False
        raise ValueError(f"{key} must be a boolean, got {val!r}")
    return ExperimentConfig(
        n=_get("n", int, cfg.n),
        q=_get("q", float, cfg.q),
        sigma_list=_get("sigma", parse_sigma_list, cfg.sigma_list),
        sf_dist=_get("sf_dist", parse_sf_dist, cfg.sf_dist),
        trials=_get("trials", int, cfg.trials),
        detectors=_get("detector", parse_detectors, cfg.detectors),
        seed=_get("seed", int, cfg.seed),
        out=_get("out", str, cfg.out),
        oracle_sf=_get_bool("oracle_sf", cfg.oracle_sf),
        workers=_get("workers", int, cfg.workers),
        r0=_get("r0", float, cfg.r0),
        r1=_get("r1", float, cfg.r1),
        rs=_get("rs", float, cfg.rs),
    )
