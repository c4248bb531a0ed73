"""Monte Carlo harness: BER sweeps, per-iteration error curves, Hamming pull-in runs.

Every random draw comes from a stream keyed by
``(master_seed, snr index, trial index, role)`` so that all detectors at a
given (SNR, trial) see the same codeword, channel and noise, and adding a
detector never shifts anyone else's draws.
"""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import __version__
from .channel import ChannelRealization, make_realization, transmit
from .codepoly import CodePolyContext, Trajectory, proximal_iteration
from .detect import (DecoderConfig, DetectResult, mmse_bp, mmse_detect, proximal_decode,
                     tanh_detect)
from .ldpc import (GeneratorMatrix, ParityCheckMatrix, emit_alist, generator_from_parity,
                   hamming_7_4, hard_sign, load_alist, make_regular_ldpc, random_codeword,
                   syndrome)

DETECTORS = ("proximal", "tanh", "mmse", "mmse_bp")
CURVE_DETECTORS = ("proximal", "tanh", "mmse")
_ROLES = {"codeword": 0, "channel": 1, "noise": 2}

SWEEP_COLUMNS = ("detector", "snr_db", "rho", "trials", "total_bits", "bit_errors", "ber",
                 "mean_error_value")
CURVE_COLUMNS = ("detector", "snr_db", "iteration", "mean_error_value")


@dataclass(frozen=True)
class Code:
    H: ParityCheckMatrix
    G: GeneratorMatrix
    digest: str

    @property
    def ctx(self) -> CodePolyContext:
        return _context(self.H)


@lru_cache(maxsize=8)
def _context(H: ParityCheckMatrix) -> CodePolyContext:
    return CodePolyContext(H)


@lru_cache(maxsize=8)
def load_code(source: str) -> Code:
    """Resolve ``hamming``, ``gen:n,wc,wr,seed`` or an alist path to a code."""
    if source == "hamming":
        H = hamming_7_4()
    elif source.startswith("gen:"):
        try:
            n, wc, wr, seed = (int(v) for v in source[4:].split(","))
        except ValueError:
            raise ValueError(f"bad code source {source!r}; expected gen:n,wc,wr,seed") from None
        H = make_regular_ldpc(n, wc, wr, np.random.default_rng(seed))
    else:
        H = load_alist(source)
    digest = hashlib.sha256(emit_alist(H).encode()).hexdigest()[:16]
    return Code(H, generator_from_parity(H), digest)


def trial_rng(master_seed: int, snr_index: int, trial_index: int, role: str) -> np.random.Generator:
    ss = np.random.SeedSequence(master_seed, spawn_key=(snr_index, trial_index, _ROLES[role]))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class ExperimentSpec:
    code_source: str = "gen:204,3,6,1"
    detectors: tuple[str, ...] = DETECTORS
    snr_db_list: tuple[float, ...] = (6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0)
    rho: float = 0.0
    trials: int = 100
    M: int = 102
    N: int = 102
    decoder: DecoderConfig = field(default_factory=DecoderConfig)
    master_seed: int = 2020
    record_trajectory: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        unknown = set(self.detectors) - set(DETECTORS)
        if unknown:
            raise ValueError(f"unknown detectors: {sorted(unknown)}")
        if not self.detectors:
            raise ValueError("no detectors selected")
        if not self.snr_db_list:
            raise ValueError("empty SNR list")

    def code(self) -> Code:
        code = load_code(self.code_source)
        if code.H.n != 2 * self.N:
            raise ValueError(f"code length {code.H.n} does not match 2N = {2 * self.N}")
        return code

    def snr_index(self, snr_db: float) -> int:
        try:
            return list(self.snr_db_list).index(snr_db)
        except ValueError:
            raise ValueError(f"SNR {snr_db} dB is not in the experiment grid") from None

    def as_dict(self) -> dict:
        d = asdict(self)
        d["detectors"] = list(self.detectors)
        d["snr_db_list"] = list(self.snr_db_list)
        return d


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    snr_db: float
    detector: str
    bit_errors: int
    n_bits: int
    error_value: float
    iterations_run: int
    codeword_found: bool


@dataclass
class BerTable:
    rows: list[tuple] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    columns: tuple[str, ...] = SWEEP_COLUMNS

    def lookup(self, detector: str, snr_db: float) -> dict:
        for row in self.rows:
            if row[0] == detector and row[1] == snr_db:
                return dict(zip(self.columns, row))
        raise KeyError((detector, snr_db))

    def ber(self, detector: str, snr_db: float) -> float:
        return self.lookup(detector, snr_db)["ber"]

    def curve(self, detector: str) -> list[tuple[float, float]]:
        return sorted((r[1], r[6]) for r in self.rows if r[0] == detector)


@dataclass
class CurveTable:
    rows: list[tuple] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    columns: tuple[str, ...] = CURVE_COLUMNS

    def series(self, detector: str) -> np.ndarray:
        return np.array([r[3] for r in sorted(self.rows) if r[0] == detector])


def draw_trial(spec: ExperimentSpec, code: Code, snr_index: int, trial_index: int):
    """Transmitted word, channel realisation and received vector for one trial."""
    snr_db = spec.snr_db_list[snr_index]
    seed = spec.master_seed
    x = random_codeword(code.G, trial_rng(seed, snr_index, trial_index, "codeword"))
    ch = make_realization(spec.M, spec.N, spec.rho, snr_db,
                          trial_rng(seed, snr_index, trial_index, "channel"))
    y = transmit(ch, x, trial_rng(seed, snr_index, trial_index, "noise"))
    return x, ch, y


def run_detector(detector: str, ch: ChannelRealization, y, code: Code, cfg: DecoderConfig,
                 reference=None) -> DetectResult:
    if detector == "proximal":
        return proximal_decode(ch.A, y, code.H, cfg, omega=ch.omega, sigma_w=ch.sigma_w,
                               reference=reference, ctx=code.ctx)
    if detector == "tanh":
        return tanh_detect(ch.A, y, cfg, omega=ch.omega, reference=reference)
    if detector == "mmse":
        soft = mmse_detect(ch.A, y, ch.sigma_w)
        hard = hard_sign(soft)
        traj = None
        if reference is not None:
            e = float(np.linalg.norm(reference - hard))
            traj = [e] * (cfg.max_iters + 1)
        return DetectResult(soft, hard, 1, None, traj)
    if detector == "mmse_bp":
        return mmse_bp(ch.A, y, ch.sigma_w, code.H, cfg)
    raise ValueError(f"unknown detector {detector!r}")


def _score(detector, snr_db, trial_index, x, res: DetectResult, code: Code) -> TrialRecord:
    errors = int(np.count_nonzero(res.hard != x))
    return TrialRecord(
        trial_index=trial_index,
        snr_db=snr_db,
        detector=detector,
        bit_errors=errors,
        n_bits=x.size,
        error_value=2.0 * math.sqrt(errors),
        iterations_run=res.iterations_run,
        codeword_found=not syndrome(code.H, res.hard < 0).any(),
    )


def run_trial(spec: ExperimentSpec, snr_db: float, detector: str, trial_index: int) -> TrialRecord:
    code = spec.code()
    x, ch, y = draw_trial(spec, code, spec.snr_index(snr_db), trial_index)
    return _score(detector, snr_db, trial_index, x, run_detector(detector, ch, y, code, spec.decoder), code)


def _run_block(spec: ExperimentSpec, snr_index: int, trials: range) -> list[TrialRecord]:
    code = spec.code()
    snr_db = spec.snr_db_list[snr_index]
    out = []
    for t in trials:
        x, ch, y = draw_trial(spec, code, snr_index, t)
        for det in spec.detectors:
            res = run_detector(det, ch, y, code, spec.decoder)
            out.append(_score(det, snr_db, t, x, res, code))
    return out


def _blocks(spec: ExperimentSpec, block: int = 50):
    for si in range(len(spec.snr_db_list)):
        for start in range(0, spec.trials, block):
            yield si, range(start, min(start + block, spec.trials))


def collect_records(spec: ExperimentSpec, workers: int = 1) -> list[TrialRecord]:
    jobs = list(_blocks(spec))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_block, [spec] * len(jobs), *zip(*jobs)))
    else:
        parts = [_run_block(spec, si, trials) for si, trials in jobs]
    records = [r for part in parts for r in part]
    records.sort(key=lambda r: (r.detector, r.snr_db, r.trial_index))
    return records


def _metadata(spec: ExperimentSpec, code: Code, kind: str) -> dict:
    return {
        "kind": kind,
        "artifact_version": __version__,
        "master_seed": spec.master_seed,
        "code_source": spec.code_source,
        "code_hash": code.digest,
        "code_n": code.H.n,
        "code_m": code.H.m,
        "config": spec.as_dict(),
    }


def aggregate(records: list[TrialRecord], rho: float) -> list[tuple]:
    groups: dict[tuple[str, float], list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.detector, r.snr_db), []).append(r)
    rows = []
    for (det, snr), recs in sorted(groups.items()):
        bits = sum(r.n_bits for r in recs)
        errs = sum(r.bit_errors for r in recs)
        mean_ev = math.fsum(r.error_value for r in recs) / len(recs)
        rows.append((det, snr, rho, len(recs), bits, errs, errs / bits, mean_ev))
    return rows


def run_sweep(spec: ExperimentSpec, workers: int = 1) -> BerTable:
    """BER for every detector x SNR pair of ``spec``."""
    code = spec.code()
    records = collect_records(spec, workers)
    return BerTable(aggregate(records, spec.rho), _metadata(spec, code, "sweep"))


def run_error_curve(spec: ExperimentSpec, snr_db: float) -> CurveTable:
    """Mean ``||x - sign(s_k)||`` against iteration k at one SNR, fixed horizon."""
    dets = [d for d in spec.detectors if d in CURVE_DETECTORS]
    if not dets:
        raise ValueError("error curves need at least one of proximal, tanh, mmse")
    code = spec.code()
    si = spec.snr_index(snr_db)
    cfg = replace(spec.decoder, early_stop=False)
    sums = {d: [[] for _ in range(cfg.max_iters + 1)] for d in dets}
    for t in range(spec.trials):
        x, ch, y = draw_trial(spec, code, si, t)
        for d in dets:
            traj = run_detector(d, ch, y, code, cfg, reference=x).trajectory
            # a diverged run keeps its last value for the remaining iterations
            traj = traj + [traj[-1]] * (cfg.max_iters + 1 - len(traj))
            for k, v in enumerate(traj):
                sums[d][k].append(v)
    rows = [(d, snr_db, k, math.fsum(vals) / spec.trials)
            for d in sorted(dets) for k, vals in enumerate(sums[d])]
    meta = _metadata(replace(spec, decoder=cfg), code, "curve")
    return CurveTable(rows, meta)


@dataclass
class PullinResult:
    trajectories: list[Trajectory]
    converged: np.ndarray
    at_codeword: np.ndarray
    at_transmitted: np.ndarray
    final_h: np.ndarray

    @property
    def transmitted_rate(self) -> float:
        return float(np.mean(self.at_transmitted))


def run_hamming_pullin(sigma: float = 0.5, gamma: float = 0.05, trials: int = 6,
                       max_iters: int = 200, master_seed: int = 2020) -> PullinResult:
    """Code-proximal iteration from ``y = 1 + noise`` on the (7,4) Hamming code."""
    code = load_code("hamming")
    ctx = code.ctx
    sent = np.ones(code.H.n)
    trajs, conv, at_cw, at_tx, hs = [], [], [], [], []
    for t in range(trials):
        rng = trial_rng(master_seed, 0, t, "noise")
        y = sent + sigma * rng.standard_normal(code.H.n)
        traj = proximal_iteration(ctx, y, gamma, max_iters)
        final = traj.final
        hard = hard_sign(final)
        trajs.append(traj)
        conv.append(traj.converged)
        at_cw.append(not syndrome(code.H, hard < 0).any())
        at_tx.append(bool(np.all(hard == sent)))
        with np.errstate(over="ignore", invalid="ignore"):
            hs.append(ctx.eval_h(final))
    return PullinResult(trajs, np.array(conv), np.array(at_cw), np.array(at_tx), np.array(hs))


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_csv(table: BerTable | CurveTable, path) -> None:
    """Write ``table`` as CSV plus a ``<path>.meta.json`` sidecar.

    Rows are ordered by detector then SNR (then iteration), so a replayed
    sweep yields a byte-identical CSV; the timestamp lives only in the sidecar.
    """
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(table.columns)
            for row in sorted(table.rows, key=lambda r: (r[0], r[1], r[2])):
                w.writerow([_fmt(v) for v in row])
        meta = dict(table.metadata)
        meta["created"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
        Path(f"{path}.meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True, default=str))
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def snr_at_ber(curve: list[tuple[float, float]], target: float, floor: float) -> float:
    """SNR where a BER curve first crosses ``target``, interpolating log10 BER linearly.

    ``floor`` stands in for zero BER. Returns ``inf`` if the curve never gets
    below the target and the first grid point if it starts below.
    """
    pts = [(s, max(b, floor)) for s, b in sorted(curve)]
    if pts[0][1] < target:
        return pts[0][0]
    for (s0, b0), (s1, b1) in zip(pts, pts[1:]):
        if b0 >= target > b1:
            l0, l1, lt = math.log10(b0), math.log10(b1), math.log10(target)
            return s0 + (s1 - s0) * (l0 - lt) / (l0 - l1)
    return math.inf
