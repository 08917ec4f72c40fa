"""Sparse RLNC codec and Monte Carlo harness for one destination node.

Each trial draws a fresh generation of n source packets, encodes coded
packets with sparse coding vectors and feeds them through an incremental
Gauss-Jordan decoder. Randomness for trial ``t`` comes from a Philox
stream keyed by the seed with ``t`` in the counter, so any subset of
trials can be replayed on its own.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import DimensionError, NotFullRankError, SrlncError
from .field import FieldSpec, SparseDist, gf
from .linalg import FqMatrix, rank

MODES = ("fixed-m", "stream")


@dataclass(frozen=True)
class SourceGeneration:
    n: int
    L: int
    packets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.packets) != self.n or any(len(p) != self.L for p in self.packets):
            raise DimensionError(f"generation must hold {self.n} packets of length {self.L}")

    @classmethod
    def random(cls, spec: FieldSpec, n: int, L: int, rng: np.random.Generator):
        data = rng.integers(0, spec.q, size=(n, L), dtype=np.int64)
        return cls(n, L, tuple(tuple(r) for r in data.tolist()))


@dataclass(frozen=True)
class CodedPacket:
    coding_vector: tuple[int, ...]
    payload: tuple[int, ...]


def encode_rows(gen: SourceGeneration, coeffs: np.ndarray, spec: FieldSpec) -> list[CodedPacket]:
    """Coded packets for the given (k, n) coefficient array."""
    coeffs = np.asarray(coeffs, dtype=np.int64).reshape(-1, gen.n)
    if gen.L:
        payloads = spec.np_combine(coeffs, np.array(gen.packets, dtype=np.int64).reshape(gen.n, gen.L))
    else:
        payloads = np.zeros((len(coeffs), 0), dtype=np.int64)
    return [CodedPacket(tuple(c), tuple(p)) for c, p in zip(coeffs.tolist(), payloads.tolist())]


def encode(gen: SourceGeneration, dist: SparseDist, rng: np.random.Generator) -> CodedPacket:
    """One coded packet with i.i.d. sparse coefficients."""
    return encode_rows(gen, dist.sample_array(rng, (1, gen.n)), dist.spec)[0]


class DecoderState:
    """Incremental Gauss-Jordan state of one destination.

    Accepted rows are kept fully reduced, so once the rank reaches ``n`` the
    transformed payloads are the source packets (ordered by pivot).
    """

    def __init__(self, spec: FieldSpec, n: int, L: int):
        self.spec = spec
        self.n = n
        self.L = L
        self.pivot_cols: list[int] = []
        self.received_count = 0
        self._rows: list[list[int]] = []  # coding part + payload part

    @property
    def reduced_rows(self) -> list[list[int]]:
        return [r[:self.n] for r in self._rows]

    @property
    def transformed_payloads(self) -> list[list[int]]:
        return [r[self.n:] for r in self._rows]

    @property
    def rank(self) -> int:
        return len(self.pivot_cols)

    def is_complete(self) -> bool:
        return self.rank == self.n

    def insert(self, pkt: CodedPacket) -> bool:
        """Eliminate ``pkt`` against the stored rows; True if it raised the rank."""
        n = self.n
        if len(pkt.coding_vector) != n or len(pkt.payload) != self.L:
            raise DimensionError(
                f"packet shape ({len(pkt.coding_vector)}, {len(pkt.payload)}) "
                f"does not match decoder ({n}, {self.L})"
            )
        self.received_count += 1
        if len(self.pivot_cols) == n:
            return False
        spec = self.spec
        rows = self._rows
        row = list(pkt.coding_vector) + list(pkt.payload)
        for pc, srow in zip(self.pivot_cols, rows):
            c = row[pc]
            if c:
                row = spec.axpy(row, c, srow)
        lead = next((k for k in range(n) if row[k]), None)
        if lead is None:
            return False
        if row[lead] != 1:
            row = spec.scale(row, spec.inv(row[lead]))
        for k, srow in enumerate(rows):
            c = srow[lead]
            if c:
                rows[k] = spec.axpy(srow, c, row)
        rows.append(row)
        self.pivot_cols.append(lead)
        return True


def decoder_insert(state: DecoderState, pkt: CodedPacket) -> tuple[DecoderState, bool]:
    return state, state.insert(pkt)


def recover_sources(state: DecoderState) -> tuple[tuple[int, ...], ...]:
    if state.rank != state.n:
        raise NotFullRankError(f"decoder has rank {state.rank} of {state.n}")
    by_pivot = sorted(zip(state.pivot_cols, state.transformed_payloads))
    return tuple(tuple(p) for _, p in by_pivot)


# Monte Carlo -----------------------------------------------------------------


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent Philox substream for one trial."""
    return np.random.Generator(np.random.Philox(key=seed & (2**64 - 1), counter=[0, 0, trial, 0]))


class TrialStreams:
    """Reusable generator that is rewound to ``trial_rng(seed, t)`` on demand.

    Building a fresh Philox per trial dominates small trials; resetting the
    counter of one instance gives the same streams for a fraction of the cost.
    """

    def __init__(self, seed: int):
        self._bg = np.random.Philox(key=seed & (2**64 - 1))
        self._gen = np.random.Generator(self._bg)
        self._fresh = self._bg.state

    def at(self, trial: int) -> np.random.Generator:
        st = self._fresh
        counter = st["state"]["counter"].copy()
        counter[2] = trial
        self._bg.state = {**st, "state": {"counter": counter, "key": st["state"]["key"]}}
        return self._gen


def _parse_p0(x) -> Fraction:
    return Fraction(str(x)) if isinstance(x, (str, float)) else Fraction(x)


@dataclass
class SimConfig:
    q: int = 2
    n: int = 4
    p0: Fraction = Fraction(1, 2)
    L: int = 4
    mode: str = "fixed-m"
    m: int | None = 6
    N: int | None = None
    eps: Fraction = Fraction(0)
    trials: int = 10_000
    seed: int = 0
    include_zero_vectors: bool = True
    audit_every: int = 1000

    def __post_init__(self):
        self.p0 = _parse_p0(self.p0)
        self.eps = _parse_p0(self.eps)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        gf(self.q)
        if self.n < 1 or self.L < 0 or self.trials < 0:
            raise ValueError("need n >= 1, L >= 0, trials >= 0")
        if not 0 <= self.p0 <= 1:
            raise ValueError("p0 must lie in [0, 1]")
        if not 0 <= self.eps <= 1:
            raise ValueError("eps must lie in [0, 1]")
        if self.mode == "fixed-m":
            if self.m is None or self.m < self.n:
                raise ValueError("fixed-m mode needs m >= n")
        elif self.N is None or self.N < 0:
            raise ValueError("stream mode needs N >= 0")
        if not self.include_zero_vectors and self.p0 == 1:
            raise ValueError("p0 = 1 only produces zero coding vectors")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p0"] = str(self.p0)
        d["eps"] = str(self.eps)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def load(cls, path: str | Path) -> "SimConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class SimReport:
    trials: int
    successes: int
    empirical_success_rate: float
    stderr: float
    transmissions_mean: float | None = None
    transmissions_quantiles: dict | None = None
    audits: int = 0
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    CSV_COLUMNS = ("q", "n", "mode", "m_or_N", "eps", "p0", "trials", "seed", "success_rate", "stderr")

    def csv_row(self) -> dict:
        c = self.config
        return {
            "q": c["q"], "n": c["n"], "mode": c["mode"],
            "m_or_N": c["m"] if c["mode"] == "fixed-m" else c["N"],
            "eps": c["eps"], "p0": c["p0"], "trials": self.trials, "seed": c["seed"],
            "success_rate": repr(self.empirical_success_rate), "stderr": repr(self.stderr),
        }

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.CSV_COLUMNS, lineterminator="\n")
        if header:
            w.writeheader()
        w.writerow(self.csv_row())
        return buf.getvalue()


class RoundTripError(SrlncError):
    """Decoded payloads differ from the source generation."""


class AuditError(SrlncError):
    """Incremental decoder rank disagrees with a batch rank computation."""


def _draw_vectors(dist: SparseDist, rng: np.random.Generator, k: int, n: int, include_zero: bool) -> np.ndarray:
    if include_zero:
        return dist.sample_array(rng, (k, n))
    return dist.sample_nonzero_rows(rng, k, n)


def run_trial(cfg: SimConfig, t: int, spec: FieldSpec | None = None, audit: bool = False,
              streams: TrialStreams | None = None):
    """Run one trial; returns (decoded, transmissions or None)."""
    spec = spec or gf(cfg.q)
    dist = SparseDist(cfg.p0, spec)
    rng = streams.at(t) if streams is not None else trial_rng(cfg.seed, t)
    gen = SourceGeneration.random(spec, cfg.n, cfg.L, rng)
    state = DecoderState(spec, cfg.n, cfg.L)
    received = []
    sent = None
    if cfg.mode == "fixed-m":
        coeffs = _draw_vectors(dist, rng, cfg.m, cfg.n, cfg.include_zero_vectors)
        for pkt in encode_rows(gen, coeffs, spec):
            state.insert(pkt)
            received.append(pkt.coding_vector)
    else:
        N = cfg.N
        coeffs = _draw_vectors(dist, rng, N, cfg.n, cfg.include_zero_vectors)
        lost = rng.random(N) < float(cfg.eps)
        for k, pkt in enumerate(encode_rows(gen, coeffs, spec) if N else []):
            if lost[k]:
                continue
            state.insert(pkt)
            received.append(pkt.coding_vector)
            if state.is_complete():
                sent = k + 1
                break
    if audit and received:
        batch = rank(FqMatrix.from_rows(spec, received, cols=cfg.n))
        if batch != state.rank:
            raise AuditError(f"trial {t}: incremental rank {state.rank}, batch rank {batch}")
    ok = state.is_complete()
    if ok and recover_sources(state) != gen.packets:
        raise RoundTripError(f"trial {t}: decoded payloads differ from the sources")
    return ok, sent


def _run_range(args):
    cfg_dict, lo, hi = args
    cfg = SimConfig.from_dict(cfg_dict)
    spec = gf(cfg.q)
    streams = TrialStreams(cfg.seed)
    successes, sent, audits = 0, [], 0
    for t in range(lo, hi):
        audit = cfg.audit_every > 0 and t % cfg.audit_every == 0
        ok, s = run_trial(cfg, t, spec, audit, streams)
        audits += audit
        successes += ok
        if s is not None:
            sent.append(s)
    return successes, sent, audits


def run_trials(cfg: SimConfig, workers: int = 1) -> SimReport:
    """Run ``cfg.trials`` independent trials; deterministic in ``cfg.seed``."""
    n_trials = cfg.trials
    if workers > 1 and n_trials > 1:
        from concurrent.futures import ProcessPoolExecutor

        step = math.ceil(n_trials / (workers * 4))
        chunks = [(cfg.to_dict(), lo, min(n_trials, lo + step)) for lo in range(0, n_trials, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_range, chunks))
    else:
        parts = [_run_range((cfg.to_dict(), 0, n_trials))]
    successes = sum(p[0] for p in parts)
    sent = [s for p in parts for s in p[1]]
    audits = sum(p[2] for p in parts)
    rate = successes / n_trials if n_trials else 0.0
    stderr = math.sqrt(rate * (1 - rate) / n_trials) if n_trials else 0.0
    mean = quant = None
    if cfg.mode == "stream" and sent:
        arr = np.array(sent, dtype=np.float64)
        mean = float(arr.mean())
        quant = {k: float(np.quantile(arr, float(k))) for k in ("0.5", "0.9", "0.99")}
    return SimReport(n_trials, successes, rate, stderr, mean, quant, audits, cfg.to_dict())
