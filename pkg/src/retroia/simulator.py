"""
Execution of a transmit schedule over a channel realization.

Transmitters build each slot's signal from a :class:`FeedbackView`, which
exposes only channel matrices and outputs of earlier slots, and only the
ones the feedback setting grants to that transmitter.  Receivers then
decode block by block following the order in which the scheme makes
information available to them.

Data symbols are CN(0, 1) draws rounded to a grid of spacing
``SYMBOL_GRID``.  In noiseless runs a transmitter that recovers the other
transmitter's symbols from feedback makes a hard decision onto that grid,
so the forwarded values do not depend on which feedback route produced
them.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .model import (NOISE_STREAM, SYMBOL_STREAM, AntennaConfig, ChannelRealization,
                    FeedbackSetting, complex_gaussian, generate_channels,
                    philox_generator)
from .regions import DofPoint, format_fraction
from .scheme import (Ds, EntryKind, Lc, SchemeParams, TransmitSchedule,
                     build_schedule, build_set_plan, scheme_config, validate)

SYMBOL_GRID = 2.0 ** -20
RCOND_MIN = 1e-8
DECODE_RTOL = 1e-6


class IllConditioned(ArithmeticError):
    """A decoding system is numerically singular (a measure-zero draw)."""

    def __init__(self, slot, system, rcond):
        super().__init__(f"slot {slot}: {system} has reciprocal condition {rcond:.3g}")
        self.slot = slot
        self.system = system
        self.rcond = rcond


class ScheduleMismatch(ValueError):
    """Schedule, parameters, configuration and channels disagree."""


class FeedbackAccessError(PermissionError):
    """A transmitter asked for information its feedback setting withholds."""


class CausalityError(PermissionError):
    """A transmitter asked for information from the present or the future."""


# -- simulation mode -----------------------------------------------------------

@dataclass(frozen=True)
class SimulationMode:
    """``power=None`` is the noiseless mode; otherwise unit-variance noise is
    added and each transmitter spreads ``power`` equally over its active
    antennas."""

    power: float | None = None

    def __post_init__(self):
        if self.power is not None and not self.power > 0:
            raise ValueError("noisy mode needs a positive power")

    @property
    def noisy(self) -> bool:
        return self.power is not None

    @classmethod
    def parse(cls, text: str) -> "SimulationMode":
        if text == "noiseless":
            return NOISELESS
        kind, _, value = text.partition(":")
        if kind != "noisy" or not value:
            raise ValueError(f"mode must be 'noiseless' or 'noisy:<power>', got {text!r}")
        return cls(float(value))

    def __str__(self):
        return "noiseless" if self.power is None else f"noisy:{self.power:g}"


NOISELESS = SimulationMode()


def Noisy(power: float) -> SimulationMode:
    return SimulationMode(power)


# -- feedback views -----------------------------------------------------------

def _channel_rights(setting: FeedbackSetting, tx: int) -> tuple[set, set, bool]:
    """(visible channels, visible outputs, channels known instantaneously)."""
    fs = FeedbackSetting
    every = {(1, 1), (1, 2), (2, 1), (2, 2)}
    other = 3 - tx
    if setting in (fs.SHANNON, fs.DESIGNABLE_SHANNON):
        return every, {1, 2}, False
    if setting is fs.LIMITED_SHANNON_TYPE1:
        return {(other, tx), (other, other)}, {other}, False
    if setting is fs.LIMITED_SHANNON_TYPE2:
        return every, {tx}, False
    if setting is fs.OUTPUT_FEEDBACK:
        return set(), {1, 2}, False
    if setting is fs.DELAYED_CSIT:
        return every, set(), False
    if setting is fs.INSTANTANEOUS_CSIT:
        return every, set(), True
    if setting is fs.INSTANTANEOUS_CSIT_PLUS_OUTPUT:
        return every, {1, 2}, True
    return set(), set(), False


class FeedbackView:
    """What transmitter ``tx`` may read when forming its slot-``now`` signal."""

    def __init__(self, setting: FeedbackSetting, tx: int, channels: ChannelRealization,
                 outputs: dict, now: int):
        self.setting = setting
        self.tx = tx
        self.now = now
        self._channels = channels
        self._outputs = outputs
        self._h_ok, self._y_ok, self._instant = _channel_rights(setting, tx)

    def channel(self, rx: int, k: int, t: int) -> np.ndarray:
        if (rx, k) not in self._h_ok:
            raise FeedbackAccessError(f"T{self.tx} cannot see H{rx}{k} under {self.setting.value}")
        if t > self.now or (t == self.now and not self._instant):
            raise CausalityError(f"T{self.tx} at slot {self.now} asked for H{rx}{k}({t})")
        return self._channels.at(rx, k, t)

    def output(self, rx: int, t: int) -> np.ndarray:
        if rx not in self._y_ok:
            raise FeedbackAccessError(f"T{self.tx} cannot see Y{rx} under {self.setting.value}")
        if t >= self.now:
            raise CausalityError(f"T{self.tx} at slot {self.now} asked for Y{rx}({t})")
        return self._outputs[rx][t - 1].copy()


# -- numerics ----------------------------------------------------------------------

@dataclass
class _SolveStats:
    max_residual: float = 0.0
    min_rcond: float = 1.0

    def update(self, residual: float, rcond: float):
        self.max_residual = max(self.max_residual, residual)
        self.min_rcond = min(self.min_rcond, rcond)


def solve_system(a: np.ndarray, z: np.ndarray, slot, system: str, stats=None) -> np.ndarray:
    """Least-squares solve of ``a @ s = z`` with a conditioning guard.

    Raises
    ------
    IllConditioned
        If the ratio of extreme singular values of ``a`` is below
        ``RCOND_MIN``.
    """
    if a.shape[1] == 0:
        return np.zeros(0, dtype=complex)
    if a.shape[0] < a.shape[1]:
        raise IllConditioned(slot, system, 0.0)
    sv = np.linalg.svd(a, compute_uv=False)
    rcond = float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0
    if rcond < RCOND_MIN:
        raise IllConditioned(slot, system, rcond)
    s = np.linalg.lstsq(a, z, rcond=None)[0]
    residual = float(np.linalg.norm(a @ s - z) / max(np.linalg.norm(z), 1e-300))
    if stats is not None:
        stats.update(residual, rcond)
    return s


def snap_to_grid(values: np.ndarray) -> np.ndarray:
    return (np.round(values.real / SYMBOL_GRID) * SYMBOL_GRID
            + 1j * np.round(values.imag / SYMBOL_GRID) * SYMBOL_GRID)


def draw_symbols(keys: list, seed: int) -> dict:
    """Grid-rounded CN(0, 1) values for ``keys``, drawn in list order."""
    values = snap_to_grid(complex_gaussian(philox_generator(seed, SYMBOL_STREAM), len(keys)))
    return dict(zip(keys, values))


def symbol_matches(hat: complex, truth: complex) -> bool:
    return abs(hat - truth) <= DECODE_RTOL * max(1.0, abs(truth))


# -- report types ------------------------------------------------------------------

@dataclass
class Check:
    """A named assertion outcome; ``value`` carries the raw measurement and
    is left out of the JSON form."""

    name: str
    passed: bool
    detail: str = ""
    value: float = None


@dataclass
class BlockDecode:
    receiver: int
    block: int
    decoded: dict
    success: bool
    max_residual: float
    min_rcond: float
    max_error: float

    def to_json(self) -> dict:
        return {"receiver": self.receiver, "block": self.block, "success": self.success,
                "max_residual": self.max_residual, "min_rcond": self.min_rcond,
                "max_error": self.max_error,
                "decoded": {str(k): [v.real, v.imag] for k, v in sorted(self.decoded.items())}}


@dataclass
class ReceivedTraces:
    """Per-slot transmit and receive vectors of one run (slot ``t`` at row
    ``t - 1``)."""

    x1: np.ndarray
    x2: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    truth: dict

    def verify(self, channels: ChannelRealization, atol: float = 1e-9) -> bool:
        """Check ``y_i = H_i1 x1 + H_i2 x2 + w_i`` in every slot."""
        for t in range(self.x1.shape[0]):
            for rx, y, w in ((1, self.y1, self.w1), (2, self.y2, self.w2)):
                expect = (channels.h(rx, 1)[t] @ self.x1[t] + channels.h(rx, 2)[t] @ self.x2[t]
                          + w[t])
                if not np.allclose(y[t], expect, rtol=0, atol=atol):
                    return False
        return True

    def transmit_bytes(self) -> bytes:
        return self.x1.tobytes() + self.x2.tobytes()


@dataclass
class DecodeReport:
    total_slots: int
    blocks: list
    symbols_decoded: dict
    achieved: DofPoint
    feedback_checks: list
    mse: float
    noisy: bool
    swapped: bool = False
    traces: ReceivedTraces = field(default=None, repr=False)

    @property
    def all_success(self) -> bool:
        return all(b.success for b in self.blocks) and all(c.passed for c in self.feedback_checks)

    @property
    def max_residual(self) -> float:
        return max((b.max_residual for b in self.blocks), default=0.0)

    @property
    def min_rcond(self) -> float:
        return min((b.min_rcond for b in self.blocks), default=1.0)

    def check(self, name: str) -> Check:
        for c in self.feedback_checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "total_slots": self.total_slots,
            "symbols_decoded": {str(k): v for k, v in self.symbols_decoded.items()},
            "achieved": [format_fraction(self.achieved.d1), format_fraction(self.achieved.d2)],
            "all_success": self.all_success,
            "mse": self.mse,
            "noisy": self.noisy,
            "swapped": self.swapped,
            "max_residual": self.max_residual,
            "min_rcond": self.min_rcond,
            "blocks": [b.to_json() for b in self.blocks],
            "feedback_checks": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                                for c in self.feedback_checks],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def _block_result(receiver, block, decoded, truth, stats, noisy) -> BlockDecode:
    errors = [abs(v - truth[k]) for k, v in decoded.items()]
    max_err = max(errors, default=0.0)
    ok = noisy or all(symbol_matches(v, truth[k]) for k, v in decoded.items())
    return BlockDecode(receiver, block, decoded, ok, stats.max_residual, stats.min_rcond, max_err)


def _mse(blocks: list, truth: dict) -> float:
    errs = [abs(v - truth[k]) ** 2 for b in blocks for k, v in b.decoded.items()]
    return float(np.mean(errs)) if errs else 0.0


def _noise(seed: int, slots: int, n1: int, n2: int, mode: SimulationMode):
    if not mode.noisy:
        return np.zeros((slots, n1), complex), np.zeros((slots, n2), complex)
    draws = complex_gaussian(philox_generator(seed, NOISE_STREAM), slots * (n1 + n2))
    draws = draws.reshape(slots, n1 + n2)
    return draws[:, :n1].copy(), draws[:, n1:].copy()


def reconstruct_other_signal(view: FeedbackView, t: int, own: np.ndarray,
                             cols: np.ndarray, gains: np.ndarray, stats=None) -> np.ndarray:
    """Recover the other transmitter's active symbols of slot ``t`` from
    delayed outputs: ``Y_r(t) - H_r,own X_own(t) = H_r,other X_other(t)``.

    The unpaired receiver's output is tried first, then the paired one.
    """
    me, other = view.tx, 3 - view.tx
    last_error = None
    for rx in (other, me):
        try:
            y = view.output(rx, t)
            h_own = view.channel(rx, me, t)
            h_other = view.channel(rx, other, t)
        except FeedbackAccessError as exc:
            last_error = exc
            continue
        a = h_other[:, cols] * gains[cols]
        return solve_system(a, y - h_own @ own, t, f"T{me} recovers X{other} via Y{rx}", stats)
    raise last_error


# -- generic scheme execution --------------------------------------------------------

class _SchemeRun:
    def __init__(self, schedule, params, cfg, channels, mode, feedback):
        self.schedule = schedule
        self.params = params
        self.cfg = cfg
        self.ch = channels
        self.mode = mode
        self.feedback = feedback
        S = schedule.total_slots
        self.S = S
        self.x = {1: np.zeros((S, cfg.m1), complex), 2: np.zeros((S, cfg.m2), complex)}
        self.g = {1: np.zeros((S, cfg.m1)), 2: np.zeros((S, cfg.m2))}
        self.y = {1: np.zeros((S, cfg.n1), complex), 2: np.zeros((S, cfg.n2), complex)}
        self.w = dict(zip((1, 2), _noise(channels.seed, S, cfg.n1, cfg.n2, mode)))
        keys = [e.symbol for s in schedule.slots for tx in (1, 2)
                for e in s.entries(tx) if e.kind is EntryKind.NEW_DS]
        self.truth = draw_symbols(keys, channels.seed)
        self.recovered = {}
        self.recover_error = 0.0
        self.tx_stats = _SolveStats()

    # transmit side
    def _gains(self, t, tx, entries):
        n = len(entries)
        out = np.zeros(len(entries))
        active = sum(1 for e in entries if e.kind is not EntryKind.ZERO)
        for k, e in enumerate(entries):
            if e.kind is EntryKind.ZERO:
                continue
            if not self.mode.noisy:
                out[k] = 1.0
                continue
            base = np.sqrt(self.mode.power / active)
            if e.kind is EntryKind.RETRANS_LC:
                src = self._slot_of(e.symbol.block, e.symbol.slot)
                row = self.ch.at(e.symbol.rx, e.symbol.tx, src)[e.symbol.antenna - 1]
                sigma = np.sqrt(np.sum(np.abs(row) ** 2 * self.g[e.symbol.tx][src - 1] ** 2))
                out[k] = base / sigma
            else:
                out[k] = base
        assert len(out) == n
        return out

    def _slot_of(self, block, tbar):
        return (block - 1) * self.params.T + tbar

    def _active_cols(self, tx, t):
        return np.array([k for k, e in enumerate(self.schedule.slot(t).entries(tx))
                         if e.kind is not EntryKind.ZERO], dtype=int)

    def _t1_recover(self, view, src):
        if src not in self.recovered:
            cols = self._active_cols(2, src)
            s = reconstruct_other_signal(view, src, self.x[1][src - 1], cols,
                                         self.g[2][src - 1], self.tx_stats)
            entries = self.schedule.slot(src).tx2
            truth = np.array([self.truth[entries[k].symbol] for k in cols])
            if truth.size:
                self.recover_error = max(self.recover_error, float(np.abs(s - truth).max()))
            if not self.mode.noisy:
                s = snap_to_grid(s)
            self.recovered[src] = {entries[k].symbol: v for k, v in zip(cols, s)}
        return self.recovered[src]

    def _value(self, tx, e, view):
        if e.kind is EntryKind.NEW_DS:
            return self.truth[e.symbol]
        if e.kind is EntryKind.RETRANS_DS:
            src = self._slot_of(e.symbol.block, e.symbol.slot)
            return self._t1_recover(view, src)[e.symbol]
        if e.kind is EntryKind.RETRANS_LC:
            sym = e.symbol
            src = self._slot_of(sym.block, sym.slot)
            row = view.channel(sym.rx, sym.tx, src)[sym.antenna - 1]
            return row @ self.x[sym.tx][src - 1]
        return 0.0

    def transmit(self):
        for t in range(1, self.S + 1):
            slot = self.schedule.slot(t)
            for tx in (1, 2):
                view = FeedbackView(self.feedback, tx, self.ch, self.y, t)
                entries = slot.entries(tx)
                gains = self._gains(t, tx, entries)
                self.g[tx][t - 1] = gains
                for k, e in enumerate(entries):
                    self.x[tx][t - 1, k] = gains[k] * self._value(tx, e, view)
            for rx in (1, 2):
                self.y[rx][t - 1] = (self.ch.at(rx, 1, t) @ self.x[1][t - 1]
                                     + self.ch.at(rx, 2, t) @ self.x[2][t - 1]
                                     + self.w[rx][t - 1])

    # receive side
    def _columns(self, rx, t, skip=()):
        """Unknown columns (effective channel, symbol id) for receiver ``rx``
        at slot ``t``; entries whose kind is in ``skip`` are excluded."""
        cols, keys = [], []
        slot = self.schedule.slot(t)
        for tx in (1, 2):
            h = self.ch.at(rx, tx, t)
            for k, e in enumerate(slot.entries(tx)):
                if e.kind is EntryKind.ZERO or e.kind in skip:
                    continue
                cols.append(h[:, k] * self.g[tx][t - 1, k])
                keys.append(e.symbol)
        a = np.stack(cols, axis=1) if cols else np.zeros((h.shape[0], 0), complex)
        return a, keys

    def decode_r2(self):
        P, B, T, t1 = self.params, self.params.B, self.params.T, self.params.t1
        known_lc = {}
        blocks = []
        lc_error = 0.0
        for b in range(1, B + 1):
            stats = _SolveStats()
            u2 = {}
            for tb in range(t1 + 1, T + 1):
                t = self._slot_of(b, tb)
                z = self.y[2][t - 1].copy()
                h21 = self.ch.at(2, 1, t)
                for k, e in enumerate(self.schedule.slot(t).tx1):
                    if e.kind is EntryKind.RETRANS_LC:
                        z -= h21[:, k] * self.g[1][t - 1, k] * known_lc[e.symbol]
                a, keys = self._columns(2, t, skip=(EntryKind.RETRANS_LC,))
                s = solve_system(a, z, t, "R2 Phase-Two inversion", stats)
                u2.update(zip(keys, s))
            # interference seen in Phase One, needed to peel next block's LCs
            for tb in range(1, t1 + 1):
                t = self._slot_of(b, tb)
                x2 = np.array([u2.get(e.symbol, 0.0) if e.kind is EntryKind.NEW_DS else 0.0
                               for e in self.schedule.slot(t).tx2], dtype=complex)
                x2 = x2 * self.g[2][t - 1]
                lc = self.y[2][t - 1] - self.ch.at(2, 2, t) @ x2
                truth = self.ch.at(2, 1, t) @ (self.x[1][t - 1])
                lc_error = max(lc_error, float(np.abs(lc - truth).max()))
                for a_idx in range(self.cfg.n2):
                    known_lc[Lc(2, 1, a_idx + 1, b, tb)] = lc[a_idx]
            decoded = {k: v for k, v in u2.items() if isinstance(k, Ds) and k.user == 2}
            blocks.append(_block_result(2, b, decoded, self.truth, stats, self.mode.noisy))
        return blocks, lc_error

    def decode_r1(self):
        B, T, t1 = self.params.B, self.params.T, self.params.t1
        lc1, lc2 = {}, {}
        blocks = []
        phase_two_stats = {}
        for b in range(1, B + 2):
            stats = _SolveStats()
            values = {}
            for tb in range(t1 + 1, T + 1):
                t = self._slot_of(b, tb)
                a, keys = self._columns(1, t)
                s = solve_system(a, self.y[1][t - 1], t, "R1 Phase-Two inversion", stats)
                values.update(zip(keys, s))
            phase_two_stats[b] = stats
            for key, v in values.items():
                if isinstance(key, Lc):
                    lc2[key] = v
            if b <= B:
                for tb in range(1, t1 + 1):
                    t = self._slot_of(b, tb)
                    x2 = np.array([values[e.symbol] if e.kind is EntryKind.NEW_DS else 0.0
                                   for e in self.schedule.slot(t).tx2], dtype=complex)
                    lc = self.y[1][t - 1] - self.ch.at(1, 2, t) @ (x2 * self.g[2][t - 1])
                    for a_idx in range(self.cfg.n1):
                        lc1[Lc(1, 1, a_idx + 1, b, tb)] = lc[a_idx]
            if b >= 2:
                blocks.append(self._decode_r1_block(b - 1, lc1, lc2, phase_two_stats))
        return blocks

    def _decode_r1_block(self, b, lc1, lc2, phase_two_stats):
        stats = _SolveStats()
        src_stats = [phase_two_stats[b], phase_two_stats[b + 1]]
        decoded = {}
        for tb in range(1, self.params.t1 + 1):
            m1 = self.params.m1[tb - 1]
            if m1 == 0:
                continue
            t = self._slot_of(b, tb)
            g = self.g[1][t - 1, :m1]
            n_req = self.params.n_req(tb, self.cfg)
            rows = [self.ch.at(1, 1, t)[:, :m1] * g]
            rhs = [np.array([lc1[Lc(1, 1, a, b, tb)] for a in range(1, self.cfg.n1 + 1)])]
            if n_req:
                rows.append(self.ch.at(2, 1, t)[:n_req, :m1] * g)
                rhs.append(np.array([lc2[Lc(2, 1, a, b, tb)] for a in range(1, n_req + 1)]))
            s = solve_system(np.vstack(rows), np.concatenate(rhs), t,
                             "R1 stacked Phase-One system", stats)
            for i in range(m1):
                decoded[Ds(1, b, tb, i + 1)] = s[i]
        for st in src_stats:
            stats.update(st.max_residual, st.min_rcond)
        return _block_result(1, b, decoded, self.truth, stats, self.mode.noisy)


def _check_consistency(schedule, params, cfg, channels):
    if schedule.total_slots != params.total_slots:
        raise ScheduleMismatch("schedule length does not match (B + 1) T")
    if channels.slots < params.total_slots:
        raise ScheduleMismatch(f"need {params.total_slots} channel slots, got {channels.slots}")
    if not channels.matches(cfg):
        raise ScheduleMismatch(f"channel shapes {channels.cfg} do not match {cfg}")
    for s in schedule.slots:
        if len(s.tx1) != cfg.m1 or len(s.tx2) != cfg.m2:
            raise ScheduleMismatch(f"slot {s.t} antenna count does not match {cfg}")


def run_scheme(schedule: TransmitSchedule, params: SchemeParams, cfg: AntennaConfig,
               channels: ChannelRealization, mode: SimulationMode = NOISELESS,
               feedback: FeedbackSetting = FeedbackSetting.SHANNON) -> DecodeReport:
    """Run the alignment scheme and decode at both receivers.

    ``cfg`` and ``channels`` are in the caller's user labelling; when
    ``params.swapped`` the scheme runs on the user-swapped channel and
    symbol counts and achieved DoF are reported back in the original
    labelling.  ``schedule`` is always in scheme labelling.

    Raises
    ------
    IllConditioned
        A decoding or reconstruction system is numerically singular.
    ScheduleMismatch
        Inputs have inconsistent shapes or lengths.
    FeedbackAccessError
        The scheme needs information ``feedback`` does not provide.
    """
    run_cfg = scheme_config(cfg, params)
    if not channels.matches(cfg):
        raise ScheduleMismatch(f"channel shapes {channels.cfg} do not match {cfg}")
    run_ch = channels.swapped() if params.swapped else channels
    _check_consistency(schedule, params, run_cfg, run_ch)
    if channels.slots > params.total_slots:
        run_ch = ChannelRealization(params.total_slots,
                                    *(run_ch.h(r, k)[:params.total_slots]
                                      for r, k in ((1, 1), (1, 2), (2, 1), (2, 2))),
                                    seed=run_ch.seed)

    run = _SchemeRun(schedule, params, run_cfg, run_ch, mode, feedback)
    run.transmit()
    r2_blocks, lc_error = run.decode_r2()
    r1_blocks = run.decode_r1()
    blocks = r1_blocks + r2_blocks

    counts = {1: 0, 2: 0}
    for blk in blocks:
        if blk.success:
            counts[blk.receiver] += len(blk.decoded)
    checks = [
        Check("T1 reconstructs Phase-One X2 from feedback",
              mode.noisy or run.recover_error < 1e-9,
              "noisy run, not asserted" if mode.noisy else "max error below 1e-9",
              run.recover_error),
        Check("R2 reconstructs Phase-One interference",
              mode.noisy or lc_error < 1e-9,
              "noisy run, not asserted" if mode.noisy else f"max error {lc_error:.3g}",
              lc_error),
        Check("received signals match the channel model",
              bool(ReceivedTraces(run.x[1], run.x[2], run.y[1], run.y[2], run.w[1], run.w[2],
                                  run.truth).verify(run_ch)),
              "Y = H X + W replayed slot by slot"),
    ]
    achieved = DofPoint(Fraction(counts[1], params.total_slots),
                        Fraction(counts[2], params.total_slots))
    if params.swapped:
        counts = {1: counts[2], 2: counts[1]}
        achieved = achieved.mirrored()
    traces = ReceivedTraces(run.x[1], run.x[2], run.y[1], run.y[2], run.w[1], run.w[2],
                            run.truth)
    return DecodeReport(params.total_slots, blocks, counts, achieved, checks,
                        _mse(blocks, run.truth), mode.noisy, params.swapped, traces)


def simulate(cfg: AntennaConfig, params: SchemeParams, seed: int,
             mode: SimulationMode = NOISELESS,
             feedback: FeedbackSetting = FeedbackSetting.SHANNON) -> DecodeReport:
    """Plan sets and schedule for ``params``, draw channels and run."""
    run_cfg = scheme_config(cfg, params)
    violations = validate(params, run_cfg)
    if violations:
        raise ScheduleMismatch("; ".join(str(v) for v in violations))
    schedule = build_schedule(params, build_set_plan(params, run_cfg), run_cfg)
    channels = generate_channels(cfg, params.total_slots, seed)
    return run_scheme(schedule, params, cfg, channels, mode, feedback)


def decode_success_rate(cfg: AntennaConfig, params: SchemeParams, trials: int,
                        base_seed: int = 0) -> float:
    """Fraction of seeds ``base_seed .. base_seed + trials - 1`` whose
    noiseless run decodes everything without a conditioning failure."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ok = 0
    for seed in range(base_seed, base_seed + trials):
        try:
            report = simulate(cfg, params, seed)
        except IllConditioned:
            continue
        ok += report.all_success
    return ok / trials


def noise_robustness(params: SchemeParams, cfg: AntennaConfig, powers, seed: int) -> list:
    """Mean squared symbol error over all decoded symbols, one per power,
    with channels, symbols and noise draws fixed by ``seed``."""
    return [simulate(cfg, params, seed, Noisy(p)).mse for p in powers]


def trace_csv(schedule: TransmitSchedule, traces: ReceivedTraces) -> str:
    """Per-slot transmit dump with columns slot, block, phase, tx, antenna,
    symbol-id, value_re, value_im."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["slot", "block", "phase", "tx", "antenna", "symbol_id",
                     "value_re", "value_im"])
    for s in schedule.slots:
        for tx, x in ((1, traces.x1), (2, traces.x2)):
            for k, e in enumerate(s.entries(tx)):
                v = x[s.t - 1, k]
                writer.writerow([s.t, s.block, s.phase, tx, k + 1, str(e),
                                 repr(float(v.real)), repr(float(v.imag))])
    return buf.getvalue()
