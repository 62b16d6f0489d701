"""
The fixed (6, 2, 4, 3) scenarios on a unitarily reduced channel.

After the receiver rotations the bottom two rows of ``H12`` and the bottom
row of ``H22`` vanish, so R1's antennas 3-4 see no T2 signal and R2's
antenna 3 sees only T1.  Interference terms are named as linear
combinations: ``I_2j(b) = Lc(2, 1, j, b, 1)`` is T1's contribution at
R2's antenna ``j`` in the first slot of block ``b``, and
``I_12(b) = Lc(1, 2, 2, b, 1)`` is T2's contribution at R1's antenna 2.

Shannon variant (7 slots, T2 sends two new symbols in every slot)::

    t=1  T1: u1..u6                 t=4  T1: u'1..u'6
    t=2  T1: ant4 I_23, ant5 I_22    t=5  T1: ant4 I'_23, ant5 I'_22
    t=3  T1: ant4 I_21               t=6  T1: ant4 I'_21, ant5 I_12
    t=7  T1: ant4 I'_12

Delayed-CSIT variant (3 slots): T1 sends u1..u5 and then the same
retransmissions as slots 1-3 above, without ``I_12``.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .model import AntennaConfig, FeedbackSetting, generate_channels, reduce_interference_columns
from .regions import DofPoint
from .scheme import Ds, Lc
from .simulator import (NOISELESS, BlockDecode, Check, DecodeReport, FeedbackView,
                        ReceivedTraces, SimulationMode, _noise, _SolveStats, draw_symbols,
                        reconstruct_other_signal, snap_to_grid, solve_system, symbol_matches)

EXAMPLE_CFG = AntennaConfig(6, 2, 4, 3)
SHANNON_SLOTS = 7
DCSIT_SLOTS = 3


def _first_slot(block: int) -> int:
    return 3 * (block - 1) + 1


def _i2(j, b):
    return Lc(2, 1, j, b, 1)


def _i12(b):
    return Lc(1, 2, 2, b, 1)


def _u(b, i):
    return Ds(1, b, 1, i)


def _v(b, tb, j):
    return Ds(2, b, tb, j)


def _shannon_layout():
    """Per slot: T1 entries and T2 entries as ``(antenna index, key)``."""
    slots = []
    for b in (1, 2):
        slots.append([(k, _u(b, k + 1)) for k in range(6)])
        slots.append([(3, _i2(3, b)), (4, _i2(2, b))])
        third = [(3, _i2(1, b))]
        if b == 2:
            third.append((4, _i12(1)))
        slots.append(third)
    slots.append([(3, _i12(2))])
    tx2 = []
    for t in range(1, SHANNON_SLOTS + 1):
        b, tb = (t - 1) // 3 + 1, (t - 1) % 3 + 1
        tx2.append([(0, _v(b, tb, 1)), (1, _v(b, tb, 2))])
    return slots, tx2


def _dcsit_layout():
    slots = [[(k, _u(1, k + 1)) for k in range(5)],
             [(3, _i2(3, 1)), (4, _i2(2, 1))],
             [(3, _i2(1, 1))]]
    tx2 = [[(0, _v(1, tb, 1)), (1, _v(1, tb, 2))] for tb in (1, 2, 3)]
    return slots, tx2


class _ExplicitRun:
    """Transmit side of a hand-laid-out scenario."""

    def __init__(self, layout, seed, mode, feedback, slots):
        base = generate_channels(EXAMPLE_CFG, slots, seed)
        self.reduced = reduce_interference_columns(base, EXAMPLE_CFG)
        self.ch = self.reduced.transformed()
        self.mode = mode
        self.feedback = feedback
        self.tx1_layout, self.tx2_layout = layout
        self.S = slots
        cfg = EXAMPLE_CFG
        self.x = {1: np.zeros((slots, cfg.m1), complex), 2: np.zeros((slots, cfg.m2), complex)}
        self.g = {1: np.zeros((slots, cfg.m1)), 2: np.zeros((slots, cfg.m2))}
        self.y = {1: np.zeros((slots, cfg.n1), complex), 2: np.zeros((slots, cfg.n2), complex)}
        self.w = dict(zip((1, 2), _noise(seed, slots, cfg.n1, cfg.n2, mode)))
        keys = [key for layout_ in (self.tx1_layout, self.tx2_layout)
                for entries in layout_ for _, key in entries if isinstance(key, Ds)]
        self.truth = draw_symbols(sorted(keys), seed)
        self.t1_values = {}
        self.recover_error = 0.0
        self.t1_stats = _SolveStats()

    def _gain(self, key, active):
        if not self.mode.noisy:
            return 1.0
        base = np.sqrt(self.mode.power / active)
        if isinstance(key, Ds):
            return base
        src = _first_slot(key.block)
        row = self.ch.at(key.rx, key.tx, src)[key.antenna - 1]
        return base / np.sqrt(np.sum(np.abs(row) ** 2 * self.g[key.tx][src - 1] ** 2))

    def _t1_lc(self, view, key):
        src = _first_slot(key.block)
        row = view.channel(key.rx, key.tx, src)[key.antenna - 1]
        if key.tx == 1:
            return row @ self.x[1][src - 1]
        cols = np.array([k for k, _ in self.tx2_layout[src - 1]], dtype=int)
        s = reconstruct_other_signal(view, src, self.x[1][src - 1], cols,
                                     self.g[2][src - 1], self.t1_stats)
        truth = np.array([self.truth[k] for _, k in self.tx2_layout[src - 1]])
        self.recover_error = max(self.recover_error, float(np.abs(s - truth).max()))
        if not self.mode.noisy:
            s = snap_to_grid(s)
        x2 = np.zeros(EXAMPLE_CFG.m2, complex)
        x2[cols] = s * self.g[2][src - 1][cols]
        return row @ x2

    def transmit(self):
        for t in range(1, self.S + 1):
            for tx, layout in ((1, self.tx1_layout), (2, self.tx2_layout)):
                view = FeedbackView(self.feedback, tx, self.ch, self.y, t)
                entries = layout[t - 1]
                for k, key in entries:
                    self.g[tx][t - 1, k] = self._gain(key, len(entries))
                for k, key in entries:
                    if isinstance(key, Ds):
                        value = self.truth[key]
                    else:
                        value = self._t1_lc(view, key)
                        self.t1_values[key] = value
                    self.x[tx][t - 1, k] = self.g[tx][t - 1, k] * value
            for rx in (1, 2):
                self.y[rx][t - 1] = (self.ch.at(rx, 1, t) @ self.x[1][t - 1]
                                     + self.ch.at(rx, 2, t) @ self.x[2][t - 1]
                                     + self.w[rx][t - 1])

    def lc_truth(self):
        out = {}
        for layout in (self.tx1_layout,):
            for entries in layout:
                for _, key in entries:
                    if isinstance(key, Lc):
                        src = _first_slot(key.block)
                        out[key] = self.ch.at(key.rx, key.tx, src)[key.antenna - 1] @ \
                            self.x[key.tx][src - 1]
        return out

    # helpers for receivers
    def col(self, rx, tx, t, k):
        return self.ch.at(rx, tx, t)[:, k] * self.g[tx][t - 1, k]

    def traces(self):
        return ReceivedTraces(self.x[1], self.x[2], self.y[1], self.y[2],
                              self.w[1], self.w[2], self.truth)


def _v_cols(run, rx, t):
    return [run.col(rx, 2, t, 0), run.col(rx, 2, t, 1)]


def _decode_r2_block(run, b, est, stats):
    """R2's decoding of block ``b`` (slots 3b-2 .. 3b)."""
    t0 = _first_slot(b)
    y = run.y[2]
    est[_i2(3, b)] = y[t0 - 1][2]
    # slot 2: peel I_23, solve I_22 and two new symbols
    t = t0 + 1
    z = y[t - 1] - run.col(2, 1, t, 3) * est[_i2(3, b)]
    s = solve_system(np.stack([run.col(2, 1, t, 4)] + _v_cols(run, 2, t), axis=1), z, t,
                     "R2 slot-2 inversion", stats)
    est[_i2(2, b)], est[_v(b, 2, 1)], est[_v(b, 2, 2)] = s
    # slot 3: peel I_12 of the previous block if present
    t = t0 + 2
    z = y[t - 1].copy()
    if b == 2:
        z -= run.col(2, 1, t, 4) * est["R2:" + str(_i12(1))]
    s = solve_system(np.stack([run.col(2, 1, t, 3)] + _v_cols(run, 2, t), axis=1), z, t,
                     "R2 slot-3 inversion", stats)
    est[_i2(1, b)], est[_v(b, 3, 1)], est[_v(b, 3, 2)] = s
    # slot 1: strip the now-known interference on antennas 1-2
    lc = y[t0 - 1][:2] - np.array([est[_i2(1, b)], est[_i2(2, b)]])
    a = np.stack(_v_cols(run, 2, t0), axis=1)[:2]
    s = solve_system(a, lc, t0, "R2 slot-1 interference removal", stats)
    est[_v(b, 1, 1)], est[_v(b, 1, 2)] = s
    # R2 rebuilds T2's contribution at R1 antenna 2, needed in the next block
    h12 = run.ch.at(1, 2, t0)[1]
    est["R2:" + str(_i12(b))] = h12 @ (s * run.g[2][t0 - 1])


def _decode_r1_retrans(run, t, keys_cols, est, stats, label):
    """R1's antennas 3-4 carry only T1's retransmissions."""
    a = np.stack([run.col(1, 1, t, k)[2:4] for _, k in keys_cols], axis=1)
    s = solve_system(a, run.y[1][t - 1][2:4], t, label, stats)
    for (key, _), v in zip(keys_cols, s):
        est[key] = v


def _decode_r1_data(run, b, est, stats, count):
    t0 = _first_slot(b)
    h11 = run.ch.at(1, 1, t0)[:, :count] * run.g[1][t0 - 1, :count]
    h21 = run.ch.at(2, 1, t0)[:, :count] * run.g[1][t0 - 1, :count]
    y = run.y[1][t0 - 1]
    if count == 6:
        rows = np.vstack([h11[1:4], h21[0:3]])
        rhs = np.array([y[1] - est[_i12(b)], y[2], y[3],
                        est[_i2(1, b)], est[_i2(2, b)], est[_i2(3, b)]])
    else:
        rows = np.vstack([h11[2:4], h21[0:3]])
        rhs = np.array([y[2], y[3], est[_i2(1, b)], est[_i2(2, b)], est[_i2(3, b)]])
    s = solve_system(rows, rhs, t0, f"R1 {count}x{count} data system", stats)
    for i, v in enumerate(s):
        est[_u(b, i + 1)] = v


def _verdict(name, keys, est, truth, noisy, extra_ok=True, extra=""):
    missing = [k for k in keys if k not in est]
    errors = [abs(est[k] - truth[k]) for k in keys if k in est]
    worst = max(errors, default=0.0)
    ok = not missing and extra_ok and (noisy or all(
        symbol_matches(est[k], truth[k]) for k in keys))
    detail = f"max error {worst:.3g}" + (f"; {extra}" if extra else "")
    if missing:
        detail += f"; missing {[str(m) for m in missing]}"
    return Check(name, bool(ok), detail)


def _finish(run, est, truth, stats, checks, counts_keys, slots):
    noisy = run.mode.noisy
    blocks = []
    for rx, keys in counts_keys.items():
        decoded = {k: est[k] for k in keys}
        ok = noisy or all(symbol_matches(est[k], truth[k]) for k in keys)
        err = max((abs(est[k] - truth[k]) for k in keys), default=0.0)
        blocks.append(BlockDecode(rx, 1, decoded, ok, stats[rx].max_residual,
                                  stats[rx].min_rcond, err))
    counts = {rx: (len(keys) if blk.success else 0)
              for (rx, keys), blk in zip(counts_keys.items(), blocks)}
    errs = [abs(est[k] - truth[k]) ** 2 for keys in counts_keys.values() for k in keys]
    achieved = DofPoint(Fraction(counts[1], slots), Fraction(counts[2], slots))
    return DecodeReport(slots, blocks, counts, achieved, checks, float(np.mean(errs)),
                        noisy, False, run.traces())


def run_example_6243_shannon(seed: int, mode: SimulationMode = NOISELESS,
                             feedback: FeedbackSetting = FeedbackSetting.SHANNON) -> DecodeReport:
    """Seven-slot retrospective alignment on (6, 2, 4, 3): 12 symbols for
    user 1 and 14 for user 2.

    ``feedback_checks`` holds one entry per step P1..P7 of the argument.

    Raises
    ------
    IllConditioned
        A decoding system is numerically singular for this draw.
    """
    run = _ExplicitRun(_shannon_layout(), seed, mode, feedback, SHANNON_SLOTS)
    run.transmit()
    truth = dict(run.truth)
    truth.update(run.lc_truth())
    noisy = mode.noisy
    st = {1: _SolveStats(), 2: _SolveStats()}
    r1, r2 = {}, {}

    _decode_r2_block(run, 1, r2, st[2])
    truth["R2:" + str(_i12(1))] = truth[_i12(1)]
    _decode_r2_block(run, 2, r2, st[2])
    truth["R2:" + str(_i12(2))] = truth[_i12(2)]
    s = solve_system(np.stack([run.col(2, 1, 7, 3)] + _v_cols(run, 2, 7), axis=1),
                     run.y[2][6], 7, "R2 slot-7 inversion", st[2])
    r2[_i12(2)], r2[_v(3, 1, 1)], r2[_v(3, 1, 2)] = s

    for b in (1, 2):
        t0 = _first_slot(b)
        _decode_r1_retrans(run, t0 + 1, [(_i2(3, b), 3), (_i2(2, b), 4)], r1, st[1],
                           "R1 antennas 3-4, slot 2 of block")
        third = [(_i2(1, b), 3)] + ([(_i12(1), 4)] if b == 2 else [])
        _decode_r1_retrans(run, t0 + 2, third, r1, st[1], "R1 antennas 3-4, slot 3 of block")
    _decode_r1_retrans(run, 7, [(_i12(2), 3)], r1, st[1], "R1 antennas 3-4, slot 7")
    for b in (1, 2):
        _decode_r1_data(run, b, r1, st[1], 6)

    t1_keys = [_i2(j, 1) for j in (1, 2, 3)]
    dcsit_ok = _delayed_csi_suffices(run, t1_keys)

    def v(b):
        return [_v(b, tb, j) for tb in (1, 2, 3) for j in (1, 2)]

    checks = [
        _verdict("P1 T1 forms I21, I22, I23 from delayed CSI", t1_keys, run.t1_values, truth,
                 noisy, dcsit_ok, "recomputed under a delayed-CSIT view"),
        _verdict("P2 R2 decodes v1..v6, I22 and I21 by t=3",
                 v(1) + [_i2(2, 1), _i2(1, 1)], r2, truth, noisy),
        _verdict("P3 R1 recovers I22, I23 at t=2 and I21 at t=3", t1_keys, r1, truth, noisy),
        _verdict("P4 R1 decodes u1..u6 once I12 is known",
                 [_u(1, i) for i in range(1, 7)], r1, truth, noisy),
        _verdict("P5 T1 rebuilds X2(1) from feedback and R2 obtains I12",
                 [_i12(1), "R2:" + str(_i12(1))], {**run.t1_values, **r2}, truth, noisy,
                 noisy or run.recover_error < 1e-9, f"X2 recovery error {run.recover_error:.3g}"),
        _verdict("P6 R2 decodes block 2 and the final slot",
                 v(2) + [_i2(2, 2), _i2(1, 2), _v(3, 1, 1), _v(3, 1, 2)], r2, truth, noisy),
        _verdict("P7 R1 recovers I'21, I'22, I'23, I'12 and decodes u'1..u'6",
                 [_i2(j, 2) for j in (1, 2, 3)] + [_i12(2)] + [_u(2, i) for i in range(1, 7)],
                 r1, truth, noisy),
    ]
    counts_keys = {1: [_u(b, i) for b in (1, 2) for i in range(1, 7)],
                   2: v(1) + v(2) + [_v(3, 1, 1), _v(3, 1, 2)]}
    return _finish(run, {**r1, **r2}, truth, st, checks, counts_keys, SHANNON_SLOTS)


def _delayed_csi_suffices(run, keys) -> bool:
    """Recompute T1's retransmitted R2 interference through a view that
    only grants delayed CSI."""
    for key in keys:
        t = _first_slot(key.block) + 1
        view = FeedbackView(FeedbackSetting.DELAYED_CSIT, 1, run.ch, run.y, t)
        value = view.channel(2, 1, _first_slot(key.block))[key.antenna - 1] @ \
            run.x[1][_first_slot(key.block) - 1]
        if not abs(value - run.t1_values[key]) <= 1e-12 * max(1.0, abs(value)):
            return False
    return True


def run_example_6243_dcsit(seed: int, mode: SimulationMode = NOISELESS) -> DecodeReport:
    """Three-slot delayed-CSIT baseline on (6, 2, 4, 3): 5 symbols for user
    1 and 6 for user 2.  T1 runs under a delayed-CSIT view, so any use of
    output feedback would raise."""
    run = _ExplicitRun(_dcsit_layout(), seed, mode, FeedbackSetting.DELAYED_CSIT, DCSIT_SLOTS)
    run.transmit()
    truth = dict(run.truth)
    truth.update(run.lc_truth())
    noisy = mode.noisy
    st = {1: _SolveStats(), 2: _SolveStats()}
    r1, r2 = {}, {}
    _decode_r2_block(run, 1, r2, st[2])
    _decode_r1_retrans(run, 2, [(_i2(3, 1), 3), (_i2(2, 1), 4)], r1, st[1],
                       "R1 antennas 3-4, slot 2")
    _decode_r1_retrans(run, 3, [(_i2(1, 1), 3)], r1, st[1], "R1 antennas 3-4, slot 3")
    _decode_r1_data(run, 1, r1, st[1], 5)

    i_keys = [_i2(j, 1) for j in (1, 2, 3)]
    v_keys = [_v(1, tb, j) for tb in (1, 2, 3) for j in (1, 2)]
    u_keys = [_u(1, i) for i in range(1, 6)]
    checks = [
        _verdict("T1 forms I21, I22, I23 from delayed CSI", i_keys, run.t1_values, truth, noisy),
        _verdict("R2 decodes v1..v6", v_keys, r2, truth, noisy),
        _verdict("R1 decodes u1..u5 without its first antenna", u_keys, r1, truth, noisy),
    ]
    return _finish(run, {**r2, **r1}, truth, st, checks, {1: u_keys, 2: v_keys}, DCSIT_SLOTS)


def shannon_beats_delayed_csit(seed: int = 1) -> tuple:
    """Achieved user-1 DoF of both scenarios and whether the Shannon one is
    strictly larger."""
    a = run_example_6243_shannon(seed).achieved.d1
    b = run_example_6243_dcsit(seed).achieved.d1
    return a, b, a > b
