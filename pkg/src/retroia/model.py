"""
Channel configuration, feedback settings and Rayleigh channel draws for the
two-user MIMO interference channel.

Random draws use the Philox4x64-10 counter-based generator (as shipped with
numpy) keyed by the 64-bit seed and a stream id.  Uniform doubles are taken
in generator order and mapped to complex Gaussians with Box-Muller, one
uniform pair per complex entry:

    r = sqrt(-2 ln(1 - u1)),  theta = 2 pi u2
    z = (r cos(theta) + 1j r sin(theta)) / sqrt(2)

Per slot, matrices are drawn in the order h11, h12, h21, h22, each in
row-major order.
"""

from __future__ import annotations

import enum
import json
import struct
from dataclasses import dataclass, field

import numpy as np

UINT64_MASK = (1 << 64) - 1

#: Stream ids used with :func:`philox_generator`.
CHANNEL_STREAM = 0
SYMBOL_STREAM = 1
NOISE_STREAM = 2

ZERO_TOL = 1e-10
UNITARY_TOL = 1e-12

_DUMP_MAGIC = b"RIAC"
_DUMP_VERSION = 1
_HEADER = struct.Struct("<4sIIIIIIQ")


class DegenerateChannel(ArithmeticError):
    """A channel draw is numerically rank deficient."""


class FeedbackSetting(enum.Enum):
    """Side information available at the transmitters."""

    SHANNON = "shannon"
    DESIGNABLE_SHANNON = "designable-shannon"
    LIMITED_SHANNON_TYPE1 = "limited-1"
    LIMITED_SHANNON_TYPE2 = "limited-2"
    OUTPUT_FEEDBACK = "output"
    DELAYED_CSIT = "delayed-csit"
    INSTANTANEOUS_CSIT = "icsit"
    INSTANTANEOUS_CSIT_PLUS_OUTPUT = "icsit-op"
    NO_SIDE_INFORMATION = "none"


@dataclass(frozen=True)
class AntennaConfig:
    """Antenna counts ``(M1, M2, N1, N2)`` of transmitters T1, T2 and
    receivers R1, R2."""

    m1: int
    m2: int
    n1: int
    n2: int

    def __post_init__(self):
        for name in ("m1", "m2", "n1", "n2"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise TypeError(f"{name} must be an integer, got {value!r}")
            if value < 1:
                raise ValueError(f"{name} must be >= 1, got {value}")
            object.__setattr__(self, name, int(value))

    @property
    def m1_prime(self) -> int:
        """``min(M1, N1 + N2)``."""
        return min(self.m1, self.n1 + self.n2)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.m1, self.m2, self.n1, self.n2)

    def swapped(self) -> "AntennaConfig":
        """The same channel with the user indices exchanged."""
        return AntennaConfig(self.m2, self.m1, self.n2, self.n1)

    def tx_antennas(self, k: int) -> int:
        return self.m1 if k == 1 else self.m2

    def rx_antennas(self, k: int) -> int:
        return self.n1 if k == 1 else self.n2

    def to_json(self) -> dict:
        return {"m1": self.m1, "m2": self.m2, "n1": self.n1, "n2": self.n2}

    @classmethod
    def from_json(cls, obj: dict) -> "AntennaConfig":
        return cls(obj["m1"], obj["m2"], obj["n1"], obj["n2"])

    @classmethod
    def parse(cls, text: str) -> "AntennaConfig":
        """Parse ``"M1,M2,N1,N2"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected four comma-separated counts, got {text!r}")
        return cls(*(int(p) for p in parts))

    def __str__(self):
        return f"({self.m1},{self.m2},{self.n1},{self.n2})"


def philox_generator(seed: int, stream: int) -> np.random.Generator:
    """Philox4x64-10 generator keyed by ``(seed mod 2**64, stream)``."""
    key = (int(seed) & UINT64_MASK) | (int(stream) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def complex_gaussian(gen: np.random.Generator, count: int) -> np.ndarray:
    """Draw ``count`` i.i.d. CN(0, 1) samples via Box-Muller."""
    u = gen.random(2 * count).reshape(count, 2)
    r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
    theta = 2.0 * np.pi * u[:, 1]
    return (r * np.cos(theta) + 1j * r * np.sin(theta)) / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Channel matrices ``H_ij(t)`` for slots ``1..slots``.

    Each of ``h11, h12, h21, h22`` is an array of shape
    ``(slots, N_i, M_j)``; slot ``t`` is stored at index ``t - 1``.
    """

    slots: int
    h11: np.ndarray
    h12: np.ndarray
    h21: np.ndarray
    h22: np.ndarray
    seed: int = 0

    def __post_init__(self):
        for name in ("h11", "h12", "h21", "h22"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.ndim != 3 or arr.shape[0] != self.slots:
                raise ValueError(f"{name} must have shape (slots, rows, cols)")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.h11.shape[1] != self.h12.shape[1] or self.h21.shape[1] != self.h22.shape[1]:
            raise ValueError("row counts disagree between matrices of one receiver")
        if self.h11.shape[2] != self.h21.shape[2] or self.h12.shape[2] != self.h22.shape[2]:
            raise ValueError("column counts disagree between matrices of one transmitter")

    @property
    def cfg(self) -> AntennaConfig:
        return AntennaConfig(self.h11.shape[2], self.h12.shape[2],
                             self.h11.shape[1], self.h21.shape[1])

    def h(self, rx: int, tx: int) -> np.ndarray:
        """All slots of ``H_{rx,tx}``."""
        return {(1, 1): self.h11, (1, 2): self.h12,
                (2, 1): self.h21, (2, 2): self.h22}[(rx, tx)]

    def at(self, rx: int, tx: int, t: int) -> np.ndarray:
        """``H_{rx,tx}(t)`` for a 1-based slot index."""
        if not 1 <= t <= self.slots:
            raise IndexError(f"slot {t} outside [1, {self.slots}]")
        return self.h(rx, tx)[t - 1]

    def matches(self, cfg: AntennaConfig) -> bool:
        return self.cfg == cfg

    def swapped(self) -> "ChannelRealization":
        """Realization of the user-swapped channel."""
        return ChannelRealization(self.slots, self.h22, self.h21, self.h12,
                                  self.h11, self.seed)

    def replace_slots(self, start: int, other: "ChannelRealization") -> "ChannelRealization":
        """Copy with slots ``start..slots`` taken from ``other``."""
        mats = []
        for rx, tx in ((1, 1), (1, 2), (2, 1), (2, 2)):
            arr = self.h(rx, tx).copy()
            arr[start - 1:] = other.h(rx, tx)[start - 1:self.slots]
            mats.append(arr)
        return ChannelRealization(self.slots, *mats, seed=self.seed)

    def identical_to(self, other: "ChannelRealization") -> bool:
        """Bit-for-bit equality of all entries."""
        return self.slots == other.slots and all(
            self.h(rx, tx).tobytes() == other.h(rx, tx).tobytes()
            for rx, tx in ((1, 1), (1, 2), (2, 1), (2, 2)))

    # -- serialization -------------------------------------------------
    def to_bytes(self) -> bytes:
        """Binary dump.

        Header (little-endian): magic ``b"RIAC"``, uint32 version, uint32
        m1, m2, n1, n2, slots, uint64 seed.  Body: for each slot, matrices
        h11, h12, h21, h22 in row-major order, each entry as two float64
        (real, imaginary).
        """
        cfg = self.cfg
        head = _HEADER.pack(_DUMP_MAGIC, _DUMP_VERSION, cfg.m1, cfg.m2, cfg.n1,
                            cfg.n2, self.slots, int(self.seed) & UINT64_MASK)
        body = []
        for t in range(self.slots):
            for rx, tx in ((1, 1), (1, 2), (2, 1), (2, 2)):
                mat = np.ascontiguousarray(self.h(rx, tx)[t])
                body.append(mat.view(np.float64).astype("<f8").tobytes())
        return head + b"".join(body)

    @classmethod
    def from_bytes(cls, data: bytes) -> "ChannelRealization":
        magic, version, m1, m2, n1, n2, slots, seed = _HEADER.unpack_from(data)
        if magic != _DUMP_MAGIC or version != _DUMP_VERSION:
            raise ValueError("not a channel realization dump")
        shapes = [(n1, m1), (n1, m2), (n2, m1), (n2, m2)]
        per_slot = sum(r * c for r, c in shapes)
        flat = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
        if flat.size != 2 * per_slot * slots:
            raise ValueError("truncated channel realization dump")
        values = flat.astype(np.float64).view(complex).reshape(slots, per_slot)
        mats, offset = [], 0
        for r, c in shapes:
            mats.append(values[:, offset:offset + r * c].reshape(slots, r, c).copy())
            offset += r * c
        return cls(slots, *mats, seed=seed)

    def to_json(self) -> dict:
        def enc(arr):
            return [[[[z.real, z.imag] for z in row] for row in mat] for mat in arr]

        return {"cfg": self.cfg.to_json(), "slots": self.slots, "seed": self.seed,
                "h11": enc(self.h11), "h12": enc(self.h12),
                "h21": enc(self.h21), "h22": enc(self.h22)}

    @classmethod
    def from_json(cls, obj: dict) -> "ChannelRealization":
        def dec(x):
            arr = np.asarray(x, dtype=np.float64)
            return arr[..., 0] + 1j * arr[..., 1]

        return cls(obj["slots"], dec(obj["h11"]), dec(obj["h12"]),
                   dec(obj["h21"]), dec(obj["h22"]), seed=obj["seed"])

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def generate_channels(cfg: AntennaConfig, slots: int, seed: int) -> ChannelRealization:
    """Draw i.i.d. CN(0, 1) channel matrices for ``slots`` slots.

    Parameters
    ----------
    cfg : AntennaConfig
        Antenna counts fixing the matrix shapes.
    slots : int
        Number of slots, at least 1.
    seed : int
        Seed; identical arguments give bit-identical realizations.
    """
    if slots < 1:
        raise ValueError("slots must be >= 1")
    gen = philox_generator(seed, CHANNEL_STREAM)
    shapes = [(cfg.n1, cfg.m1), (cfg.n1, cfg.m2), (cfg.n2, cfg.m1), (cfg.n2, cfg.m2)]
    per_slot = sum(r * c for r, c in shapes)
    draws = complex_gaussian(gen, per_slot * slots).reshape(slots, per_slot)
    mats, offset = [], 0
    for r, c in shapes:
        mats.append(draws[:, offset:offset + r * c].reshape(slots, r, c))
        offset += r * c
    return ChannelRealization(slots, *mats, seed=int(seed))


@dataclass(frozen=True, eq=False)
class ReducedRealization:
    """A realization together with per-slot receiver rotations.

    ``u1[t-1] @ h12(t)`` and ``u2[t-1] @ h22(t)`` have zero rows below the
    first ``M2`` rows.
    """

    base: ChannelRealization
    u1: np.ndarray
    u2: np.ndarray
    trivial: bool = field(default=False)

    def transformed(self) -> ChannelRealization:
        """The realization as seen after each receiver applies its rotation."""
        b = self.base
        return ChannelRealization(
            b.slots,
            self.u1 @ b.h11, self.u1 @ b.h12,
            self.u2 @ b.h21, self.u2 @ b.h22, seed=b.seed)

    def rotate_output(self, rx: int, t: int, y: np.ndarray) -> np.ndarray:
        u = self.u1 if rx == 1 else self.u2
        return u[t - 1] @ y


def _rotation_zeroing(h: np.ndarray) -> np.ndarray:
    """Unitary ``U`` with ``U @ h`` upper trapezoidal (rows below
    ``h.shape[1]`` vanish)."""
    q, r = np.linalg.qr(h, mode="complete")
    diag = np.abs(np.diag(r))
    scale = max(1.0, float(np.abs(h).max()))
    if diag.size and diag.min() <= 1e-12 * scale:
        raise DegenerateChannel("interference matrix is rank deficient")
    return q.conj().T


def reduce_interference_columns(real: ChannelRealization,
                                cfg: AntennaConfig) -> ReducedRealization:
    """Rotate each receiver's coordinates so that T2 reaches only its first
    ``M2`` antennas.

    When ``M2 >= N1`` or ``M2 >= N2`` the reduction is vacuous and identity
    rotations are returned.

    Raises
    ------
    DegenerateChannel
        If a QR factorization reveals a rank deficient ``H_i2(t)`` or the
        result fails the zeroing or unitarity checks.
    """
    if not real.matches(cfg):
        raise ValueError(f"realization shape {real.cfg} does not match {cfg}")
    slots = real.slots
    if not (cfg.m2 < cfg.n1 and cfg.m2 < cfg.n2):
        u1 = np.broadcast_to(np.eye(cfg.n1, dtype=complex), (slots, cfg.n1, cfg.n1)).copy()
        u2 = np.broadcast_to(np.eye(cfg.n2, dtype=complex), (slots, cfg.n2, cfg.n2)).copy()
        return ReducedRealization(real, u1, u2, trivial=True)

    u1 = np.empty((slots, cfg.n1, cfg.n1), dtype=complex)
    u2 = np.empty((slots, cfg.n2, cfg.n2), dtype=complex)
    for t in range(slots):
        for u, h in ((u1, real.h12[t]), (u2, real.h22[t])):
            rot = _rotation_zeroing(h)
            n = rot.shape[0]
            if np.abs(rot @ rot.conj().T - np.eye(n)).max() >= UNITARY_TOL:
                raise DegenerateChannel("rotation failed unitarity check")
            if np.abs((rot @ h)[cfg.m2:]).max(initial=0.0) >= ZERO_TOL:
                raise DegenerateChannel("rotation failed to zero interference rows")
            u[t] = rot
    return ReducedRealization(real, u1, u2)
