"""Test signals, WAV ingestion, Gaussian measurement ensembles and noise."""

from __future__ import annotations

import io
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import TooShort, UnknownKind, UnsupportedFormat
from .gabor import Lattice, Window, dgt_adjoint

SIGNAL_KINDS = ("two_chirp", "bumps", "cusp")

# Donoho-Johnstone "Bumps" constants
BUMP_POS = (0.10, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81)
BUMP_HGT = (4.0, 5.0, 3.0, 4.0, 5.0, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2)
BUMP_WTH = (0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005)
CUSP_AT = 0.37


@dataclass(frozen=True, eq=False)
class SignalRecord:
    samples: np.ndarray
    label: str
    field: str  # "R" or "C"
    source: str  # "synthetic" or "wav-file"

    @property
    def L(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True, eq=False)
class MeasurementEnsemble:
    A: np.ndarray
    field: str
    seed: int

    @property
    def K(self) -> int:
        return self.A.shape[0]


def signal_profile(kind: str, L: int) -> np.ndarray:
    t = np.arange(L) / L
    if kind == "bumps":
        x = np.zeros(L)
        for tj, hj, wj in zip(BUMP_POS, BUMP_HGT, BUMP_WTH):
            x += hj * (1.0 + np.abs((t - tj) / wj)) ** -4
        return x
    if kind == "cusp":
        return np.sqrt(np.abs(t - CUSP_AT))
    if kind == "two_chirp":
        return np.cos(np.pi * L * t**2) + np.cos(np.pi * L * t**2 / 3)
    raise UnknownKind(f"unknown signal kind {kind!r}; expected one of {SIGNAL_KINDS}")


def make_signal(kind: str, L: int) -> SignalRecord:
    if L < 8:
        raise ValueError("signal length must be >= 8")
    x = signal_profile(kind, L)
    return SignalRecord(x / np.linalg.norm(x), kind, "R", "synthetic")


def analysis_sparse_signal(lat: Lattice, sparsity: int, seed: int, window: Window | None = None) -> SignalRecord:
    """Complex signal ``Phi^* c`` with ``sparsity`` random complex coefficients.

    The default synthesis window is a seeded complex Gaussian vector, so no
    particular named window is favoured.
    """
    rng = np.random.default_rng(seed)
    if window is None:
        window = Window.from_values(rng.standard_normal(lat.L) + 1j * rng.standard_normal(lat.L), "custom")
    c = np.zeros(lat.P, dtype=complex)
    idx = rng.choice(lat.P, size=sparsity, replace=False)
    c[idx] = rng.standard_normal(sparsity) + 1j * rng.standard_normal(sparsity)
    x = dgt_adjoint(c.reshape(lat.M, lat.N), window, lat)
    return SignalRecord(x / np.linalg.norm(x), f"sparse_complex(s={sparsity},seed={seed})", "C", "synthetic")


def load_wav_segment(path, offset: int = 0, L: int | None = None) -> SignalRecord:
    """Read ``L`` samples of a mono 16-bit PCM WAV file starting at ``offset``."""
    try:
        with wave.open(str(path), "rb") as wf:
            if wf.getcomptype() != "NONE":
                raise UnsupportedFormat(f"{path}: compressed WAV not supported")
            if wf.getnchannels() != 1:
                raise UnsupportedFormat(f"{path}: {wf.getnchannels()} channels, need mono")
            if wf.getsampwidth() != 2:
                raise UnsupportedFormat(f"{path}: {8 * wf.getsampwidth()}-bit samples, need 16-bit PCM")
            total = wf.getnframes()
            raw = wf.readframes(total)
    except (wave.Error, EOFError) as exc:
        raise UnsupportedFormat(f"{path}: {exc}") from exc
    data = np.frombuffer(raw, dtype="<i2")
    if L is None:
        L = data.size - offset
    if offset < 0 or offset + L > data.size:
        raise TooShort(f"{path}: need samples [{offset}, {offset + L}) but file has {data.size}")
    x = data[offset : offset + L].astype(float) / 32768.0
    return SignalRecord(x, Path(path).stem, "R", "wav-file")


def write_wav(path, samples, rate: int = 16000) -> None:
    """Write real samples in [-1, 1) as mono 16-bit PCM (round to nearest)."""
    q = np.clip(np.round(np.asarray(samples, dtype=float) * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(rate)
        wf.writeframes(q.tobytes())


def gaussian_matrix(K: int, L: int, field: str = "R", seed: int = 0) -> MeasurementEnsemble:
    """i.i.d. Gaussian matrix scaled so that ``E||A x||^2 = ||x||^2``."""
    if K < 1 or L < 1:
        raise ValueError(f"matrix dimensions must be positive, got K={K}, L={L}")
    rng = np.random.default_rng(seed)
    if field == "R":
        A = rng.standard_normal((K, L)) / np.sqrt(K)
    elif field == "C":
        A = (rng.standard_normal((K, L)) + 1j * rng.standard_normal((K, L))) / np.sqrt(2 * K)
    else:
        raise UnknownKind(f"field must be 'R' or 'C', got {field!r}")
    return MeasurementEnsemble(A, field, seed)


def add_gaussian_noise(x, sigma: float, seed: int = 0) -> tuple[np.ndarray, float]:
    """Return ``(x + e, ||e||_2)`` with ``E|e_i|^2 = sigma^2``."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    x = np.asarray(x)
    if sigma == 0:
        return x.copy(), 0.0
    rng = np.random.default_rng(seed)
    if np.iscomplexobj(x):
        e = (rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape)) * (sigma / np.sqrt(2))
    else:
        e = rng.standard_normal(x.shape) * sigma
    return x + e, float(np.linalg.norm(e))


def signal_to_csv(x) -> str:
    x = np.asarray(x)
    buf = io.StringIO()
    if np.iscomplexobj(x):
        buf.write("l,re,im\n")
        for l, v in enumerate(x):
            buf.write(f"{l},{float(v.real)!r},{float(v.imag)!r}\n")
    else:
        buf.write("l,value\n")
        for l, v in enumerate(x):
            buf.write(f"{l},{float(v)!r}\n")
    return buf.getvalue()
