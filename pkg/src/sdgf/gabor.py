"""Finite Gabor systems on Z_L: lattices, windows, atoms and the analysis operator.

Coefficients are stored as an ``(M, N)`` complex array, ``c[m, n]`` being the
inner product of the signal with the atom shifted by ``n*a`` samples and
modulated to frequency bin ``m*b``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, NonDivisor, NotAFrame, UnknownKind

WINDOW_KINDS = ("star", "gauss", "hann", "hamming", "itersine", "custom")
CLASSICAL_KINDS = ("gauss", "hann", "hamming", "itersine")


@dataclass(frozen=True)
class Lattice:
    """Separable time-frequency lattice ``(a, b)`` on ``Z_L``."""

    L: int
    a: int
    b: int

    @property
    def N(self) -> int:
        return self.L // self.a

    @property
    def M(self) -> int:
        return self.L // self.b

    @property
    def P(self) -> int:
        return self.M * self.N

    @property
    def redundancy(self) -> float:
        return self.P / self.L


def make_lattice(L: int, a: int, b: int) -> Lattice:
    if min(L, a, b) < 1:
        raise ValueError(f"lattice parameters must be positive, got {(L, a, b)}")
    if L % a or L % b:
        raise NonDivisor(f"a={a} and b={b} must both divide L={L}")
    if a * b >= L:
        raise NotAFrame(f"a*b={a * b} must be < L={L} for a redundant Gabor system")
    return Lattice(L, a, b)


@dataclass(frozen=True, eq=False)
class Window:
    values: np.ndarray
    kind: str = "custom"

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def L(self) -> int:
        return self.values.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    @classmethod
    def from_values(cls, values, kind: str = "custom") -> "Window":
        v = np.asarray(values, dtype=complex)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise ValueError("window must be nonzero")
        return cls(v / nrm, kind)


def window_profile(kind: str, L: int) -> np.ndarray:
    """Un-normalized classical window sampled on ``l = 0..L-1``."""
    l = np.arange(L, dtype=float)
    t = l / L
    if kind == "gauss":
        return np.exp(-np.pi * (l - L / 2) ** 2 / L)
    if kind == "hann":
        return np.sin(np.pi * l / L) ** 2
    if kind == "hamming":
        return 0.54 - 0.46 * np.cos(2 * np.pi * l / L)
    if kind == "itersine":
        return np.sin(0.5 * np.pi * np.cos(np.pi * (t - 0.5)) ** 2)
    raise UnknownKind(f"unknown window kind {kind!r}; expected one of {CLASSICAL_KINDS}")


def make_window(kind: str, L: int) -> Window:
    """Unit-norm classical window of length ``L``.

    The star window is built by :func:`sdgf.zauner.star_window` since it needs
    an eigen-decomposition rather than a closed formula.
    """
    if L < 2:
        raise ValueError("window length must be >= 2")
    return Window.from_values(window_profile(kind, L), kind)


def _check_window(g: Window, lat: Lattice) -> None:
    if g.L != lat.L:
        raise DimensionMismatch(f"window length {g.L} != lattice L={lat.L}")


def gabor_atom(g: Window, lat: Lattice, n: int, m: int) -> np.ndarray:
    """Time-frequency shift ``exp(2 pi i m b l / L) g(l - n a)`` (cyclic)."""
    _check_window(g, lat)
    if not (0 <= n < lat.N and 0 <= m < lat.M):
        raise IndexOutOfRange(f"(n, m)=({n}, {m}) outside [0,{lat.N})x[0,{lat.M})")
    l = np.arange(lat.L)
    phase = np.exp(2j * np.pi * ((m * lat.b * l) % lat.L) / lat.L)
    return phase * np.roll(g.values, n * lat.a)


def _shifted_conj_windows(g: Window, lat: Lattice, ns: np.ndarray) -> np.ndarray:
    idx = (np.arange(lat.L)[None, :] - lat.a * ns[:, None]) % lat.L
    return np.conj(g.values[idx])


def dgt(x, g: Window, lat: Lattice, *, chunk: int = 256) -> np.ndarray:
    """Analysis operator, ``(M, N)`` coefficients.

    For each time shift the windowed signal is folded into ``b`` blocks of
    length ``M`` and transformed with an ``M``-point FFT; this equals reading
    every ``b``-th bin of the length-``L`` DFT.
    """
    x = np.asarray(x)
    _check_window(g, lat)
    if x.shape != (lat.L,):
        raise DimensionMismatch(f"signal shape {x.shape} != ({lat.L},)")
    out = np.empty((lat.M, lat.N), dtype=complex)
    for start in range(0, lat.N, chunk):
        ns = np.arange(start, min(start + chunk, lat.N))
        z = x[None, :] * _shifted_conj_windows(g, lat, ns)
        folded = z.reshape(len(ns), lat.b, lat.M).sum(axis=1)
        out[:, ns] = np.fft.fft(folded, axis=1).T
    return out


def dgt_naive(x, g: Window, lat: Lattice) -> np.ndarray:
    """Direct triple loop over (m, n, l); reference for tests only."""
    x = np.asarray(x, dtype=complex)
    L = lat.L
    out = np.zeros((lat.M, lat.N), dtype=complex)
    for m in range(lat.M):
        for n in range(lat.N):
            acc = 0j
            for l in range(L):
                acc += (
                    x[l]
                    * np.conj(g.values[(l - n * lat.a) % L])
                    * np.exp(-2j * np.pi * ((m * lat.b * l) % L) / L)
                )
            out[m, n] = acc
    return out


def dgt_adjoint(c, g: Window, lat: Lattice, *, chunk: int = 256) -> np.ndarray:
    """Exact adjoint of :func:`dgt`: ``sum_{m,n} c[m, n] * atom(n, m)``."""
    c = np.asarray(c)
    _check_window(g, lat)
    if c.shape != (lat.M, lat.N):
        raise DimensionMismatch(f"coefficient shape {c.shape} != ({lat.M}, {lat.N})")
    x = np.zeros(lat.L, dtype=complex)
    for start in range(0, lat.N, chunk):
        ns = np.arange(start, min(start + chunk, lat.N))
        h = np.fft.ifft(c[:, ns].T, axis=1) * lat.M
        h = np.tile(h, (1, lat.b))
        x += np.sum(h * np.conj(_shifted_conj_windows(g, lat, ns)), axis=0)
    return x


def analysis_matrix(g: Window, lat: Lattice) -> np.ndarray:
    """Dense ``P x L`` matrix of the analysis operator, row ``m*N + n``."""
    eye = np.eye(lat.L)
    cols = [dgt(eye[:, j], g, lat).ravel() for j in range(lat.L)]
    return np.stack(cols, axis=1)


class GaborOperator:
    """Analysis operator with the shifted, conjugated windows precomputed.

    Acts on flat coefficient vectors of length ``P`` (row ``m*N + n``).
    """

    def __init__(self, g: Window, lat: Lattice):
        _check_window(g, lat)
        self.g = g
        self.lat = lat
        self._win = _shifted_conj_windows(g, lat, np.arange(lat.N))

    def apply(self, x) -> np.ndarray:
        lat = self.lat
        z = np.asarray(x)[None, :] * self._win
        folded = z.reshape(lat.N, lat.b, lat.M).sum(axis=1)
        return np.fft.fft(folded, axis=1).T.ravel()

    def adjoint(self, c) -> np.ndarray:
        lat = self.lat
        h = np.fft.ifft(np.asarray(c).reshape(lat.M, lat.N).T, axis=1) * lat.M
        h = np.tile(h, (1, lat.b))
        return np.einsum("nl,nl->l", h, np.conj(self._win))


def analysis_pair(
    g: Window, lat: Lattice, *, dense: bool | None = None
) -> tuple[Callable[[np.ndarray], np.ndarray], Callable[[np.ndarray], np.ndarray]]:
    """Return ``(apply, adjoint)`` acting on flat coefficient vectors.

    Small systems are materialized as a dense matrix, which is much faster
    than the FFT path when ``P * L`` is a few hundred thousand or less.
    """
    if dense is None:
        dense = lat.P * lat.L <= 250_000
    if dense:
        mat = analysis_matrix(g, lat)
        mat_h = mat.conj().T.copy()
        return (lambda x: mat @ x), (lambda c: mat_h @ c)
    op = GaborOperator(g, lat)
    return op.apply, op.adjoint


def operator_norm(
    apply: Callable[[np.ndarray], np.ndarray],
    apply_adjoint: Callable[[np.ndarray], np.ndarray],
    dim: int,
    iters: int = 100,
    seed: int = 0,
    *,
    complex_domain: bool = True,
    rtol: float = 1e-12,
) -> float:
    """Largest singular value by power iteration on ``A^H A``."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(dim)
    if complex_domain:
        x = x + 1j * rng.standard_normal(dim)
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(iters):
        y = apply_adjoint(apply(x))
        if not complex_domain:
            y = y.real
        nrm = np.linalg.norm(y)
        if nrm == 0:
            return 0.0
        new = float(np.sqrt(nrm))
        x = y / nrm
        if abs(new - est) <= rtol * new:
            est = new
            break
        est = new
    return est


def coefficients_to_csv(c: np.ndarray) -> str:
    """Debug dump with header ``m,n,re,im``; rows ordered m-major."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "n", "re", "im"])
    M, N = c.shape
    for m in range(M):
        for n in range(N):
            w.writerow([m, n, repr(float(c[m, n].real)), repr(float(c[m, n].imag))])
    return buf.getvalue()
