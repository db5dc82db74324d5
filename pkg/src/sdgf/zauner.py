"""Zauner unitary and its eigenvectors ("star windows").

The unitary is

    U[u, v] = exp(i theta) / sqrt(L) * tau ** E(u, v),
    E(u, v) = beta_inv * (beta * u**2 - 2 * u * v)        (0-based u, v)

with ``beta = L - 1``, ``beta_inv`` its inverse mod L and ``tau = -exp(i pi / L)``.
Exponents are reduced mod 2L in exact integer arithmetic before
exponentiation.

Because the cross term only depends on ``u*v mod L``, ``U x`` is a DFT
followed by an index permutation and a diagonal phase, so it can be applied
in O(L log L) without ever forming the matrix.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    DimensionNotCompliant,
    DimensionTooLargeForDense,
    EigenvectorNotFound,
    NotInvertible,
)
from .gabor import Lattice, Window

log = logging.getLogger(__name__)

DENSE_CAP = 4096
# beta_inv representative; the lift choice is irrelevant for odd L (tau**L == 1)
EXPONENT_CONVENTION = "beta=L-1; beta_inv in [1,L); E reduced mod 2L"


def mod_inverse(beta: int, modulus: int) -> int:
    if modulus < 1:
        raise ValueError("modulus must be positive")
    if modulus == 1:
        return 0
    if math.gcd(beta, modulus) != 1:
        raise NotInvertible(f"{beta} is not invertible modulo {modulus}")
    return pow(beta % modulus, -1, modulus)


def is_squarefree(L: int) -> bool:
    p = 2
    while p * p <= L:
        if L % (p * p) == 0:
            return False
        p += 1
    return True


def validate_dimension(L: int) -> bool:
    """True iff ``L`` is odd, divisible by 3 and square-free."""
    return L >= 1 and L % 2 == 1 and L % 3 == 0 and is_squarefree(L)


@dataclass(frozen=True)
class ZaunerParams:
    L: int
    theta: float = 0.0

    @property
    def beta(self) -> int:
        return self.L - 1

    @property
    def beta_inv(self) -> int:
        return mod_inverse(self.beta, self.L)

    @property
    def tau(self) -> complex:
        return -cmath.exp(1j * math.pi / self.L)


def _tau_power(L: int, E: np.ndarray) -> np.ndarray:
    # tau = exp(i pi (L+1) / L)
    k = ((L + 1) * (np.asarray(E, dtype=np.int64) % (2 * L))) % (2 * L)
    return np.exp(1j * np.pi * k / L)


def exponent_matrix(params: ZaunerParams) -> np.ndarray:
    L, b, bi = params.L, params.beta, params.beta_inv
    u = np.arange(L, dtype=np.int64)[:, None]
    v = np.arange(L, dtype=np.int64)[None, :]
    return (bi * ((b * u * u - 2 * u * v) % (2 * L))) % (2 * L)


def zauner_unitary(params: ZaunerParams, *, cap: int = DENSE_CAP) -> np.ndarray:
    if params.L < 2:
        raise ValueError("L must be >= 2")
    if params.L > cap:
        raise DimensionTooLargeForDense(f"L={params.L} exceeds dense cap {cap}; use apply_zauner")
    pref = cmath.exp(1j * params.theta) / math.sqrt(params.L)
    return pref * _tau_power(params.L, exponent_matrix(params))


class ZaunerOperator:
    """Matrix-free ``x -> U x``."""

    def __init__(self, params: ZaunerParams):
        L = params.L
        self.params = params
        u = np.arange(L, dtype=np.int64)
        bi, b = params.beta_inv, params.beta
        diag_exp = (bi * ((b * (u * u % (2 * L))) % (2 * L))) % (2 * L)
        self._phase = (
            cmath.exp(1j * params.theta) / math.sqrt(L) * _tau_power(L, diag_exp)
        )
        # tau**(-2 beta_inv u v) = exp(-2 pi i (L+1) beta_inv u v / L)
        c = ((L + 1) * bi) % L
        self._perm = (c * u) % L

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.shape != (self.params.L,):
            raise DimensionMismatch(f"vector shape {x.shape} != ({self.params.L},)")
        return self._phase * np.fft.fft(x)[self._perm]


def apply_zauner(params: ZaunerParams, x) -> np.ndarray:
    return ZaunerOperator(params)(x)


@dataclass(frozen=True)
class StarWindow:
    values: np.ndarray
    eigenvalue: complex
    residual: float
    phi: float
    index: int
    theta: float
    method: str

    @property
    def L(self) -> int:
        return self.values.shape[0]

    def as_window(self) -> Window:
        return Window(self.values, "star")


def order3_phase(op: ZaunerOperator) -> float:
    """``arg((U^3)[0, 0])``, read off from ``U^3 e_0``."""
    e0 = np.zeros(op.params.L, dtype=complex)
    e0[0] = 1.0
    return float(np.angle(op(op(op(e0)))[0]))


def reference_phase(params: ZaunerParams) -> float:
    """Phase ``phi`` with ``U^3 = e^{i phi} I``, anchored at ``theta = 0``.

    Taking ``arg`` at ``theta = 0`` and adding ``3 theta`` keeps the labelling
    of the three eigenvalues ``e^{i phi/3} w^k`` continuous in ``theta``.
    """
    return order3_phase(ZaunerOperator(ZaunerParams(params.L, 0.0))) + 3 * params.theta


def spectral_projector(op: ZaunerOperator, phi: float, k: int, x: np.ndarray) -> np.ndarray:
    """Apply ``(1/3) sum_j w^{-kj} (e^{-i phi/3} U)^j`` to ``x``."""
    rot = cmath.exp(-1j * phi / 3)
    w = cmath.exp(2j * math.pi / 3)
    y1 = rot * op(x)
    y2 = rot * op(y1)
    return (x + w ** (-k) * y1 + w ** (-2 * k) * y2) / 3


def _eigenvalue(phi: float, k: int) -> complex:
    return cmath.exp(1j * phi / 3) * cmath.exp(2j * math.pi * k / 3)


def _dense_eigvec(params: ZaunerParams, lam: complex, rng) -> np.ndarray | None:
    U = zauner_unitary(params)
    vals, vecs = np.linalg.eig(U)
    sel = np.abs(vals - lam) < 1e-6
    if not sel.any():
        return None
    q, _ = np.linalg.qr(vecs[:, sel])
    z = rng.standard_normal(q.shape[1]) + 1j * rng.standard_normal(q.shape[1])
    return q @ z


def star_window(
    L: int,
    theta: float = 0.0,
    eigenvalue_index: int = 0,
    seed: int = 0,
    *,
    check_dimension: bool = True,
) -> StarWindow:
    """Unit-norm eigenvector of the Zauner unitary.

    A seeded random vector is pushed through the order-3 spectral projector;
    if the requested eigenspace is missed the dense eigensolver is used
    instead (only possible below the dense cap).
    """
    if check_dimension and not validate_dimension(L):
        raise DimensionNotCompliant(
            f"L={L} violates the star-window hypotheses (L odd, 3 | L, L square-free)"
        )
    if eigenvalue_index not in (0, 1, 2):
        raise ValueError("eigenvalue_index must be 0, 1 or 2")
    params = ZaunerParams(L, theta)
    op = ZaunerOperator(params)
    phi = reference_phase(params)
    lam = _eigenvalue(phi, eigenvalue_index)
    rng = np.random.default_rng(seed)

    def residual(v):
        return float(np.linalg.norm(op(v) - lam * v))

    x = rng.standard_normal(L) + 1j * rng.standard_normal(L)
    x /= np.linalg.norm(x)
    v = spectral_projector(op, phi, eigenvalue_index, x)
    nrm = np.linalg.norm(v)
    method = "projector"
    if nrm >= 1e-6:
        v = v / nrm
        if residual(v) > 1e-8:
            # one refinement pass removes leakage from an inexact order-3 phase
            v = spectral_projector(op, phi, eigenvalue_index, v)
            v /= np.linalg.norm(v)
    if nrm < 1e-6 or residual(v) > 1e-8:
        if L > DENSE_CAP:
            raise EigenvectorNotFound(f"projector failed for L={L} and dense fallback unavailable")
        log.info("projector path failed for L=%d index=%d, using dense eigensolver", L, eigenvalue_index)
        v = _dense_eigvec(params, lam, rng)
        method = "dense"
        if v is None:
            raise EigenvectorNotFound(
                f"eigenvalue index {eigenvalue_index} has an empty eigenspace for L={L}"
            )
        v /= np.linalg.norm(v)
    res = residual(v)
    if res > 1e-8:
        raise EigenvectorNotFound(f"residual {res:.3e} above 1e-8 for L={L}")
    return StarWindow(v, lam, res, phi, eigenvalue_index, theta, method)


def eigenspace_dimensions(L: int, theta: float = 0.0) -> tuple[int, int, int]:
    """Multiplicities of the three eigenvalues ``e^{i phi/3} w^k`` (dense)."""
    params = ZaunerParams(L, theta)
    phi = reference_phase(params)
    vals = np.linalg.eigvals(zauner_unitary(params))
    return tuple(
        int(np.sum(np.abs(vals - _eigenvalue(phi, k)) < 1e-6)) for k in range(3)
    )


def lattice_action(L: int) -> np.ndarray:
    """Integer matrix ``S`` with ``U pi(n, m) U^H ~ pi(S @ (n, m))`` mod L.

    ``pi(n, m)`` is the cyclic shift by ``n`` followed by modulation by ``m``;
    the relation holds up to a unimodular phase.
    """
    return np.array([[0, L - 1], [1, L - 1]], dtype=np.int64)


def symmetry_orbits(lat: Lattice) -> list[tuple[int, ...]]:
    """Orbits of length 3 of the Zauner lattice action, as atom row indices.

    Only orbits lying entirely inside the ``(a, b)`` sublattice are kept.
    Row index of atom ``(n, m)`` is ``m * N + n``.
    """
    L = lat.L
    S = lattice_action(L)
    seen: set[tuple[int, int]] = set()
    orbits = []
    for t in range(0, L, lat.a):
        for f in range(0, L, lat.b):
            if (t, f) in seen:
                continue
            orb = [(t, f)]
            while True:
                nt, nf = (S @ np.array(orb[-1])) % L
                nxt = (int(nt), int(nf))
                if nxt == orb[0]:
                    break
                orb.append(nxt)
            seen.update(orb)
            if len(orb) == 3 and all(p % lat.a == 0 and q % lat.b == 0 for p, q in orb):
                orbits.append(tuple((q // lat.b) * lat.N + p // lat.a for p, q in orb))
    return orbits
