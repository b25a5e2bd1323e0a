"""Rotating-frame generator, algebraic steady state and a time-evolution oracle.

Vectorization is row-major: ``vec(rho)[3*l + j] = rho[l, j]``, i.e. the order
(rho11, rho12, rho13, rho21, rho22, rho23, rho31, rho32, rho33).  With that
ordering ``vec(A @ rho @ B) = kron(A, B.T) @ vec(rho)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import DegenerateSteadyStateError, InvalidConfigError, StiffnessError
from .qmodel import (
    Chirality,
    DecoherenceConfig,
    DensityMatrix,
    DriveConfig,
    signed_couplings,
    transverse_rates,
)

POPULATION_ROWS = (0, 4, 8)
TRACE_ROW = 0
COND_LIMIT = 1e14
RESIDUAL_LIMIT = 1e-10

_EYE3 = np.eye(3)


def vec_index(l: int, j: int) -> int:
    """Position of rho[l, j] (0-based levels) in the vectorized state."""
    return 3 * l + j


@dataclass(frozen=True)
class Generator:
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex).reshape(9, 9)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def apply(self, rho) -> np.ndarray:
        """Time derivative d(rho)/dt as a 3x3 matrix."""
        return (self.matrix @ np.asarray(rho, dtype=complex).reshape(9)).reshape(3, 3)

    @property
    def norm_inf(self) -> float:
        return float(np.max(np.sum(np.abs(self.matrix), axis=1)))


def _hamiltonian_stack(omega21, omega31, omega32, delta, sign):
    """Hamiltonians for an array of omega21 values; shape (*omega21.shape, 3, 3)."""
    o21 = sign * np.asarray(omega21, dtype=complex)
    H = np.zeros(o21.shape + (3, 3), dtype=complex)
    H[..., 2, 2] = delta
    H[..., 1, 0] = o21
    H[..., 2, 0] = sign * omega31
    H[..., 2, 1] = sign * omega32
    H[..., 0, 1] = np.conj(H[..., 1, 0])
    H[..., 0, 2] = np.conj(H[..., 2, 0])
    H[..., 1, 2] = np.conj(H[..., 2, 1])
    return H


def build_hamiltonian(drives: DriveConfig, q: Chirality) -> np.ndarray:
    """H = Delta |3><3| + sum_{l>j} s Omega_lj |l><j| + h.c. (hbar = 1)."""
    o21, o31, o32 = signed_couplings(drives, q)
    H = np.zeros((3, 3), dtype=complex)
    H[2, 2] = drives.delta
    H[1, 0], H[2, 0], H[2, 1] = o21, o31, o32
    H[0, 1], H[0, 2], H[1, 2] = np.conj(o21), np.conj(o31), np.conj(o32)
    return H


def _commutator_superop(H):
    """-i[H, .] for a stack of Hamiltonians, shape (..., 9, 9)."""
    left = np.einsum("...ac,bd->...abcd", H, _EYE3)
    right = np.einsum("ac,...db->...abcd", _EYE3, H)
    shape = H.shape[:-2] + (9, 9)
    return -1j * (left - right).reshape(shape)


def dissipator(dec: DecoherenceConfig) -> np.ndarray:
    """Decoherence superoperator as a real 9x9 matrix.

    Populations: d(rho_jj)/dt = sum_{j'>j} Gamma_{jj'} rho_j'j' - gamma_j rho_jj.
    Coherences:  d(rho_lj)/dt = -G_lj rho_lj.
    """
    D = np.zeros((9, 9))
    g1, g2, g3 = dec.decay_totals
    G21, G31, G32 = transverse_rates(dec)
    for (l, j), rate in (((1, 0), G21), ((2, 0), G31), ((2, 1), G32)):
        D[vec_index(l, j), vec_index(l, j)] = -rate
        D[vec_index(j, l), vec_index(j, l)] = -rate
    p1, p2, p3 = POPULATION_ROWS
    D[p1, p2] += dec.gamma12
    D[p1, p3] += dec.gamma13
    D[p2, p3] += dec.gamma23
    D[p2, p2] -= g2
    D[p3, p3] -= g3
    return D


def build_generator(drives: DriveConfig, dec: DecoherenceConfig, q: Chirality) -> Generator:
    H = build_hamiltonian(drives, q)
    return Generator(_commutator_superop(H) + dissipator(dec))


def generator_stack(omega21, drives: DriveConfig, dec: DecoherenceConfig, q: Chirality):
    """Generators for many omega21 values sharing the rest of ``drives``."""
    H = _hamiltonian_stack(omega21, drives.omega31, drives.omega32, drives.delta, q.sign)
    return _commutator_superop(H) + dissipator(dec)


def _trace_replaced(G):
    A = np.array(G, dtype=complex, copy=True)
    A[..., TRACE_ROW, :] = 0.0
    A[..., TRACE_ROW, list(POPULATION_ROWS)] = 1.0
    return A


def _describe(drives, dec, q):
    return f"drives={drives}, decoherence={dec}, chirality={q}"


def steady_state(drives: DriveConfig, dec: DecoherenceConfig, q: Chirality) -> DensityMatrix:
    """Solve G rho = 0 with tr(rho) = 1 by replacing the rho11 row with the trace row."""
    if dec.is_degenerate:
        raise DegenerateSteadyStateError(
            "no population relaxation: steady state is not unique; " + _describe(drives, dec, q)
        )
    gen = build_generator(drives, dec, q)
    A = _trace_replaced(gen.matrix)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise DegenerateSteadyStateError(
            f"steady-state system ill-conditioned (cond={cond:.3g}); " + _describe(drives, dec, q)
        )
    b = np.zeros(9, dtype=complex)
    b[TRACE_ROW] = 1.0
    x = np.linalg.solve(A, b)
    residual = np.max(np.abs(gen.matrix @ x))
    if residual > RESIDUAL_LIMIT * gen.norm_inf:
        raise DegenerateSteadyStateError(
            f"steady-state residual {residual:.3g} too large; " + _describe(drives, dec, q)
        )
    return DensityMatrix(x.reshape(3, 3))


def steady_state_stack(omega21, drives: DriveConfig, dec: DecoherenceConfig, q: Chirality):
    """Steady states for an array of omega21 values, shape (*omega21.shape, 3, 3).

    Ill-conditioned grid points come back as NaN rather than raising, so a
    sweep can report them.
    """
    if dec.is_degenerate:
        raise DegenerateSteadyStateError(
            "no population relaxation: steady state is not unique; " + _describe(drives, dec, q)
        )
    omega21 = np.asarray(omega21, dtype=complex)
    G = generator_stack(omega21.reshape(-1), drives, dec, q)
    A = _trace_replaced(G)
    b = np.zeros((len(A), 9), dtype=complex)
    b[:, TRACE_ROW] = 1.0
    x = np.linalg.solve(A, b[..., None])[..., 0]
    bad = np.linalg.cond(A) > COND_LIMIT
    x[bad] = np.nan
    return x.reshape(omega21.shape + (3, 3))


def coherence_stack(omega21, drives, dec, q) -> np.ndarray:
    """rho21 of the steady state for each omega21 value."""
    return steady_state_stack(omega21, drives, dec, q)[..., 1, 0]


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.array(
    [
        [0, 0, 0, 0, 0, 0],
        [1 / 5, 0, 0, 0, 0, 0],
        [3 / 40, 9 / 40, 0, 0, 0, 0],
        [44 / 45, -56 / 15, 32 / 9, 0, 0, 0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0],
        [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
    ]
)
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array(
    [5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B5 - _B4


@numba.njit(cache=True)
def _dopri5(G, y0, t_end, atol, rtol, h, hmin, max_steps, A, E):
    n = y0.shape[0]
    y = y0.copy()
    K = np.zeros((7, n), dtype=np.complex128)
    K[0] = G @ y
    ytmp = np.empty(n, dtype=np.complex128)
    t = 0.0
    steps = 0
    while t < t_end:
        if steps >= max_steps:
            return y, t, steps, 2
        if h < hmin:
            return y, t, steps, 1
        last = False
        if t + h >= t_end:
            h = t_end - t
            last = True
        for s in range(1, 7):
            for i in range(n):
                acc = 0.0j
                for r in range(s):
                    acc += A[s, r] * K[r, i]
                ytmp[i] = y[i] + h * acc
            K[s] = G @ ytmp
        # ytmp now holds the 5th-order solution (row 6 of A is b5)
        err = 0.0
        for i in range(n):
            e = 0.0j
            for r in range(7):
                e += E[r] * K[r, i]
            scale = atol + rtol * max(abs(y[i]), abs(ytmp[i]))
            q = abs(h * e) / scale
            err += q * q
        err = np.sqrt(err / n)
        if err <= 1.0:
            t = t_end if last else t + h
            y[:] = ytmp
            K[0] = K[6]
            steps += 1
            fac = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** -0.2)
            h = h * fac
        else:
            h = h * max(0.2, 0.9 * err ** -0.2)
    return y, t, steps, 0


def evolve_to_steady(
    drives: DriveConfig,
    dec: DecoherenceConfig,
    q: Chirality,
    rho0=None,
    t_end: float = 1.0,
    tol: float = 1e-10,
    max_steps: int = 50_000_000,
) -> DensityMatrix:
    """Integrate d(rho)/dt = G rho from ``rho0`` up to ``t_end``.

    Adaptive Dormand-Prince 5(4) with absolute and relative tolerance both set
    to ``tol``. Defaults to starting in the ground state |1><1|.
    """
    if not t_end > 0:
        raise InvalidConfigError("t_end must be > 0")
    if not tol > 0:
        raise InvalidConfigError("tol must be > 0")
    if rho0 is None:
        rho0 = DensityMatrix.pure(1)
    y0 = np.array(np.asarray(rho0, dtype=complex).reshape(9))
    gen = build_generator(drives, dec, q)
    scale = max(gen.norm_inf, 1e-300)
    h0 = min(t_end, 0.01 / scale)
    hmin = 1e-14 * max(t_end, 1.0 / scale)
    y, t, steps, status = _dopri5(
        np.ascontiguousarray(gen.matrix), y0, float(t_end), tol, tol, h0, hmin,
        max_steps, _A, _E,
    )
    if status == 1:
        raise StiffnessError(
            f"step size underflow at t={t:.6g} after {steps} steps; reduce the "
            "system rates or use the algebraic steady_state solver"
        )
    if status == 2:
        raise StiffnessError(
            f"step budget of {max_steps} exhausted at t={t:.6g}; the problem is too "
            "stiff for an explicit scheme, use steady_state instead"
        )
    return DensityMatrix(y.reshape(3, 3))


def relaxation_time(dec: DecoherenceConfig) -> float:
    """1 / (smallest positive rate); the oracle runs for a multiple of this."""
    rate = dec.min_positive_rate
    if rate <= 0:
        raise InvalidConfigError("no positive decoherence rate")
    return 1.0 / rate
