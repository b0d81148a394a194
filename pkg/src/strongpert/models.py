"""Scenario builders for the two worked models.

Two-level system
    H = diag(E1, E2) + [[0, V12], [conj(V12), 0]] with constant coupling.

Two-wave particle
    H = p^2 / 2 mass + V1 cos(k1 x - w1 t) + V2 cos(k2 x - w2 t), represented
    on the momentum lattice p0 - a hbar k1 - b hbar k2 reachable from the
    plane wave p0. Site (a, b) stands for exp(-i (a k1 + b k2) x) times the
    initial plane wave. Each Bessel index runs over |a| <= trunc and the
    lattice is closed cyclically, so the two cosines become commuting
    circulant hoppings: a -> a+1 with amplitude (V1/2) exp(+i w1 t), and the
    same for b with wave 2.

    The perturbation has a continuous spectrum, so its lattice eigenbasis is
    not a useful adiabatic frame. Instead the leading order is the exact
    exponential of the commuting perturbation, and the levels are the dressed
    plane waves W(t)|a, b>, where W(t) = exp(-(i/hbar) int_{-inf}^t V) is the
    adiabatically switched-on dressing. Their level shifts are the kinetic
    energy plus the ponderomotive energies of the two waves.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .adiabatic import track_spectral_path, validate_grid
from .core import as_state, bessel_j_symmetric
from .errors import DegeneracyError, NumericalError, TruncationError

TRUNC_MARGIN = 20
MAX_LATTICE_DIM = 10_000
PONDEROMOTIVE_RTOL = 1e-8


@dataclass
class Scenario:
    """Everything needed to run the series pipeline and the oracle."""

    name: str
    grid: np.ndarray
    hbar: float
    psi0: np.ndarray
    h0: Callable
    v: Callable
    frame_factory: Callable
    metadata: dict = field(default_factory=dict)

    def hamiltonian(self, t):
        return self.h0(t) + self.v(t)

    def leading_order(self):
        return self.frame_factory()


# ---------------------------------------------------------------------------
# two-level system
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoLevelParams:
    E1: float
    E2: float
    V12: complex
    hbar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "V12", complex(self.V12))
        if self.V12 == 0:
            raise DegeneracyError("V12 = 0 makes the perturbation spectrum degenerate")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")

    @property
    def V21(self):
        return self.V12.conjugate()

    def h0_matrix(self):
        return np.diag([self.E1, self.E2]).astype(np.complex128)

    def v_matrix(self):
        return np.array([[0, self.V12], [self.V21, 0]], dtype=np.complex128)

    def perturbation_eigenvectors(self):
        """|v1>, |v2> in the gauge of the textbook solution (eigenvalues -|V12|, +|V12|)."""
        a = abs(self.V12)
        v1 = np.array([1.0, -self.V21 / a]) / math.sqrt(2)
        v2 = np.array([self.V12 / a, 1.0]) / math.sqrt(2)
        return v1.astype(np.complex128), v2.astype(np.complex128)

    @property
    def level_shift(self):
        return 0.5 * (self.E1 + self.E2)


def two_level_initial_state(params, initial="v1"):
    v1, v2 = params.perturbation_eigenvectors()
    states = {
        "v1": v1,
        "v2": v2,
        "e1": np.array([1.0, 0.0], dtype=np.complex128),
        "e2": np.array([0.0, 1.0], dtype=np.complex128),
    }
    try:
        return states[initial]
    except KeyError:
        raise ValueError(f"initial state must be one of {sorted(states)}, got {initial!r}") from None


def two_level_scenario(params, t_max, grid_points, t0=0.0, initial="v1"):
    """Constant-coupling two-level system on a uniform grid."""
    if grid_points < 100:
        raise ValueError(f"grid_points must be >= 100, got {grid_points}")
    if t_max <= t0:
        raise ValueError("t_max must exceed t0")
    grid = np.linspace(t0, t_max, int(grid_points))
    h0m, vm = params.h0_matrix(), params.v_matrix()

    def h0(t):
        return h0m

    def v(t):
        return vm

    def frame():
        return track_spectral_path(v, h0, grid, params.hbar)

    v1, v2 = params.perturbation_eigenvectors()
    meta = {
        "model": "two_level",
        "level_shift": params.level_shift,
        "eigenvalues": [-abs(params.V12), abs(params.V12)],
        "initial": initial,
    }
    return Scenario(
        "two_level",
        grid,
        params.hbar,
        two_level_initial_state(params, initial),
        h0,
        v,
        frame,
        meta,
    )


# ---------------------------------------------------------------------------
# two-wave particle
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoWaveParams:
    mass: float
    p0: float
    V1: float
    V2: float
    k1: float
    k2: float
    w1: float
    w2: float
    hbar: float = 1.0
    trunc: int = None

    def __post_init__(self):
        if self.w1 == 0 or self.w2 == 0:
            raise ValueError("wave frequencies must be non-zero")
        if self.mass <= 0 or self.hbar <= 0:
            raise ValueError("mass and hbar must be positive")
        need = self.min_trunc
        if self.trunc is None:
            object.__setattr__(self, "trunc", need)
        elif int(self.trunc) < need:
            raise TruncationError(
                f"trunc = {self.trunc} is too small for Bessel arguments "
                f"({self.z1:.4g}, {self.z2:.4g}); need trunc >= {need}"
            )
        object.__setattr__(self, "trunc", int(self.trunc))

    @property
    def z1(self):
        return self.V1 / (self.hbar * self.w1)

    @property
    def z2(self):
        return self.V2 / (self.hbar * self.w2)

    @property
    def min_trunc(self):
        return int(math.ceil(max(abs(self.z1), abs(self.z2)))) + TRUNC_MARGIN

    @property
    def side(self):
        return 2 * self.trunc + 1

    @property
    def dim(self):
        return self.side**2


@dataclass(frozen=True)
class MomentumLattice:
    """Momenta p0 - a hbar k1 - b hbar k2 for |a|, |b| <= trunc.

    ``pairs[i]`` is the Bessel-index pair of product site i and
    ``position[i]`` its place in ``basis``; sites with equal momentum
    (commensurate wave numbers) share a position.
    """

    pairs: np.ndarray
    momenta: np.ndarray
    basis: np.ndarray
    position: np.ndarray

    @classmethod
    def build(cls, params):
        m = np.arange(-params.trunc, params.trunc + 1)
        a, b = np.meshgrid(m, m, indexing="ij")
        pairs = np.stack([a.ravel(), b.ravel()], axis=1)
        hb = params.hbar
        mom = params.p0 - pairs[:, 0] * hb * params.k1 - pairs[:, 1] * hb * params.k2
        scale = max(abs(params.p0), abs(hb * params.k1), abs(hb * params.k2), 1e-300)
        tol = 1e-10 * scale
        order = np.argsort(mom, kind="stable")
        group = np.empty(mom.size, dtype=int)
        labels = np.cumsum(np.concatenate([[0], np.diff(mom[order]) > tol]))
        group[order] = labels
        # number positions by first appearance in site order
        _, first = np.unique(group, return_index=True)
        rank = np.empty(first.size, dtype=int)
        rank[np.argsort(first)] = np.arange(first.size)
        position = rank[group]
        basis = np.empty(first.size)
        basis[position] = mom
        return cls(pairs, mom, basis, position)

    @property
    def size(self):
        return self.basis.size

    def index(self, a, b):
        hits = np.nonzero((self.pairs[:, 0] == a) & (self.pairs[:, 1] == b))[0]
        if hits.size == 0:
            raise KeyError((a, b))
        return int(self.position[hits[0]])

    def collapse(self, site_amplitudes):
        """Sum product-site amplitudes onto the distinct momenta."""
        out = np.zeros(self.size, dtype=np.result_type(site_amplitudes, np.complex128))
        np.add.at(out, self.position, site_amplitudes)
        return out


def two_wave_leading_order(params, t):
    """Leading-order amplitudes J_a(z1) J_b(z2) exp(i (a w1 + b w2) t) on the lattice.

    Returns ``(lattice, amplitudes)`` with amplitudes indexed like
    ``lattice.basis``. The sign convention is the one of the closed-form
    leading order; the dressed states of :class:`DressedLattice` differ from
    it by the site parity (-1)^(a+b), which leaves all probabilities equal.
    """
    lat = MomentumLattice.build(params)
    ja = bessel_j_symmetric(params.trunc, params.z1)
    jb = bessel_j_symmetric(params.trunc, params.z2)
    a, b = lat.pairs[:, 0], lat.pairs[:, 1]
    off = params.trunc
    amps = ja[a + off] * jb[b + off] * np.exp(1j * (a * params.w1 + b * params.w2) * t)
    return lat, lat.collapse(amps)


def ponderomotive_closed_form(params):
    """p0^2/2m + k1^2 V1^2/(4 m w1^2) + k2^2 V2^2/(4 m w2^2)."""
    m = params.mass
    return (
        params.p0**2 / (2 * m)
        + params.k1**2 * params.V1**2 / (4 * m * params.w1**2)
        + params.k2**2 * params.V2**2 / (4 * m * params.w2**2)
    )


def ponderomotive_bruteforce(params):
    """sum_{a,b} J_a(z1)^2 J_b(z2)^2 (p0 - a hbar k1 - b hbar k2)^2 / 2m."""
    ja2 = bessel_j_symmetric(params.trunc, params.z1) ** 2
    jb2 = bessel_j_symmetric(params.trunc, params.z2) ** 2
    idx = np.arange(-params.trunc, params.trunc + 1)
    hb = params.hbar
    mom = params.p0 - idx[:, None] * hb * params.k1 - idx[None, :] * hb * params.k2
    return float(np.sum(ja2[:, None] * jb2[None, :] * mom**2) / (2 * params.mass))


def two_wave_conjugated_h0_diagonal(params):
    """Diagonal of U^dagger H0 U on the initial plane wave.

    Evaluated as a Bessel-weighted lattice sum and in closed form; the two
    must agree to a relative 1e-8.
    """
    brute = ponderomotive_bruteforce(params)
    closed = ponderomotive_closed_form(params)
    if abs(brute - closed) > PONDEROMOTIVE_RTOL * abs(closed):
        raise NumericalError(
            f"ponderomotive energy mismatch: lattice sum {brute!r} vs closed form {closed!r}"
        )
    return closed


def kinetic_grid(params):
    """Kinetic energy of every lattice site as a (side, side) array."""
    idx = np.arange(-params.trunc, params.trunc + 1)
    hb = params.hbar
    mom = params.p0 - idx[:, None] * hb * params.k1 - idx[None, :] * hb * params.k2
    return mom**2 / (2 * params.mass)


def _hopping(n, amp, w, t):
    shift = np.roll(np.eye(n), 1, axis=0)  # a -> a+1, cyclic
    ph = np.exp(1j * w * t)
    return 0.5 * amp * (ph * shift + np.conj(ph) * shift.T)


def lattice_potential(params, t):
    """Dense lattice matrix of V1 cos(k1 x - w1 t) + V2 cos(k2 x - w2 t)."""
    n = params.side
    eye = np.eye(n)
    return np.kron(_hopping(n, params.V1, params.w1, t), eye) + np.kron(
        eye, _hopping(n, params.V2, params.w2, t)
    )


def apply_lattice_potential(params, t, x):
    """V(t) x for lattice vectors ``x`` of length ``params.dim``."""
    n = params.side
    g = np.asarray(x, dtype=np.complex128).reshape(n, n)
    p1, p2 = np.exp(1j * params.w1 * t), np.exp(1j * params.w2 * t)
    out = 0.5 * params.V1 * (p1 * np.roll(g, 1, axis=0) + np.conj(p1) * np.roll(g, -1, axis=0))
    out += 0.5 * params.V2 * (p2 * np.roll(g, 1, axis=1) + np.conj(p2) * np.roll(g, -1, axis=1))
    return out.ravel()


class DressedLattice:
    """Leading order of the two-wave model on the cyclic momentum lattice.

    Implements the same frame interface as
    :class:`strongpert.adiabatic.SpectralPath`; frame coordinates are
    amplitudes on the dressed plane waves |a, b; t> = W(t)|a, b>.
    """

    _BLOCK = 128

    def __init__(self, params, grid):
        self.params = params
        self.grid = validate_grid(grid)
        self.hbar = float(params.hbar)
        n = params.side
        self.side = n
        self.dim = n * n
        idx = np.arange(-params.trunc, params.trunc + 1)
        self.theta = 2 * np.pi * np.arange(n) / n
        # grid values <- site amplitudes, site a carrying exp(-i a theta)
        self.fourier = np.exp(-1j * np.outer(self.theta, idx)) / np.sqrt(n)
        self.kinetic = kinetic_grid(params)
        self.level_shifts = self._level_shifts()
        self.shift_phase = _kernels.np_cumtrapz(self.level_shifts, self.grid) / self.hbar

    # dressing W(t) = exp(i z1 sin(theta - w1 t) + i z2 sin(phi - w2 t)) in site space
    def _dressing(self, times):
        p = self.params
        t = np.asarray(times, dtype=float)[:, None]
        g1 = np.exp(1j * p.z1 * np.sin(self.theta[None, :] - p.w1 * t))
        g2 = np.exp(1j * p.z2 * np.sin(self.theta[None, :] - p.w2 * t))
        return g1, g2

    def _apply_w(self, x, times, adjoint=False):
        n = self.side
        f = self.fourier
        out = np.empty_like(x, dtype=np.complex128)
        for lo in range(0, x.shape[0], self._BLOCK):
            hi = min(x.shape[0], lo + self._BLOCK)
            g1, g2 = self._dressing(times[lo:hi])
            if adjoint:
                g1, g2 = g1.conj(), g2.conj()
            xs = x[lo:hi].reshape(-1, n, n)
            y = f @ xs @ f.T
            y *= g1[:, :, None] * g2[:, None, :]
            out[lo:hi] = (f.conj().T @ y @ f.conj()).reshape(hi - lo, -1)
        return out

    def dressing_matrices(self, t):
        """The one-dimensional factors W1(t), W2(t) with W = W1 (x) W2."""
        g1, g2 = self._dressing([t])
        f = self.fourier
        w1 = f.conj().T @ (g1[0][:, None] * f)
        w2 = f.conj().T @ (g2[0][:, None] * f)
        return w1, w2

    def _level_shifts(self):
        out = np.empty((self.grid.size, self.dim))
        for k, t in enumerate(self.grid):
            w1, w2 = self.dressing_matrices(t)
            p1, p2 = np.abs(w1) ** 2, np.abs(w2) ** 2
            out[k] = (p1.T @ self.kinetic @ p2).ravel()
        return out

    def site_index(self, a, b):
        t = self.params.trunc
        if abs(a) > t or abs(b) > t:
            raise KeyError((a, b))
        return (a + t) * self.side + (b + t)

    def dressed_state(self, t, a=0, b=0):
        """W(t)|a, b> in site coordinates."""
        e = np.zeros((1, self.dim), dtype=np.complex128)
        e[0, self.site_index(a, b)] = 1.0
        return self._apply_w(e, np.array([t]))[0]

    def phases(self, resummed=False):
        if resummed:
            return np.exp(-1j * self.shift_phase)
        return np.ones((self.grid.size, self.dim), dtype=np.complex128)

    def frame_coords(self, psi):
        psi = np.asarray(psi, dtype=np.complex128)[None, :]
        return self._apply_w(psi, self.grid[:1], adjoint=True)[0]

    def to_lab(self, x, resummed=False, indices=None):
        idx = np.arange(self.grid.size) if indices is None else np.asarray(indices)
        return self._apply_w(self.phases(resummed)[idx] * x, self.grid[idx])

    def apply_kernel(self, x, resummed=False, offdiag=False):
        ph = self.phases(resummed)
        y = self._apply_w(ph * x, self.grid)
        y *= self.kinetic.ravel()[None, :]
        y = ph.conj() * self._apply_w(y, self.grid, adjoint=True)
        if offdiag:
            y -= self.level_shifts * x
        return y

    def propagator_apply(self, k, x, resummed=False):
        """U(t_k, t0) applied to lab-basis vectors ``x`` (rows)."""
        x = np.atleast_2d(np.asarray(x, dtype=np.complex128))
        c = self._apply_w(x, np.full(x.shape[0], self.grid[0]), adjoint=True)
        if resummed:
            c = c * np.exp(-1j * self.shift_phase[k])
        return self._apply_w(c, np.full(x.shape[0], self.grid[k]))

    def validity_ratio(self):
        """Level shift of the initial dressed plane wave over V1 + V2."""
        p = self.params
        scale = abs(p.V1) + abs(p.V2)
        shift = np.abs(self.level_shifts[:, self.site_index(0, 0)])
        with np.errstate(divide="ignore"):
            return shift / scale if scale > 0 else np.full(self.grid.size, np.inf)


def two_wave_series_scenario(params, t_max, grid_points, t0=0.0):
    """Two-wave model starting in the dressed plane wave p0 at t0."""
    if params.dim > MAX_LATTICE_DIM:
        side_max = int(math.isqrt(MAX_LATTICE_DIM))
        raise TruncationError(
            f"lattice of {params.dim} sites exceeds {MAX_LATTICE_DIM}; "
            f"use trunc <= {(side_max - 1) // 2} (minimum allowed {params.min_trunc})"
        )
    if grid_points < 100:
        raise ValueError(f"grid_points must be >= 100, got {grid_points}")
    if t_max <= t0:
        raise ValueError("t_max must exceed t0")
    grid = np.linspace(t0, t_max, int(grid_points))
    kin = np.diag(kinetic_grid(params).ravel()).astype(np.complex128)
    frame = DressedLattice(params, grid)
    psi0 = as_state(frame.dressed_state(t0))

    def h0(t):
        return kin

    def v(t):
        return lattice_potential(params, t)

    meta = {
        "model": "two_wave",
        "lattice_dim": params.dim,
        "trunc": params.trunc,
        "bessel_args": [params.z1, params.z2],
        "level_shift": two_wave_conjugated_h0_diagonal(params),
    }
    return Scenario("two_wave", grid, params.hbar, psi0, h0, v, lambda: frame, meta)
