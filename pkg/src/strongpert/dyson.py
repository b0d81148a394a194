"""Dual Dyson series: corrections generated by H0 around the adiabatic U.

With K(t) = U^dagger(t) H0(t) U(t) expressed in the t0 frame,

    psi0(t) = U c
    psi1(t) = -(i/hbar) U int K c
    psi2(t) = (-(i/hbar))^2 U int dt' K(t') int^{t'} dt'' K(t'') c

In resummed mode U carries the level-shift phases and K is replaced by its
off-diagonal part, the diagonal having been absorbed into U.

Any object exposing ``grid``, ``hbar``, ``dim``, ``frame_coords``,
``to_lab`` and ``apply_kernel`` (see :class:`strongpert.adiabatic.SpectralPath`)
can serve as the leading order.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import as_state, check_hermitian

MODES = ("raw", "resummed")
MAX_ORDER = 2


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode == "resummed"


@dataclass(frozen=True)
class ConjugatedH0Sample:
    t: float
    full: np.ndarray
    diagonal: np.ndarray
    offdiag: np.ndarray

    @property
    def level_shifts(self):
        return np.real(np.diag(self.diagonal))


def conjugated_h0(path, h0_of_t, t_index, resummed=False):
    """U^dagger H0 U at grid point ``t_index`` in the basis {|n;t0>}.

    Computed directly from the propagator and H0(t), independently of the
    frame matrix elements cached on the path.
    """
    t = float(path.grid[t_index])
    u = path.propagator(t_index, resummed)
    h0 = check_hermitian(h0_of_t(t), f"H0(t={t:.6g})")
    q0 = path.eigenvectors[0]
    full = q0.conj().T @ (u.conj().T @ h0 @ u) @ q0
    diagonal = np.diag(np.diag(full))
    return ConjugatedH0Sample(t, full, diagonal, full - diagonal)


@dataclass(frozen=True)
class SeriesState:
    """Per-order correction vectors at the output times.

    ``orders[j]`` has shape (n_times, d) and holds psi^(j) in the original
    basis; ``partial_sums[j]`` is the sum of orders 0..j.
    """

    times: np.ndarray
    indices: np.ndarray
    mode: str
    orders: list
    hbar: float = 1.0
    partial_sums: list = field(init=False)

    def __post_init__(self):
        sums = list(np.cumsum(np.stack(self.orders), axis=0))
        object.__setattr__(self, "partial_sums", sums)

    @property
    def max_order(self):
        return len(self.orders) - 1

    def norms(self, order):
        return np.linalg.norm(self.orders[order], axis=1)


def _series_coords(frame, c, max_order, resummed):
    nt = frame.grid.size
    lead = np.broadcast_to(c, (nt, c.size)).astype(np.complex128)
    coords = [lead]
    fac = -1j / frame.hbar
    inner = lead
    integral = None
    for _ in range(max_order):
        y = frame.apply_kernel(inner, resummed=resummed, offdiag=resummed)
        integral = _kernels.cumtrapz(y, frame.grid)
        inner = integral
        coords.append(fac ** len(coords) * integral)
    return coords


def series_corrections(frame, psi0, max_order=2, mode="raw", output_indices=None):
    """Series terms psi^(0..max_order) for the initial state ``psi0``.

    All time integrals use the composite trapezoid rule on the frame grid;
    the second-order nested integral reuses the running first-order integral.
    """
    if max_order > MAX_ORDER or max_order < 0:
        raise ValueError(f"unsupported series order {max_order}; orders 0..{MAX_ORDER} are available")
    resummed = _check_mode(mode)
    psi0 = as_state(psi0, frame.dim)
    c = frame.frame_coords(psi0)
    coords = _series_coords(frame, c, max_order, resummed)
    idx = np.arange(frame.grid.size) if output_indices is None else np.asarray(output_indices)
    orders = [frame.to_lab(x[idx], resummed=resummed, indices=idx) for x in coords]
    return SeriesState(frame.grid[idx], idx, mode, orders, frame.hbar)


def _trap_weights(t):
    w = np.zeros_like(t)
    h = np.diff(t)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


def second_order_nested(kernels, grid, c):
    """Nested-integral form: int dt' K(t') int^{t'} dt'' K(t'') c (no prefactor)."""
    y = np.einsum("kab,b->ka", kernels, c)
    inner = _kernels.np_cumtrapz(y, grid)
    z = np.einsum("kab,kb->ka", kernels, inner)
    return _kernels.np_cumtrapz(z, grid)[-1]


def second_order_time_ordered(kernels, grid, c):
    """Symmetrised form: 1/2 int int over the full square of T[K(t')K(t'')] c.

    The square is discretised with trapezoid weights in both variables; the
    later time always stands to the left.
    """
    w = _trap_weights(grid)
    wk = w[:, None, None] * kernels
    y = np.einsum("kab,b->ka", wk, c)
    # strictly earlier points: sum_{j<i} w_j K_j c
    before = np.cumsum(y, axis=0) - y
    lower = np.einsum("kab,kb->a", wk, before)
    # strictly later points on the left: sum_i (sum_{j>i} w_j K_j) w_i K_i c
    total = wk.sum(axis=0)
    after = total[None] - np.cumsum(wk, axis=0)
    upper = np.einsum("kab,kb->a", after, y)
    diag = np.einsum("kab,kb->a", wk, y)
    return 0.5 * (lower + upper + diag)


def time_ordering_equivalence_check(path, psi0, t_index=-1, mode="raw", kernels=None):
    """Norm of the difference between the nested and time-ordered second orders.

    ``kernels`` (N, d, d) overrides U^dagger H0 U, e.g. with a constant matrix.
    """
    resummed = _check_mode(mode)
    psi0 = as_state(psi0, path.dim)
    n = path.grid.size
    stop = (t_index % n) + 1
    if kernels is None:
        kernels = path.kernel_matrices(resummed=resummed, offdiag=resummed)
    kernels = np.asarray(kernels, dtype=np.complex128)[:stop]
    grid = path.grid[:stop]
    c = path.frame_coords(psi0)
    if stop < 2:
        return 0.0
    pref = (-1j / path.hbar) ** 2
    a = pref * second_order_nested(kernels, grid, c)
    b = pref * second_order_time_ordered(kernels, grid, c)
    return float(np.linalg.norm(a - b))
