"""Hot inner loops with two interchangeable backends.

Each kernel exists as a pure-numpy implementation (``np_*``) and, when numba
is importable, a compiled one (``nb_*``). The public name (no prefix) points
at the backend selected at import time. Set ``STRONGPERT_DISABLE_NUMBA=1``
to force the numpy path, e.g. for debugging or on platforms without numba.
"""

import math
import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False


def _env_disabled():
    return os.environ.get("STRONGPERT_DISABLE_NUMBA", "").strip().lower() in (
        "1",
        "true",
        "yes",
        "on",
    )


USE_NUMBA = HAVE_NUMBA and not _env_disabled()
BACKEND = "numba" if USE_NUMBA else "numpy"

_RESCALE_AT = 1e250
# below this argument the recurrence coefficients 2k/x overflow; two series
# terms are exact to double precision there
_SMALL_X = 1e-6


# ---------------------------------------------------------------------------
# Bessel J_0..J_n by Miller's downward recurrence
# ---------------------------------------------------------------------------


def _miller_start(nmax, x):
    top = max(nmax, int(math.ceil(x)))
    start = top + 20 + int(math.sqrt(40.0 * (top + 1)))
    return start + (start % 2)


def _miller_loop(nmax, x, start):
    # x > 0. Returns unnormalised J_0..J_start and the normalisation sum.
    vals = np.zeros(start + 2)
    vals[start + 1] = 0.0
    vals[start] = 1e-30
    norm = 0.0
    for k in range(start, 0, -1):
        prev = (2.0 * k / x) * vals[k] - vals[k + 1]
        vals[k - 1] = prev
        if abs(prev) > _RESCALE_AT:
            for j in range(k - 1, start + 2):
                vals[j] *= 1.0 / _RESCALE_AT
            norm *= 1.0 / _RESCALE_AT
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * vals[k - 1]
    norm += vals[0]
    return vals, norm


def _small_x_table(nmax, x):
    half = 0.5 * x
    out = np.empty(nmax + 1)
    lead = 1.0
    for n in range(nmax + 1):
        if n:
            lead *= half / n
        out[n] = lead * (1.0 - half * half / (n + 1))
    return out


def np_bessel_table(nmax, x):
    """J_0(x) .. J_nmax(x) for x > 0 (unvectorised reference loop)."""
    if x < _SMALL_X:
        return _small_x_table(nmax, x)
    start = _miller_start(nmax, x)
    vals, norm = _miller_loop(nmax, x, start)
    return vals[: nmax + 1] / norm


# ---------------------------------------------------------------------------
# Sequential exponential stepping
# ---------------------------------------------------------------------------


def np_step_sequence(evals, evecs, dts, psi0, hbar, record):
    """Apply exp(-i H_s dt_s / hbar) for s = 0..S-1 in order.

    ``evals`` (S, d) and ``evecs`` (S, d, d) hold the eigendecompositions of
    the H_s. States after every step with ``record[s]`` true are returned.
    """
    psi = psi0.astype(np.complex128).copy()
    out = np.empty((int(record.sum()), psi.shape[0]), dtype=np.complex128)
    phases = np.exp(-1j * evals * (dts[:, None] / hbar))
    r = 0
    for s in range(evals.shape[0]):
        q = evecs[s]
        psi = q @ (phases[s] * (q.conj().T @ psi))
        if record[s]:
            out[r] = psi
            r += 1
    return psi, out


def _step_sequence_loop(evals, evecs, dts, psi0, hbar, record):
    nsteps, d = evals.shape
    psi = psi0.astype(np.complex128).copy()
    nrec = 0
    for s in range(nsteps):
        if record[s]:
            nrec += 1
    out = np.empty((nrec, d), dtype=np.complex128)
    tmp = np.empty(d, dtype=np.complex128)
    r = 0
    for s in range(nsteps):
        for n in range(d):
            acc = 0j
            for a in range(d):
                acc += evecs[s, a, n].conjugate() * psi[a]
            tmp[n] = acc * np.exp(-1j * evals[s, n] * dts[s] / hbar)
        for a in range(d):
            acc = 0j
            for n in range(d):
                acc += evecs[s, a, n] * tmp[n]
            psi[a] = acc
        if record[s]:
            out[r, :] = psi
            r += 1
    return psi, out


# ---------------------------------------------------------------------------
# Phased kernel application  K_k x_k = conj(phi_k) * (M_k (phi_k * x_k))
# ---------------------------------------------------------------------------


def np_phased_kernel_apply(mats, phases, x, offdiag):
    """Apply the conjugated operators at every grid point at once.

    mats (N, d, d), phases (N, d), x (N, d). With ``offdiag`` the diagonal
    of each M_k is excluded.
    """
    y = np.einsum("kab,kb->ka", mats, phases * x)
    y = phases.conj() * y
    if offdiag:
        diag = np.einsum("kaa->ka", mats)
        y = y - diag * x
    return y


def _phased_kernel_loop(mats, phases, x, offdiag):
    nt, d = x.shape
    out = np.empty((nt, d), dtype=np.complex128)
    for k in range(nt):
        for a in range(d):
            acc = 0j
            for b in range(d):
                if offdiag and a == b:
                    continue
                acc += mats[k, a, b] * phases[k, b] * x[k, b]
            out[k, a] = phases[k, a].conjugate() * acc
    return out


# ---------------------------------------------------------------------------
# Cumulative trapezoid over the leading axis
# ---------------------------------------------------------------------------


def np_cumtrapz(y, t):
    """Cumulative trapezoid of y (N, ...) over t (N,), starting at 0."""
    out = np.zeros_like(y)
    h = np.diff(t).reshape((-1,) + (1,) * (y.ndim - 1))
    out[1:] = np.cumsum(0.5 * h * (y[1:] + y[:-1]), axis=0)
    return out


def _cumtrapz_loop(y, t):
    nt, d = y.shape
    out = np.zeros((nt, d), dtype=y.dtype)
    for k in range(1, nt):
        h = 0.5 * (t[k] - t[k - 1])
        for a in range(d):
            out[k, a] = out[k - 1, a] + h * (y[k, a] + y[k - 1, a])
    return out


if HAVE_NUMBA:
    _jit = numba.njit(cache=True, nogil=True)
    _nb_miller_loop = _jit(_miller_loop)

    def nb_bessel_table(nmax, x):
        if x < _SMALL_X:
            return _small_x_table(nmax, x)
        start = _miller_start(nmax, x)
        vals, norm = _nb_miller_loop(nmax, float(x), start)
        return vals[: nmax + 1] / norm

    _nb_step = _jit(_step_sequence_loop)

    def nb_step_sequence(evals, evecs, dts, psi0, hbar, record):
        return _nb_step(
            np.ascontiguousarray(evals, dtype=np.float64),
            np.ascontiguousarray(evecs, dtype=np.complex128),
            np.ascontiguousarray(dts, dtype=np.float64),
            np.ascontiguousarray(psi0, dtype=np.complex128),
            float(hbar),
            np.ascontiguousarray(record, dtype=np.bool_),
        )

    _nb_phased = _jit(_phased_kernel_loop)

    def nb_phased_kernel_apply(mats, phases, x, offdiag):
        return _nb_phased(
            np.ascontiguousarray(mats, dtype=np.complex128),
            np.ascontiguousarray(phases, dtype=np.complex128),
            np.ascontiguousarray(x, dtype=np.complex128),
            bool(offdiag),
        )

    _nb_cumtrapz = _jit(_cumtrapz_loop)

    def nb_cumtrapz(y, t):
        if y.ndim != 2 or not np.iscomplexobj(y):
            return np_cumtrapz(y, t)
        return _nb_cumtrapz(
            np.ascontiguousarray(y, dtype=np.complex128),
            np.ascontiguousarray(t, dtype=np.float64),
        )

else:  # pragma: no cover
    nb_bessel_table = nb_step_sequence = nb_phased_kernel_apply = nb_cumtrapz = None


if USE_NUMBA:
    bessel_table = nb_bessel_table
    step_sequence = nb_step_sequence
    phased_kernel_apply = nb_phased_kernel_apply
    cumtrapz = nb_cumtrapz
else:
    bessel_table = np_bessel_table
    step_sequence = np_step_sequence
    phased_kernel_apply = np_phased_kernel_apply
    cumtrapz = np_cumtrapz
