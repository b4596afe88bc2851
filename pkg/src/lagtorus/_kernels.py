"""Hot numeric loops, each with a numba kernel and a pure-numpy fallback.

The backend is picked once at import time.  Set ``LAGTORUS_DISABLE_NUMBA=1`` to
force the numpy path (numba is also skipped automatically when it cannot be
imported).  Both paths are always importable so that the benchmark and the
tests can compare them directly.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("LAGTORUS_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG in {"1", "true", "yes", "on"}

try:
    import numba

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba ships in the test image
    numba = None
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and not NUMBA_DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"


def _njit(func):
    if not NUMBA_AVAILABLE:
        return func
    return numba.njit(cache=True, fastmath=False)(func)


# ---------------------------------------------------------------------------
# Lagrangian residual of the torus embedding on a uniform grid


def _lagrangian_grid_py(grid_size, N, e1, e2):
    k = N.shape[0]
    h = 2.0 * np.pi / grid_size
    worst = 0.0
    for i in range(grid_size):
        t = i * h
        ct = np.cos(t)
        st = np.sin(t)
        for j in range(grid_size):
            v = j * h
            cv = np.cos(v)
            sv = np.sin(v)
            acc = 0.0
            for m in range(k):
                u = cv * e1[m] + sv * e2[m]
                du = -sv * e1[m] + cv * e2[m]
                dq_t = -N[m] * st + u * ct
                dp_t = -u * st - N[m] * ct
                dq_v = du * st
                dp_v = du * ct
                acc += dq_t * dp_v - dp_t * dq_v
            if abs(acc) > worst:
                worst = abs(acc)
    return worst


_lagrangian_grid_numba = _njit(_lagrangian_grid_py)


def _lagrangian_grid_numpy(grid_size, N, e1, e2, chunk=128):
    h = 2.0 * np.pi / grid_size
    v = np.arange(grid_size) * h
    u = np.cos(v)[:, None] * e1 + np.sin(v)[:, None] * e2
    du = -np.sin(v)[:, None] * e1 + np.cos(v)[:, None] * e2
    worst = 0.0
    for start in range(0, grid_size, chunk):
        t = np.arange(start, min(start + chunk, grid_size)) * h
        ct = np.cos(t)[:, None, None]
        st = np.sin(t)[:, None, None]
        dq_t = -N * st + u * ct
        dp_t = -u * st - N * ct
        dq_v = du * st
        dp_v = du * ct
        res = np.sum(dq_t * dp_v - dp_t * dq_v, axis=-1)
        worst = max(worst, float(np.max(np.abs(res))))
    return worst


def _resolve(backend: str | None) -> str:
    backend = backend or BACKEND
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not NUMBA_AVAILABLE:
        raise ValueError("numba backend requested but numba is not installed")
    return backend


def lagrangian_grid_residual(grid_size: int, N, e1, e2, backend: str | None = None) -> float:
    N, e1, e2 = (np.ascontiguousarray(a, dtype=np.float64) for a in (N, e1, e2))
    backend = _resolve(backend)
    if backend == "numba":
        return float(_lagrangian_grid_numba(int(grid_size), N, e1, e2))
    return _lagrangian_grid_numpy(int(grid_size), N, e1, e2)


# ---------------------------------------------------------------------------
# RK4 for the circle flow theta' = eps * sin(theta), batched over start angles.
# Every output step of length h is split into `substeps` RK4 steps; the local
# error of each substep is estimated by step doubling.


def _rk4_circle_py(theta0, eps, h, n_steps, substeps):
    m = theta0.shape[0]
    out = np.empty((n_steps + 1, m))
    dt = h / substeps
    worst = 0.0
    for j in range(m):
        y = theta0[j]
        out[0, j] = y
        for n in range(n_steps):
            for _ in range(substeps):
                k1 = eps * np.sin(y)
                k2 = eps * np.sin(y + 0.5 * dt * k1)
                k3 = eps * np.sin(y + 0.5 * dt * k2)
                k4 = eps * np.sin(y + dt * k3)
                full = y + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
                hd = 0.5 * dt
                z = y
                for _r in range(2):
                    a1 = eps * np.sin(z)
                    a2 = eps * np.sin(z + 0.5 * hd * a1)
                    a3 = eps * np.sin(z + 0.5 * hd * a2)
                    a4 = eps * np.sin(z + hd * a3)
                    z = z + hd * (a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0
                err = abs(z - full) / 15.0
                if err > worst:
                    worst = err
                y = z
            out[n + 1, j] = y
    return out, worst


_rk4_circle_numba = _njit(_rk4_circle_py)


def _rk4_circle_numpy(theta0, eps, h, n_steps, substeps):
    y = np.array(theta0, dtype=float)
    out = np.empty((n_steps + 1, y.shape[0]))
    out[0] = y
    dt = h / substeps
    hd = 0.5 * dt
    worst = 0.0

    def f(x):
        return eps * np.sin(x)

    for n in range(n_steps):
        for _ in range(substeps):
            k1 = f(y)
            k2 = f(y + 0.5 * dt * k1)
            k3 = f(y + 0.5 * dt * k2)
            k4 = f(y + dt * k3)
            full = y + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
            z = y
            for _r in range(2):
                a1 = f(z)
                a2 = f(z + 0.5 * hd * a1)
                a3 = f(z + 0.5 * hd * a2)
                a4 = f(z + hd * a3)
                z = z + hd * (a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0
            if y.size:
                worst = max(worst, float(np.max(np.abs(z - full))) / 15.0)
            y = z
        out[n + 1] = y
    return out, worst


def rk4_circle_flow(theta0, eps: float, h: float, n_steps: int, substeps: int = 1, backend: str | None = None):
    """Integrate theta' = eps*sin(theta) for each start angle.

    Returns ``(samples, max_local_error)`` where ``samples`` has shape
    ``(n_steps + 1, len(theta0))``.  Angles are not reduced mod 2*pi.
    """
    theta0 = np.ascontiguousarray(np.atleast_1d(theta0), dtype=np.float64)
    backend = _resolve(backend)
    if backend == "numba":
        out, worst = _rk4_circle_numba(theta0, float(eps), float(h), int(n_steps), int(substeps))
        return out, float(worst)
    return _rk4_circle_numpy(theta0, float(eps), float(h), int(n_steps), int(substeps))
