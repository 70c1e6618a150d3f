"""Pure-Python (numpy) two-stage Gauss-Legendre kernel.

Mirrors ``_gl_core.pyx`` exactly; used when the compiled extension is absent
or when ``QSPLINE_BACKEND=python``.  State layout is ``[x, y, v]`` when
``with_x`` is true and ``[y, v]`` otherwise, each block of length m.
"""

import numpy as np

SQ3_6 = np.sqrt(3.0) / 6.0
A11 = 0.25
A12 = 0.25 - SQ3_6
A21 = 0.25 + SQ3_6
A22 = 0.25


def _dense(m, nz_l, nz_r, nz_s, nz_val):
    c = np.zeros((m, m, m))
    c[nz_l, nz_r, nz_s] = nz_val
    return c.reshape(m, m * m)


def integrate(z0, k, h, steps, nz_l, nz_r, nz_s, nz_val, with_x, store,
              tol=1e-14, fail_tol=1e-12, max_sweeps=100):
    """Run ``steps`` fixed steps of size ``h``.

    The stage residual is ``|h| * max|F_new - F_old|`` divided by
    ``max(1, max|z|)``, so the tolerances are relative for large states.

    Returns ``(out, status, fail_step, fail_residual)``; ``status`` is 0 on
    success and 1 when a stage solve failed (``out`` then holds the partial
    result up to the failing step).
    """
    k = np.asarray(k, dtype=float)
    m = k.shape[0]
    cf = _dense(m, nz_l, nz_r, nz_s, nz_val)
    off = m if with_x else 0

    def field(zs):
        # zs has shape (2, d): both stages at once
        y = zs[:, off:off + m]
        v = zs[:, off + m:off + 2 * m]
        out = np.empty_like(zs)
        if with_x:
            x = zs[:, :m]
            out[:, :m] = (cf @ (y[:, :, None] * x[:, None, :]).reshape(2, -1).T).T
        out[:, off:off + m] = v
        out[:, off + m:] = k + (cf @ (y[:, :, None] * v[:, None, :]).reshape(2, -1).T).T
        return out

    a = np.array([[A11, A12], [A21, A22]])
    z = np.array(z0, dtype=float)
    d = z.shape[0]
    if store:
        traj = np.empty((steps + 1, d))
        traj[0] = z
    habs = abs(h)
    for step in range(steps):
        f = field(np.stack([z, z]))
        scale = max(1.0, float(np.max(np.abs(z))))
        prev = np.inf
        res = np.inf
        for _ in range(max_sweeps):
            # a diverging sweep overflows; the residual check reports it
            with np.errstate(over="ignore", invalid="ignore"):
                zs = z + h * (a @ f)
                g = field(zs)
            res = habs * float(np.max(np.abs(g - f))) / scale
            f = g
            if res < tol:
                break
            if res <= fail_tol and res >= prev:
                break
            prev = res
        if not res <= fail_tol:
            return (traj[:step + 1] if store else z), 1, step, res
        z = z + 0.5 * h * (f[0] + f[1])
        if store:
            traj[step + 1] = z
    return (traj if store else z), 0, -1, 0.0
