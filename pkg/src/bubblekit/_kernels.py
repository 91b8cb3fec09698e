"""Hot numeric kernels: numba-compiled loops with a pure-NumPy fallback.

Setting the environment variable ``BUBBLEKIT_NO_NUMBA=1`` (checked at
import time) selects the NumPy implementations; otherwise numba is used
when importable.  Both variants are always exposed for benchmarking as
``*_nb`` / ``*_np``; the unsuffixed names are the selected aliases.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import MaxDepthExceeded

_NO_NUMBA_FLAG = os.environ.get("BUBBLEKIT_NO_NUMBA", "").lower() in ("1", "true", "yes")

try:
    from numba import njit as _njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba present in normal installs
    HAVE_NUMBA = False

NUMBA_ACTIVE = HAVE_NUMBA and not _NO_NUMBA_FLAG


def line_element_np(z_re, z_im, p_re, p_im, bm1):
    """prod_i |z - p_i|**(beta_i - 1) for a batch of complex points z."""
    dr = z_re[:, None] - p_re[None, :]
    di = z_im[:, None] - p_im[None, :]
    d2 = dr * dr + di * di
    return np.prod(d2 ** (0.5 * bm1[None, :]), axis=1)


def gh_potential_np(xs, pos, mult):
    """Gibbons-Hawking potential 0.5 * sum_i m_i / |x - x_i| on a batch."""
    diff = xs[:, None, :] - pos[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    return 0.5 * np.sum(mult[None, :] / dist, axis=1)


if HAVE_NUMBA:

    @_njit(cache=True)
    def line_element_nb(z_re, z_im, p_re, p_im, bm1):
        n = z_re.shape[0]
        m = p_re.shape[0]
        out = np.empty(n)
        for a in range(n):
            acc = 1.0
            for i in range(m):
                dr = z_re[a] - p_re[i]
                di = z_im[a] - p_im[i]
                acc *= (dr * dr + di * di) ** (0.5 * bm1[i])
            out[a] = acc
        return out

    @_njit(cache=True)
    def gh_potential_nb(xs, pos, mult):
        n = xs.shape[0]
        m = pos.shape[0]
        out = np.empty(n)
        for a in range(n):
            acc = 0.0
            for i in range(m):
                dx = xs[a, 0] - pos[i, 0]
                dy = xs[a, 1] - pos[i, 1]
                dz = xs[a, 2] - pos[i, 2]
                acc += mult[i] / np.sqrt(dx * dx + dy * dy + dz * dz)
            out[a] = 0.5 * acc
        return out


if NUMBA_ACTIVE:
    line_element = line_element_nb
    gh_potential = gh_potential_nb
else:
    line_element = line_element_np
    gh_potential = gh_potential_np


# ---------------------------------------------------------------------------
# Adaptive Gauss-Kronrod driver (batched: one integrand call per sweep)
# ---------------------------------------------------------------------------

# 15-point Kronrod nodes on [-1, 1] with embedded 7-point Gauss weights.
_XGK_HALF = np.array([
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0,
])
_WGK_HALF = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
])
_WG_HALF = np.array([
    0.0, 0.129484966168870, 0.0, 0.279705391489277,
    0.0, 0.381830050505119, 0.0, 0.417959183673469,
])

XGK = np.concatenate([-_XGK_HALF[:7], _XGK_HALF[::-1]])
WGK = np.concatenate([_WGK_HALF[:7], _WGK_HALF[::-1]])
WG = np.concatenate([_WG_HALF[:7], _WG_HALF[::-1]])


def adaptive_gk(fbatch, a: float, b: float, rel_tol: float, max_depth: int) -> float:
    """Globally adaptive GK15 on [a, b].

    ``fbatch`` maps an array of parameters to integrand values; all
    pending panels are evaluated in a single call per sweep so the hot
    work stays inside the kernels.
    """
    if b <= a:
        return 0.0
    total_len = b - a
    pending = np.array([[a, b]])
    accepted = 0.0
    for _ in range(max_depth):
        mids = 0.5 * (pending[:, 0] + pending[:, 1])
        halfs = 0.5 * (pending[:, 1] - pending[:, 0])
        us = (mids[:, None] + halfs[:, None] * XGK[None, :]).ravel()
        vals = np.asarray(fbatch(us)).reshape(len(pending), XGK.size)
        ik = halfs * (vals @ WGK)
        ig = halfs * (vals @ WG)
        err = np.abs(ik - ig)
        scale = abs(accepted + float(ik.sum()))
        tol = rel_tol * max(scale, 1e-300) * (2.0 * halfs / total_len)
        ok = (err <= tol) | (2.0 * halfs <= 1e-14 * total_len)
        accepted += float(ik[ok].sum())
        bad = pending[~ok]
        if bad.size == 0:
            return accepted
        mid_bad = 0.5 * (bad[:, 0] + bad[:, 1])
        pending = np.concatenate([
            np.stack([bad[:, 0], mid_bad], axis=1),
            np.stack([mid_bad, bad[:, 1]], axis=1),
        ])
    raise MaxDepthExceeded(
        f"quadrature did not converge within depth {max_depth}")
