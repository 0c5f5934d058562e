"""Hot numerical kernels: numba-jitted with a pure-numpy fallback.

The fallback path is selected by setting the environment variable
``BILHARM_DISABLE_NUMBA=1`` before import (or automatically when numba is
not importable).  Both paths compute identical values; see
``benchmarks/kernels_bench.py`` for a speed comparison.
"""

import os

import numpy as np

_FLAG = os.environ.get("BILHARM_DISABLE_NUMBA", "0").strip().lower()
_WANT_NUMBA = _FLAG in ("", "0", "false", "no")

if _WANT_NUMBA:
    try:
        import numba
        from numba import njit, prange

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False


# ---------------------------------------------------------------------------
# Associated Legendre recurrence (orthonormal spherical-harmonic convention)
#
# pbar(k, m, x) is defined so that Y_k^m(theta, phi) = pbar(k, m, cos theta)
# e^{i m phi} with Condon-Shortley phase; integral of |Y|^2 over S^2 is 1.
# Diagonal:   pbar(m, m)   = -sqrt((2m+1)/(2m)) sin(theta) pbar(m-1, m-1)
# Subdiag:    pbar(m+1, m) = sqrt(2m+3) cos(theta) pbar(m, m)
# Three-term: pbar(k, m)   = a cos(theta) pbar(k-1, m) - b pbar(k-2, m)
# with a = sqrt((4k^2-1)/(k^2-m^2)),
#      b = sqrt((2k+1)(k-1+m)(k-1-m)/((2k-3)(k^2-m^2))).
# Negative orders: pbar(k, -m) = (-1)^m pbar(k, m).
# ---------------------------------------------------------------------------


def _mspectrum_np(coeffs, k_max, x):
    """m-spectrum of a packed coefficient vector at colatitude nodes.

    Returns complex array G of shape (len(x), 2*k_max+1) with
    G[i, m+k_max] = sum_k coeffs[k*k+k+m] * pbar(k, |m|, x[i]) * sign,
    sign = (-1)^m for m < 0.
    """
    n = x.size
    s = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    out = np.zeros((n, 2 * k_max + 1), dtype=np.complex128)
    pmm = np.full(n, np.sqrt(1.0 / (4.0 * np.pi)))
    for m in range(k_max + 1):
        if m > 0:
            pmm = -np.sqrt((2 * m + 1.0) / (2 * m)) * s * pmm
        pk1 = pmm
        pk2 = np.zeros(n)
        sgn = -1.0 if m % 2 else 1.0
        for k in range(m, k_max + 1):
            if k == m:
                pk = pmm
            elif k == m + 1:
                pk = np.sqrt(2 * m + 3.0) * x * pmm
            else:
                a = np.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
                b = np.sqrt((2 * k + 1.0) * (k - 1 + m) * (k - 1 - m)
                            / ((2 * k - 3.0) * (k * k - m * m)))
                pk = a * x * pk1 - b * pk2
            out[:, k_max + m] += coeffs[k * k + k + m] * pk
            if m > 0:
                out[:, k_max - m] += (sgn * coeffs[k * k + k - m]) * pk
            pk2, pk1 = pk1, pk
    return out


def _accumulate_coeffs_np(fmw, k_max, x):
    """Adjoint of the m-spectrum map: packed coefficients from weighted modes.

    fmw has shape (len(x), 2*k_max+1); entry [i, m+k_max] already contains the
    quadrature weight and azimuthal transform value, so
    coeffs[k*k+k+m] = sum_i fmw[i, m+k_max] * pbar(k, |m|, x[i]) * sign.
    """
    n = x.size
    s = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    out = np.zeros((k_max + 1) * (k_max + 1), dtype=np.complex128)
    pmm = np.full(n, np.sqrt(1.0 / (4.0 * np.pi)))
    for m in range(k_max + 1):
        if m > 0:
            pmm = -np.sqrt((2 * m + 1.0) / (2 * m)) * s * pmm
        pk1 = pmm
        pk2 = np.zeros(n)
        sgn = -1.0 if m % 2 else 1.0
        for k in range(m, k_max + 1):
            if k == m:
                pk = pmm
            elif k == m + 1:
                pk = np.sqrt(2 * m + 3.0) * x * pmm
            else:
                a = np.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
                b = np.sqrt((2 * k + 1.0) * (k - 1 + m) * (k - 1 - m)
                            / ((2 * k - 3.0) * (k * k - m * m)))
                pk = a * x * pk1 - b * pk2
            out[k * k + k + m] = pk @ fmw[:, k_max + m]
            if m > 0:
                out[k * k + k - m] = sgn * (pk @ fmw[:, k_max - m])
            pk2, pk1 = pk1, pk
    return out


def _legendre_rows_np(x, degrees, offsets):
    """Table of pbar values for the requested degrees.

    Row offsets[j] + degrees[j] + M holds pbar(degrees[j], M, x) for
    M in [-degrees[j], degrees[j]], negative-order sign included.
    """
    n = x.size
    total = int(offsets[-1])
    out = np.zeros((total, n))
    k_hi = int(degrees[-1])
    row_of = -np.ones(k_hi + 1, dtype=np.int64)
    for j, l in enumerate(degrees):
        row_of[l] = offsets[j] + l
    s = np.sqrt(np.maximum(0.0, 1.0 - x * x))
    pmm = np.full(n, np.sqrt(1.0 / (4.0 * np.pi)))
    for m in range(k_hi + 1):
        if m > 0:
            pmm = -np.sqrt((2 * m + 1.0) / (2 * m)) * s * pmm
        pk1 = pmm
        pk2 = np.zeros(n)
        sgn = -1.0 if m % 2 else 1.0
        for k in range(m, k_hi + 1):
            if k == m:
                pk = pmm
            elif k == m + 1:
                pk = np.sqrt(2 * m + 3.0) * x * pmm
            else:
                a = np.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
                b = np.sqrt((2 * k + 1.0) * (k - 1 + m) * (k - 1 - m)
                            / ((2 * k - 3.0) * (k * k - m * m)))
                pk = a * x * pk1 - b * pk2
            r = row_of[k]
            if r >= 0:
                out[r + m] = pk
                if m > 0:
                    out[r - m] = sgn * pk
            pk2, pk1 = pk1, pk
    return out


def _assemble_block_np(U, V, C, l, lp, bw):
    """Banded coupling block B[i, d+bw] = sum_t U[i,t] V[i-d-l+lp,t] C[d+bw,t].

    Row index i corresponds to order M = i - l of the left degree l, column
    offset d = M - M' with M' the order of the right degree lp; C[d+bw] must
    hold the weighted azimuthal mode of the coupling field at mode d.
    """
    nl = 2 * l + 1
    B = np.zeros((nl, 2 * bw + 1), dtype=np.complex128)
    for d in range(-bw, bw + 1):
        i_lo = max(0, d + l - lp)
        i_hi = min(nl - 1, d + l + lp)
        if i_lo > i_hi:
            continue
        rows = slice(i_lo, i_hi + 1)
        vrows = slice(i_lo - d - l + lp, i_hi + 1 - d - l + lp)
        B[rows, d + bw] = (U[rows] * V[vrows]) @ C[d + bw]
    return B


def _banded_matvec_np(B, v, l, lp, bw):
    nl = 2 * l + 1
    out = np.zeros(nl, dtype=np.complex128)
    for d in range(-bw, bw + 1):
        i_lo = max(0, d + l - lp)
        i_hi = min(nl - 1, d + l + lp)
        if i_lo > i_hi:
            continue
        out[i_lo:i_hi + 1] += (B[i_lo:i_hi + 1, d + bw]
                               * v[i_lo - d - l + lp:i_hi + 1 - d - l + lp])
    return out


def _group_sums_np(a, b, a_idx, b_idx, grp_starts):
    prod = a[a_idx] * b[b_idx]
    return np.add.reduceat(prod, grp_starts[:-1])


def _scatter_normal_np(s_grp, other, grp_id, self_idx, other_idx, n_out):
    out = np.zeros(n_out, dtype=np.complex128)
    np.add.at(out, self_idx, np.conj(other[other_idx]) * s_grp[grp_id])
    return out


if NUMBA_ENABLED:

    @njit(cache=True, nogil=True, parallel=True)
    def _mspectrum_nb(coeffs, k_max, x):
        n = x.size
        out = np.zeros((n, 2 * k_max + 1), dtype=np.complex128)
        for m in prange(k_max + 1):
            sgn = -1.0 if m % 2 else 1.0
            for i in range(n):
                xi = x[i]
                si = np.sqrt(max(0.0, 1.0 - xi * xi))
                pmm = np.sqrt(1.0 / (4.0 * np.pi))
                for j in range(1, m + 1):
                    pmm = -np.sqrt((2 * j + 1.0) / (2 * j)) * si * pmm
                pk1 = 0.0
                pk2 = 0.0
                acc_p = 0.0 + 0.0j
                acc_m = 0.0 + 0.0j
                for k in range(m, k_max + 1):
                    if k == m:
                        pk = pmm
                    elif k == m + 1:
                        pk = np.sqrt(2 * m + 3.0) * xi * pmm
                    else:
                        a = np.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
                        b = np.sqrt((2 * k + 1.0) * (k - 1 + m) * (k - 1 - m)
                                    / ((2 * k - 3.0) * (k * k - m * m)))
                        pk = a * xi * pk1 - b * pk2
                    acc_p += coeffs[k * k + k + m] * pk
                    if m > 0:
                        acc_m += coeffs[k * k + k - m] * (sgn * pk)
                    pk2 = pk1
                    pk1 = pk
                out[i, k_max + m] = acc_p
                if m > 0:
                    out[i, k_max - m] = acc_m
        return out

    @njit(cache=True, nogil=True, parallel=True)
    def _accumulate_coeffs_nb(fmw, k_max, x):
        n = x.size
        out = np.zeros((k_max + 1) * (k_max + 1), dtype=np.complex128)
        for m in prange(k_max + 1):
            sgn = -1.0 if m % 2 else 1.0
            for i in range(n):
                xi = x[i]
                si = np.sqrt(max(0.0, 1.0 - xi * xi))
                pmm = np.sqrt(1.0 / (4.0 * np.pi))
                for j in range(1, m + 1):
                    pmm = -np.sqrt((2 * j + 1.0) / (2 * j)) * si * pmm
                pk1 = 0.0
                pk2 = 0.0
                fp = fmw[i, k_max + m]
                fm = fmw[i, k_max - m] if m > 0 else 0.0 + 0.0j
                for k in range(m, k_max + 1):
                    if k == m:
                        pk = pmm
                    elif k == m + 1:
                        pk = np.sqrt(2 * m + 3.0) * xi * pmm
                    else:
                        a = np.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
                        b = np.sqrt((2 * k + 1.0) * (k - 1 + m) * (k - 1 - m)
                                    / ((2 * k - 3.0) * (k * k - m * m)))
                        pk = a * xi * pk1 - b * pk2
                    out[k * k + k + m] += pk * fp
                    if m > 0:
                        out[k * k + k - m] += (sgn * pk) * fm
                    pk2 = pk1
                    pk1 = pk
        return out

    @njit(cache=True, nogil=True, parallel=True)
    def _legendre_rows_nb(x, degrees, offsets):
        n = x.size
        total = offsets[-1]
        out = np.zeros((total, n))
        k_hi = degrees[-1]
        row_of = -np.ones(k_hi + 1, dtype=np.int64)
        for j in range(degrees.size):
            row_of[degrees[j]] = offsets[j] + degrees[j]
        for m in prange(k_hi + 1):
            sgn = -1.0 if m % 2 else 1.0
            for i in range(n):
                xi = x[i]
                si = np.sqrt(max(0.0, 1.0 - xi * xi))
                pmm = np.sqrt(1.0 / (4.0 * np.pi))
                for j in range(1, m + 1):
                    pmm = -np.sqrt((2 * j + 1.0) / (2 * j)) * si * pmm
                pk1 = 0.0
                pk2 = 0.0
                for k in range(m, k_hi + 1):
                    if k == m:
                        pk = pmm
                    elif k == m + 1:
                        pk = np.sqrt(2 * m + 3.0) * xi * pmm
                    else:
                        a = np.sqrt((4.0 * k * k - 1.0) / (k * k - m * m))
                        b = np.sqrt((2 * k + 1.0) * (k - 1 + m) * (k - 1 - m)
                                    / ((2 * k - 3.0) * (k * k - m * m)))
                        pk = a * xi * pk1 - b * pk2
                    r = row_of[k]
                    if r >= 0:
                        out[r + m, i] = pk
                        if m > 0:
                            out[r - m, i] = sgn * pk
                    pk2 = pk1
                    pk1 = pk
        return out

    @njit(cache=True, nogil=True, parallel=True)
    def _assemble_block_nb(U, V, C, l, lp, bw):
        nl = 2 * l + 1
        nt = U.shape[1]
        B = np.zeros((nl, 2 * bw + 1), dtype=np.complex128)
        for i in prange(nl):
            for d in range(-bw, bw + 1):
                ip = i - d - l + lp
                if ip < 0 or ip > 2 * lp:
                    continue
                acc = 0.0 + 0.0j
                for t in range(nt):
                    acc += U[i, t] * V[ip, t] * C[d + bw, t]
                B[i, d + bw] = acc
        return B

    @njit(cache=True, nogil=True)
    def _banded_matvec_nb(B, v, l, lp, bw):
        nl = 2 * l + 1
        out = np.zeros(nl, dtype=np.complex128)
        for i in range(nl):
            acc = 0.0 + 0.0j
            for d in range(-bw, bw + 1):
                ip = i - d - l + lp
                if ip < 0 or ip > 2 * lp:
                    continue
                acc += B[i, d + bw] * v[ip]
            out[i] = acc
        return out

    @njit(cache=True, nogil=True, parallel=True)
    def _group_sums_nb(a, b, a_idx, b_idx, grp_starts):
        ng = grp_starts.size - 1
        s = np.empty(ng, dtype=np.complex128)
        for g in prange(ng):
            acc = 0.0 + 0.0j
            for j in range(grp_starts[g], grp_starts[g + 1]):
                acc += a[a_idx[j]] * b[b_idx[j]]
            s[g] = acc
        return s

    @njit(cache=True, nogil=True, parallel=True)
    def _scatter_normal_nb(s_grp, other, self_starts, self_vals,
                           other_idx_sorted, grp_id_sorted, n_out):
        out = np.zeros(n_out, dtype=np.complex128)
        nv = self_vals.size
        for q in prange(nv):
            acc = 0.0 + 0.0j
            for j in range(self_starts[q], self_starts[q + 1]):
                acc += np.conj(other[other_idx_sorted[j]]) * s_grp[grp_id_sorted[j]]
            out[self_vals[q]] = acc
        return out

    mspectrum = _mspectrum_nb
    accumulate_coeffs = _accumulate_coeffs_nb
    legendre_rows = _legendre_rows_nb
    assemble_block = _assemble_block_nb
    banded_matvec = _banded_matvec_nb
    group_sums = _group_sums_nb
    _scatter_impl = _scatter_normal_nb
else:
    mspectrum = _mspectrum_np
    accumulate_coeffs = _accumulate_coeffs_np
    legendre_rows = _legendre_rows_np
    assemble_block = _assemble_block_np
    banded_matvec = _banded_matvec_np
    group_sums = _group_sums_np

    def _scatter_impl(s_grp, other, self_starts, self_vals,
                      other_idx_sorted, grp_id_sorted, n_out):
        out = np.zeros(n_out, dtype=np.complex128)
        contrib = np.conj(other[other_idx_sorted]) * s_grp[grp_id_sorted]
        out[self_vals] = np.add.reduceat(contrib, self_starts[:-1])
        return out


def build_scatter_index(self_idx):
    """Precompute the sorted traversal used by :func:`scatter_normal`.

    Returns (order, starts, vals): ``order`` sorts the member list by the
    self index, ``vals`` are the distinct self indices, ``starts`` the run
    boundaries of each distinct value within the sorted order.
    """
    order = np.argsort(self_idx, kind="stable")
    sorted_idx = self_idx[order]
    vals, starts = np.unique(sorted_idx, return_index=True)
    starts = np.append(starts, sorted_idx.size).astype(np.int64)
    return order, starts, vals.astype(np.int64)


def scatter_normal(s_grp, other, grp_id_sorted, starts, vals,
                   other_idx_sorted, n_out):
    """out[n] = sum over members with self index n of conj(other[m]) s_grp[g]."""
    if vals.size == 0:
        return np.zeros(n_out, dtype=np.complex128)
    return _scatter_impl(s_grp, other, starts, vals,
                         other_idx_sorted, grp_id_sorted, n_out)
