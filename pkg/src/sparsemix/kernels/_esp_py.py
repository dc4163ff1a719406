"""Pure-numpy log-space elementary-symmetric-polynomial recurrences.

Given log-ratios t_j, these compute log e_d(exp(t)) where e_d is the
elementary symmetric polynomial of degree d, plus the leave-one-out values
log e_{d-1}(exp(t) without entry j) needed for per-coordinate inclusion
responsibilities.  The prefix scans run through np.logaddexp.accumulate so
the sequential recurrence stays in C.
"""

import numpy as np

NEG_INF = -np.inf


def _prefix_table(log_x, d_max):
    # table[b, j, d] = log e_d over the first j entries of row b
    n_rows, p = log_x.shape
    table = np.full((n_rows, p + 1, d_max + 1), NEG_INF)
    table[:, :, 0] = 0.0
    for d in range(1, d_max + 1):
        terms = log_x + table[:, :-1, d - 1]
        table[:, 1:, d] = np.logaddexp.accumulate(terms, axis=1)
    return table

def log_esp(log_x, d_max):
    """log elementary symmetric polynomials e_0..e_d_max of exp(log_x).

    Parameters
    ----------
    log_x : ndarray, shape (p,) or (n_rows, p)
        Logarithms of the (nonnegative) inputs; -inf encodes a zero input.
    d_max : int
        Highest degree to compute, 0 <= d_max <= p.

    Returns
    -------
    ndarray, shape (..., d_max + 1), with entry d equal to log e_d.
    """
    squeeze = log_x.ndim == 1
    log_x = np.atleast_2d(np.asarray(log_x, dtype=np.float64))
    p = log_x.shape[1]
    if not 0 <= d_max <= p:
        raise ValueError(f"degree {d_max} out of range for {p} inputs")
    out = _prefix_table(log_x, d_max)[:, p, :]
    return out[0] if squeeze else out

def log_esp_with_loo(log_x, d):
    """log e_d over full rows together with leave-one-out log e_{d-1}.

    Returns (total, loo) where total[b] = log e_d(row b) and
    loo[b, j] = log e_{d-1}(row b with entry j removed).
    """
    squeeze = log_x.ndim == 1
    log_x = np.atleast_2d(np.asarray(log_x, dtype=np.float64))
    n_rows, p = log_x.shape
    if not 1 <= d <= p:
        raise ValueError(f"degree {d} out of range for {p} inputs")
    fwd = _prefix_table(log_x, d - 1)
    bwd = _prefix_table(log_x[:, ::-1], d - 1)[:, ::-1, :]
    # combine prefix (entries < j) with suffix (entries > j):
    # e_{d-1}(without j) = sum_k e_k(prefix_j) * e_{d-1-k}(suffix_j)
    pieces = fwd[:, :p, :] + bwd[:, 1:, ::-1]
    loo = _logsumexp_last(pieces)
    # total e_d: each size-d subset counted once, at its largest member
    terms = log_x + fwd[:, :-1, d - 1]
    total = _logsumexp_last(terms)
    if squeeze:
        return total[0], loo[0]
    return total, loo

def _logsumexp_last(a):
    hi = np.max(a, axis=-1)
    safe_hi = np.where(np.isfinite(hi), hi, 0.0)
    with np.errstate(divide="ignore"):
        out = safe_hi + np.log(np.sum(np.exp(a - safe_hi[..., None]), axis=-1))
    return np.where(np.isfinite(hi), out, hi)
