"""Maximum-correlation test statistics computed from an n x p data matrix.

Rows are observations, columns are variates. All pair scans run over
``i < j`` in lexicographic order, so the reported ``argmax_pair`` is the
smallest pair among exact ties.
"""
import csv
from dataclasses import dataclass

import numpy as np

from .numerics import clipped_log, clipped_loglog

__all__ = [
    "DegenerateColumnError",
    "StatValue",
    "as_data_matrix",
    "as_block_sample",
    "load_csv",
    "centering_constant",
    "max_abs_correlation",
    "split_correlations",
    "statistic_L_tilde",
    "statistic_W",
    "statistic_W_general",
    "statistic_L_general",
    "mutual_coherence",
]

KINDS = ("L_tilde_centered", "W_n", "W_pn_general", "L_pn_general")


class DegenerateColumnError(ValueError):
    """A column has zero variance (or zero norm) so correlations are undefined."""

    def __init__(self, column, what="sample variance"):
        self.column = column
        super().__init__(f"column {column} has zero {what}")


@dataclass(frozen=True)
class StatValue:
    kind: str
    value: float
    p: int
    n: int
    d: int
    argmax_pair: tuple

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown statistic kind {self.kind!r}")


def as_data_matrix(data, min_rows=2, min_cols=2):
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"data must be a 2-d n x p array, got shape {x.shape}")
    n, p = x.shape
    if n < min_rows or p < min_cols:
        raise ValueError(f"need n >= {min_rows} and p >= {min_cols}, got n={n}, p={p}")
    if not np.all(np.isfinite(x)):
        raise ValueError("data contains non-finite values")
    return x


def as_block_sample(blocks):
    """Stack ``d`` equally shaped n x p blocks into a ``(d, n, p)`` array."""
    if isinstance(blocks, np.ndarray) and blocks.ndim == 2:
        blocks = blocks[None]
    arr = np.asarray([np.asarray(b, dtype=float) for b in blocks])
    if arr.ndim != 3:
        raise ValueError("blocks must all be 2-d arrays of one shape")
    d, n, p = arr.shape
    if d < 1 or n < 1 or p < 2:
        raise ValueError(f"need d >= 1, n >= 1, p >= 2, got d={d}, n={n}, p={p}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("blocks contain non-finite values")
    return arr


def _is_number(cell):
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv(path):
    """Read an observations x variates CSV; a non-numeric first row is a header.

    Returns ``(values, header)`` where ``header`` is ``None`` when absent.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows:
        raise ValueError(f"{path}: no data")
    header = None
    if not all(_is_number(c) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if not rows:
        raise ValueError(f"{path}: header only, no data rows")
    width = len(header) if header is not None else len(rows[0])
    values = np.empty((len(rows), width))
    line0 = 2 if header is not None else 1
    for r, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"{path}: row {r + line0} has {len(row)} cells, expected {width}")
        for c, cell in enumerate(row):
            try:
                values[r, c] = float(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: malformed cell {cell!r} at row {r + line0}, column {c + 1}"
                ) from None
    return values, header


def centering_constant(p, d):
    """``4 log p - (2 - d) log log p`` with the clipped logarithm."""
    return 4.0 * clipped_log(p) - (2 - d) * clipped_loglog(p)


def _upper_max(mat):
    """Max over the strict upper triangle and its lexicographically first argmax."""
    p = mat.shape[-1]
    iu, ju = np.triu_indices(p, 1)
    vals = mat[..., iu, ju]
    k = int(np.argmax(vals))
    return float(vals[k]), (int(iu[k]), int(ju[k]))


def _center(x):
    xc = x - x.mean(axis=0)
    ss = np.einsum("ki,ki->i", xc, xc)
    bad = np.flatnonzero(~(ss > 0))
    if bad.size:
        raise DegenerateColumnError(int(bad[0]))
    return xc, ss


def split_correlations(data):
    """Squared full-sample correlations and split-sample ``r_{i,j}^2`` matrices.

    ``A`` sums the centred cross-products over the first ``n // 2`` rows and
    ``B`` over the rest, both centred by the full-sample means.
    Returns ``(rho2, r2)``, each p x p.
    """
    x = as_data_matrix(data, min_rows=2)
    xc, ss = _center(x)
    h = x.shape[0] // 2
    a = xc[:h].T @ xc[:h]
    b = xc[h:].T @ xc[h:]
    denom = np.outer(ss, ss)
    return (a + b) ** 2 / denom, 2.0 * (a * a + b * b) / denom


def max_abs_correlation(data):
    """Largest absolute off-diagonal Pearson correlation and its column pair."""
    x = as_data_matrix(data, min_rows=2)
    xc, ss = _center(x)
    corr = (xc.T @ xc) / np.sqrt(np.outer(ss, ss))
    value, pair = _upper_max(np.abs(corr))
    return min(value, 1.0), pair


def statistic_L_tilde(data):
    """``n * Ltilde^2 - 4 log p + log log p``."""
    x = as_data_matrix(data, min_rows=2)
    n, p = x.shape
    lt, pair = max_abs_correlation(x)
    value = n * lt * lt - 4.0 * clipped_log(p) + clipped_loglog(p)
    return StatValue("L_tilde_centered", value, p, n, 1, pair)


def statistic_W(data):
    """``n * max r_{i,j}^2 - 4 log p`` for the split-sample statistic."""
    x = as_data_matrix(data, min_rows=4)
    n, p = x.shape
    _, r2 = split_correlations(x)
    l2, pair = _upper_max(r2)
    return StatValue("W_n", n * l2 - 4.0 * clipped_log(p), p, n, 2, pair)


def _block_gram_sq(arr):
    # sum over blocks of squared Gram matrices: ||sum_k X_{k,i,j}||^2
    gram = np.einsum("mki,mkj->mij", arr, arr)
    return np.einsum("mij,mij->ij", gram, gram)


def statistic_W_general(blocks):
    """``W_{p,n}^2 / n - alpha_p`` for a d-block sample of shape (d, n, p)."""
    arr = as_block_sample(blocks)
    d, n, p = arr.shape
    w2, pair = _upper_max(_block_gram_sq(arr))
    return StatValue("W_pn_general", w2 / n - centering_constant(p, d), p, n, d, pair)


def statistic_L_general(blocks):
    """``d^2 n L_{p,n}^2 - alpha_p``, the self-normalised d-block statistic."""
    arr = as_block_sample(blocks)
    d, n, p = arr.shape
    a = np.einsum("mki,mki->i", arr, arr)
    bad = np.flatnonzero(~(a > 0))
    if bad.size:
        raise DegenerateColumnError(int(bad[0]), "sum of squares")
    l2, pair = _upper_max(_block_gram_sq(arr) / np.outer(a, a))
    value = d * d * n * l2 - centering_constant(p, d)
    return StatValue("L_pn_general", value, p, n, d, pair)


def mutual_coherence(dictionary):
    """Largest ``|<a_i, a_j>| / (||a_i|| ||a_j||)`` over distinct raw (uncentred) columns."""
    x = as_data_matrix(dictionary, min_rows=1)
    norms = np.sqrt(np.einsum("ki,ki->i", x, x))
    bad = np.flatnonzero(~(norms > 0))
    if bad.size:
        raise DegenerateColumnError(int(bad[0]), "norm")
    g = (x.T @ x) / np.outer(norms, norms)
    value, pair = _upper_max(np.abs(g))
    return min(value, 1.0), pair

