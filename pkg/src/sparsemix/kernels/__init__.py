"""Backend selection for the hot support-sum kernels.

The compiled Cython extension is preferred when it was built; otherwise the
numpy implementation (identical contract) is used.  `BACKEND` records which
one is active.
"""

from sparsemix.kernels import _esp_py

try:
    from sparsemix.kernels import _esp_cy as _impl

    BACKEND = "compiled"
except ImportError:
    _impl = _esp_py
    BACKEND = "python"

log_esp = _impl.log_esp
log_esp_with_loo = _impl.log_esp_with_loo


def backends():
    """All importable backend modules, keyed by name."""
    table = {"python": _esp_py}
    if BACKEND == "compiled":
        table["compiled"] = _impl
    return table
