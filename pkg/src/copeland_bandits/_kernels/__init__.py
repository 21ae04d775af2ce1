"""Backend selection for the simulation hot loops.

The compiled Cython core (`_fastcore`) is used when the extension built;
otherwise the pure-Python reference loops in the learner modules take
over.  Both consume the RNG stream identically and produce bit-identical
traces, so the choice only affects speed.
"""
from __future__ import annotations

try:
    from . import _fastcore as _impl
except ImportError:  # extension not built; pure fallback
    _impl = None


def fastcore():
    return _impl


def backend_name() -> str:
    return "compiled" if _impl is not None else "pure"


def resolve(requested: str) -> str:
    """Map a backend request ("auto" | "compiled" | "pure") to a backend."""
    if requested == "pure":
        return "pure"
    if requested == "compiled":
        if _impl is None:
            raise RuntimeError(
                "compiled backend requested but the extension is not built; "
                "run `pip install -e . --no-build-isolation`"
            )
        return "compiled"
    if requested == "auto":
        return "compiled" if _impl is not None else "pure"
    raise ValueError(f"unknown backend {requested!r}")
