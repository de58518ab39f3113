"""Backend selection for the hot-loop kernels.

Prefers the compiled extension (eavesim._core, built from _core.pyx) and
falls back to the numpy twin when the extension is missing. BACKEND names
the active implementation; both modules are importable individually for the
equivalence tests and the benchmark.
"""

try:
    from . import _core as _impl
except ImportError:  # extension not built
    from . import _core_py as _impl

BACKEND = _impl.BACKEND
shiryaev_path = _impl.shiryaev_path
run_episode_core = _impl.run_episode_core


def available_backends():
    """Importable kernel modules keyed by backend name."""
    from . import _core_py

    backends = {"python": _core_py}
    try:
        from . import _core

        backends["compiled"] = _core
    except ImportError:
        pass
    return backends
