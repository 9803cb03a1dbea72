"""Link-level codec and simulator kernels, backed by the C++ extension."""

try:
    from ._ncma import *  # noqa: F401,F403
except ImportError:  # extension built out-of-tree (e.g. straight from CMake)
    from _ncma import *  # noqa: F401,F403
