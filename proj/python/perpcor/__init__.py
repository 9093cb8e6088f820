"""Pretraining data selection from perplexity-benchmark correlations."""

import importlib.util
import os


def _load_build_tree_module(directory):
    for name in sorted(os.listdir(directory)):
        if name.startswith("_perpcor") and name.endswith((".so", ".pyd")):
            path = os.path.join(directory, name)
            spec = importlib.util.spec_from_file_location("_perpcor", path)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    raise ImportError("no _perpcor extension found in " + directory)


try:
    from . import _perpcor as _core
except ImportError as exc:
    _dir = os.environ.get("PERPCOR_MODULE_DIR")
    if not _dir:
        raise ImportError(
            "the _perpcor extension is not built; install the package or "
            "set PERPCOR_MODULE_DIR to the build directory"
        ) from exc
    _core = _load_build_tree_module(_dir)

globals().update(
    {name: value for name, value in vars(_core).items()
     if not name.startswith("_")}
)

__version__ = "1.0.0"
__all__ = [name for name in vars(_core) if not name.startswith("_")]
