"""Kernel backend selection.

The compiled extension (built from _core.py by Cython) shadows the source
file when present; otherwise the same file runs interpreted.  Setting
TETHERSIM_PURE=1 in the environment forces the interpreted kernel even when
the extension exists, which the benchmark uses to compare backends.
"""

import importlib.util
import os
import sys
from pathlib import Path


def _load_pure():
    path = Path(__file__).with_name("_core.py")
    spec = importlib.util.spec_from_file_location("tethersim._kernels._core_pure", path)
    module = importlib.util.module_from_spec(spec)
    sys.modules[spec.name] = module
    spec.loader.exec_module(module)
    return module


if os.environ.get("TETHERSIM_PURE") == "1":
    core = _load_pure()
else:
    from . import _core as core

COMPILED = bool(getattr(core, "COMPILED", False))
