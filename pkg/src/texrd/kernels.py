"""Kernel dispatch: the compiled extension when present, numpy otherwise.

Set ``TEXRD_PURE_PYTHON=1`` to force the numpy implementations.
"""

import logging
import os

from . import _pykernels

logger = logging.getLogger(__name__)

_impl = _pykernels
if not os.environ.get("TEXRD_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl
    except ImportError:  # pragma: no cover - depends on the build
        logger.debug("compiled kernels unavailable, using numpy fallback")

IMPL = _impl.IMPL
glcm_counts = _impl.glcm_counts
ncc_peaks = _impl.ncc_peaks
build_tree = _impl.build_tree
predict_tree = _impl.predict_tree
template_origins = _pykernels.template_origins

__all__ = ["IMPL", "glcm_counts", "ncc_peaks", "build_tree", "predict_tree", "template_origins"]
