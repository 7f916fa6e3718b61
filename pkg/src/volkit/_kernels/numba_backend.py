"""JIT-compiled kernels. Import fails if numba is unavailable."""
import numba

from . import _loops

BACKEND_NAME = "numba"

_jit = numba.njit(cache=True, nogil=True)

arch_filter = _jit(_loops.arch_filter)
garch11_filter = _jit(_loops.garch11_filter)
gjr_filter = _jit(_loops.gjr_filter)
egarch_filter = _jit(_loops.egarch_filter)
ewma_filter = _jit(_loops.ewma_filter)

arch_sim = _jit(_loops.arch_sim)
garch11_sim = _jit(_loops.garch11_sim)
gjr_sim = _jit(_loops.gjr_sim)
egarch_sim = _jit(_loops.egarch_sim)
ewma_sim = _jit(_loops.ewma_sim)

gbm_log_bars = _jit(_loops.gbm_log_bars)

sabr_varint = _jit(_loops.sabr_varint)
heston_varint = _jit(_loops.heston_varint)
stein_varint = _jit(_loops.stein_varint)
lambda_sabr_varint = _jit(_loops.lambda_sabr_varint)
