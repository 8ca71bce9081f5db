"""Compiled statevector kernels; qubit mask i maps to index bit n-1-i."""

import numpy as np
from numba import njit

# parity of the low 16 bits, table-driven; masks fit because n <= 16
_v = np.arange(1 << 16, dtype=np.uint32)
_v ^= _v >> 8
_v ^= _v >> 4
_v ^= _v >> 2
_v ^= _v >> 1
PARITY16 = (_v & 1).astype(np.int8)
del _v


@njit(cache=True)
def matvec(psi, out, diag, ax, az, w, parity):
    # one source, two compiled specializations: all-real and complex
    N = psi.shape[0]
    for j in range(N):
        out[j] = diag[j] * psi[j]
    for t in range(ax.shape[0]):
        a = ax[t]
        z = az[t]
        wt = w[t]
        for j in range(N):
            amp = wt * psi[j ^ a]
            if parity[(j ^ a) & z]:
                out[j] -= amp
            else:
                out[j] += amp
    return out
