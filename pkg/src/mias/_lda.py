"""Compiled inner loops for collapsed Gibbs sampling.

The kernels mirror the reference sweep in `topics` exactly: one pre-drawn
uniform per token, sequential cumulative sums, and the same floating-point
operation order, so compiled and reference sweeps are bit-identical.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def gibbs_sweep(tokens, doc_ids, zs, nkw, nk, ndk, alpha, beta, vbeta, uniforms):
    k = nk.shape[0]
    for i in range(tokens.shape[0]):
        w = tokens[i]
        d = doc_ids[i]
        z = zs[i]
        nkw[z, w] -= 1
        nk[z] -= 1
        ndk[d, z] -= 1
        total = 0.0
        for c in range(k):
            total += (nkw[c, w] + beta) * (ndk[d, c] + alpha) / (nk[c] + vbeta)
        r = uniforms[i] * total
        acc = 0.0
        z = k - 1
        for c in range(k):
            acc += (nkw[c, w] + beta) * (ndk[d, c] + alpha) / (nk[c] + vbeta)
            if r < acc:
                z = c
                break
        zs[i] = z
        nkw[z, w] += 1
        nk[z] += 1
        ndk[d, z] += 1


@njit(cache=True)
def infer_sweep(tokens, zs, nd, nkw, nk, alpha, beta, vbeta, uniforms):
    k = nk.shape[0]
    for i in range(tokens.shape[0]):
        w = tokens[i]
        nd[zs[i]] -= 1
        total = 0.0
        for c in range(k):
            total += (nkw[c, w] + beta) * (nd[c] + alpha) / (nk[c] + vbeta)
        r = uniforms[i] * total
        acc = 0.0
        z = k - 1
        for c in range(k):
            acc += (nkw[c, w] + beta) * (nd[c] + alpha) / (nk[c] + vbeta)
            if r < acc:
                z = c
                break
        zs[i] = z
        nd[z] += 1
