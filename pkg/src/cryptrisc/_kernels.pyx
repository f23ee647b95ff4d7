# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_kernels_py.py`` for the reference semantics."""

from libc.stdint cimport uint8_t, uint64_t

from cryptrisc.fields import GF_INV_TABLE, GF_MUL_TABLE

BACKEND = "cython"

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil

cdef uint8_t MUL[65536]
cdef uint8_t INV[256]

cdef bytes _mul = GF_MUL_TABLE
cdef bytes _inv = GF_INV_TABLE
cdef int _i
for _i in range(65536):
    MUL[_i] = _mul[_i]
for _i in range(256):
    INV[_i] = _inv[_i]

cdef uint64_t M60 = (<uint64_t>1 << 60) - 1


cdef inline uint64_t _advance(uint64_t r) nogil:
    cdef uint64_t low = (r ^ (r >> 1) ^ (r >> 3) ^ (r >> 4)) & M60
    return (r ^ ((r >> 1) | (low << 63)) ^ ((r >> 3) | (low << 61))
            ^ ((r >> 4) | (low << 60)))


cdef inline uint64_t _fwd(uint64_t x, uint64_t a, uint64_t b) nogil:
    cdef uint64_t out = 0
    cdef int sh
    for sh in range(0, 64, 8):
        out |= (<uint64_t>MUL[(((a >> sh) & 0xFF) << 8) | ((x >> sh) & 0xFF)]) << sh
    return out ^ b


cdef inline uint64_t _inv64(uint64_t y, uint64_t a, uint64_t b) nogil:
    cdef uint64_t out = 0
    cdef int sh
    y ^= b
    for sh in range(0, 64, 8):
        out |= (<uint64_t>MUL[(<uint64_t>INV[(a >> sh) & 0xFF] << 8) | ((y >> sh) & 0xFF)]) << sh
    return out


def lfsr_advance64(uint64_t state):
    return _advance(state)


def affine_fwd64(uint64_t x, uint64_t a, uint64_t b):
    return _fwd(x, a, b)


def affine_inv64(uint64_t y, uint64_t a, uint64_t b):
    return _inv64(y, a, b)


def sub_bytes64(uint64_t x, const uint8_t[:] sbox):
    cdef uint64_t out = 0
    cdef int sh
    for sh in range(0, 64, 8):
        out |= (<uint64_t>sbox[(x >> sh) & 0xFF]) << sh
    return out


def popcount64(uint64_t x):
    return __builtin_popcountll(x)


def affine_roundtrip_failures():
    # eight lanes per word: lane i of word w carries x = 8*w + i
    cdef uint64_t failures = 0
    cdef uint64_t a, b, aw, bw, xw, y, back
    cdef int w, i
    for a in range(1, 256):
        aw = a * <uint64_t>0x0101010101010101
        for b in range(256):
            bw = b * <uint64_t>0x0101010101010101
            for w in range(32):
                xw = 0
                for i in range(8):
                    xw |= (<uint64_t>(8 * w + i)) << (8 * i)
                y = _fwd(xw, aw, bw)
                back = _inv64(y, aw, bw)
                if back != xw:
                    for i in range(8):
                        if ((back >> (8 * i)) & 0xFF) != ((xw >> (8 * i)) & 0xFF):
                            failures += 1
    return failures
