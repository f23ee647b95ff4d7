"""Baseline (RV64I only) and accelerated (scalar crypto + Zbkb) benchmark programs.

Programs are fully unrolled, the way an optimising compiler would emit a
single-block kernel. Baselines follow the usual portable-C structure: T-table
AES, four-table SM4, and shift/shift/or rotations for the hash functions.

Memory map (byte addresses)::

    KEY    0x01000   cipher key
    IN     0x01100   plaintext block
    W      0x02000   hash message schedule (first block words preloaded)
    RK     0x03000   expanded round keys
    OUT    0x03800   result
    CONST  0x04000   round constants, IVs
    TAB    0x10000   lookup tables

32-bit hash and SM4 words are stored as little-endian images of their
big-endian values, so a ``lwu`` yields the algorithm's word directly. The
harness performs that byte-order conversion for both variants alike.
"""

from __future__ import annotations

import struct

from cryptrisc.bench.asm import Asm, words_le
from cryptrisc.crypto_isa import AES_RCON, AES_SBOX, SM4_SBOX, BaseOp, CryptoOp
from cryptrisc.fields import rotl, xtime
from cryptrisc.pipeline import Program
from cryptrisc.reference import SHA256_IV, SHA256_K, SHA512_IV, SHA512_K, SM3_IV, SM4_CK, SM4_FK

KEY = 0x01000
IN = 0x01100
W = 0x02000
RK = 0x03000
OUT = 0x03800

SHA256_KT = 0x04000
SHA256_IVT = 0x04100
SHA512_KT = 0x04200
SHA512_IVT = 0x04500
SM3_TT = 0x04600
SM3_IVT = 0x04700
SM4_FKT = 0x04800
SM4_CKT = 0x04810

AES_TE = 0x10000  # four 1 KiB tables
AES_SB = 0x11000
SM4_TT = 0x12000  # four 1 KiB tables
SM4_SB = 0x13000

# scratch registers shared by the generators
T0, T1, T2, T3, T4, T5, T6, T7 = 9, 10, 11, 12, 13, 14, 15, 16
R_A, R_B, R_C, R_D = 17, 18, 19, 24  # extra temporaries
B_TAB = (20, 21, 22, 23)
B_MAIN, B_AUX, B_CONST, B_OUT = 31, 30, 29, 28


def _aes_te_tables() -> bytes:
    te0 = []
    for s in AES_SBOX:
        s2 = xtime(s)
        te0.append(s2 | (s << 8) | (s << 16) | ((s2 ^ s) << 24))
    return b"".join(words_le(rotl(v, 8 * r, 32) for v in te0) for r in range(4))


def _sm4_t_tables() -> bytes:
    base = []
    for s in SM4_SBOX:
        base.append(s ^ rotl(s, 2, 32) ^ rotl(s, 10, 32) ^ rotl(s, 18, 32) ^ rotl(s, 24, 32))
    return b"".join(words_le(rotl(v, 8 * b, 32) for v in base) for b in range(4))


def sm3_t_table() -> list[int]:
    return [rotl(0x79CC4519 if j < 16 else 0x7A879D8A, j % 32, 32) for j in range(64)]


CONST_DATA: dict[int, bytes] = {
    SHA256_KT: words_le(SHA256_K),
    SHA256_IVT: words_le(SHA256_IV),
    SHA512_KT: words_le(SHA512_K, 8),
    SHA512_IVT: words_le(SHA512_IV, 8),
    SM3_TT: words_le(sm3_t_table()),
    SM3_IVT: words_le(SM3_IV),
    SM4_FKT: words_le(SM4_FK),
    SM4_CKT: words_le(SM4_CK),
    AES_TE: _aes_te_tables(),
    AES_SB: bytes(AES_SBOX),
    SM4_TT: _sm4_t_tables(),
    SM4_SB: bytes(SM4_SBOX),
}


def _extract_byte(a: Asm, rd: int, rs: int, k: int) -> None:
    """rd <- byte k of the zero-extended 32-bit word in rs."""
    if k == 0:
        a.andi(rd, rs, 0xFF)
    elif k == 3:
        a.srliw(rd, rs, 24)
    else:
        a.srliw(rd, rs, 8 * k)
        a.andi(rd, rd, 0xFF)


def _word_lookup(a: Asm, rd: int, rs: int, k: int, base: int) -> None:
    """rd <- table[byte k of rs] for a table of 32-bit words at register ``base``."""
    _extract_byte(a, rd, rs, k)
    a.slli(rd, rd, 2)
    a.add(rd, rd, base)
    a.lwu(rd, rd)


def _byte_lookup(a: Asm, rd: int, rs: int, k: int, base: int) -> None:
    _extract_byte(a, rd, rs, k)
    a.add(rd, rd, base)
    a.lbu(rd, rd)


# ------------------------------------------------------------------- AES


def _aes_rounds(key_bytes: int) -> int:
    return {16: 10, 24: 12, 32: 14}[key_bytes]


def aes_accelerated(key_bytes: int) -> Program:
    nr = _aes_rounds(key_bytes)
    nk64 = key_bytes // 8
    a = Asm(zbkb=True)
    a.li(B_MAIN, KEY)
    a.li(B_AUX, RK)
    k = [1, 2, 3, 4][:nk64]
    for i, r in enumerate(k):
        a.ld(r, B_MAIN, 8 * i)
        a.sd(r, B_AUX, 8 * i)
    need = 2 * (nr + 1)
    done = nk64
    rnum = 0
    ks1, ks2 = CryptoOp.AES64_KS1, CryptoOp.AES64_KS2

    def put(reg: int) -> bool:
        nonlocal done
        a.sd(reg, B_AUX, 8 * done)
        done += 1
        return done >= need

    while done < need:
        a.crypto(ks1, T0, k[-1], imm=rnum)
        rnum += 1
        a.crypto(ks2, k[0], T0, k[0])
        if put(k[0]):
            break
        a.crypto(ks2, k[1], k[0], k[1])
        if put(k[1]):
            break
        if nk64 == 3:
            a.crypto(ks2, k[2], k[1], k[2])
            put(k[2])
        elif nk64 == 4:
            a.crypto(ks1, T0, k[1], imm=0xA)
            a.crypto(ks2, k[2], T0, k[2])
            if put(k[2]):
                break
            a.crypto(ks2, k[3], k[2], k[3])
            put(k[3])

    s0, s1 = 5, 6
    a.li(B_MAIN, IN)
    a.ld(s0, B_MAIN, 0)
    a.ld(s1, B_MAIN, 8)
    a.ld(T0, B_AUX, 0)
    a.ld(T1, B_AUX, 8)
    a.xor(s0, s0, T0)
    a.xor(s1, s1, T1)
    for r in range(1, nr + 1):
        op = CryptoOp.AES64_ENCS if r == nr else CryptoOp.AES64_ENCSM
        a.ld(T0, B_AUX, 16 * r)
        a.ld(T1, B_AUX, 16 * r + 8)
        a.crypto(op, T2, s0, s1)
        a.crypto(op, T3, s1, s0)
        a.xor(s0, T2, T0)
        a.xor(s1, T3, T1)
    a.li(B_OUT, OUT)
    a.sd(s0, B_OUT, 0)
    a.sd(s1, B_OUT, 8)
    return a.build(OUT, 16, f"aes{key_bytes * 8}-accel")


def _aes_sub_word(a: Asm, rd: int, rs: int, rot: bool, sbase: int) -> None:
    """rd <- SubWord(RotWord(rs)) (or SubWord only); rd must differ from rs."""
    for j in range(4):
        src = (j + 1) % 4 if rot else j
        dst = rd if j == 0 else T7
        _byte_lookup(a, dst, rs, src, sbase)
        if j:
            a.slli(T7, T7, 8 * j)
            a.or_(rd, rd, T7)


def aes_baseline(key_bytes: int) -> Program:
    nr = _aes_rounds(key_bytes)
    nk = key_bytes // 4
    a = Asm(zbkb=False)
    a.li(B_MAIN, KEY)
    a.li(B_AUX, RK)
    a.li(B_CONST, AES_SB)
    prev = 1
    for i in range(nk):
        a.lwu(prev, B_MAIN, 4 * i)
        a.sw(prev, B_AUX, 4 * i)
    for i in range(nk, 4 * (nr + 1)):
        if i % nk == 0:
            _aes_sub_word(a, T0, prev, True, B_CONST)
            a.ri(BaseOp.XORI, T0, T0, AES_RCON[i // nk - 1])
            tmp = T0
        elif nk > 6 and i % nk == 4:
            _aes_sub_word(a, T0, prev, False, B_CONST)
            tmp = T0
        else:
            tmp = prev
        a.lwu(T1, B_AUX, 4 * (i - nk))
        a.xor(prev, T1, tmp)
        a.sw(prev, B_AUX, 4 * i)

    for t, reg in enumerate(B_TAB):
        a.li(reg, AES_TE + 1024 * t)
    s = [1, 2, 3, 4]
    n = [5, 6, 7, 8]
    a.li(B_MAIN, IN)
    for c in range(4):
        a.lwu(s[c], B_MAIN, 4 * c)
        a.lwu(T0, B_AUX, 4 * c)
        a.xor(s[c], s[c], T0)
    for r in range(1, nr):
        for c in range(4):
            _word_lookup(a, n[c], s[c], 0, B_TAB[0])
            for row in range(1, 4):
                _word_lookup(a, T0, s[(c + row) % 4], row, B_TAB[row])
                a.xor(n[c], n[c], T0)
            a.lwu(T0, B_AUX, 16 * r + 4 * c)
            a.xor(n[c], n[c], T0)
        s, n = n, s
    # last round: plain S-box, no MixColumns
    for c in range(4):
        _byte_lookup(a, n[c], s[c], 0, B_CONST)
        for row in range(1, 4):
            _byte_lookup(a, T0, s[(c + row) % 4], row, B_CONST)
            a.slli(T0, T0, 8 * row)
            a.or_(n[c], n[c], T0)
        a.lwu(T0, B_AUX, 16 * nr + 4 * c)
        a.xor(n[c], n[c], T0)
    a.li(B_OUT, OUT)
    for c in range(4):
        a.sw(n[c], B_OUT, 4 * c)
    return a.build(OUT, 16, f"aes{key_bytes * 8}-base")


# --------------------------------------------------------------- SHA-256


def _sha256_sigma(a: Asm, op: CryptoOp, rd: int, rs: int) -> None:
    if a.zbkb:
        a.crypto(op, rd, rs)
        return
    rots, shr = {
        CryptoOp.SHA256_SIG0: ((7, 18), 3),
        CryptoOp.SHA256_SIG1: ((17, 19), 10),
        CryptoOp.SHA256_SUM0: ((2, 13, 22), None),
        CryptoOp.SHA256_SUM1: ((6, 11, 25), None),
    }[op]
    a.rotr32(rd, rs, rots[0], T7)
    for n in rots[1:]:
        a.rotr32(R_A, rs, n, T7)
        a.xor(rd, rd, R_A)
    if shr is not None:
        a.srliw(R_A, rs, shr)
        a.xor(rd, rd, R_A)


def _sha512_sigma(a: Asm, op: CryptoOp, rd: int, rs: int) -> None:
    if a.zbkb:
        a.crypto(op, rd, rs)
        return
    rots, shr = {
        CryptoOp.SHA512_SIG0: ((1, 8), 7),
        CryptoOp.SHA512_SIG1: ((19, 61), 6),
        CryptoOp.SHA512_SUM0: ((28, 34, 39), None),
        CryptoOp.SHA512_SUM1: ((14, 18, 41), None),
    }[op]
    a.rotr64(rd, rs, rots[0], T7)
    for n in rots[1:]:
        a.rotr64(R_A, rs, n, T7)
        a.xor(rd, rd, R_A)
    if shr is not None:
        a.srli(R_A, rs, shr)
        a.xor(rd, rd, R_A)


def _sha2(accel: bool, wide: bool) -> Program:
    a = Asm(zbkb=accel)
    if wide:
        size, rounds, kt, ivt = 8, 80, SHA512_KT, SHA512_IVT
        sigma = _sha512_sigma
        sig0, sig1 = CryptoOp.SHA512_SIG0, CryptoOp.SHA512_SIG1
        sum0, sum1 = CryptoOp.SHA512_SUM0, CryptoOp.SHA512_SUM1
        load, store, addn = a.ld, a.sd, a.add
    else:
        size, rounds, kt, ivt = 4, 64, SHA256_KT, SHA256_IVT
        sigma = _sha256_sigma
        sig0, sig1 = CryptoOp.SHA256_SIG0, CryptoOp.SHA256_SIG1
        sum0, sum1 = CryptoOp.SHA256_SUM0, CryptoOp.SHA256_SUM1
        load, store, addn = a.lwu, a.sw, a.addw
    a.li(B_MAIN, W)
    a.li(B_AUX, kt)
    a.li(B_CONST, ivt)
    for t in range(16, rounds):
        load(T0, B_MAIN, size * (t - 15))
        sigma(a, sig0, T1, T0)
        load(T0, B_MAIN, size * (t - 2))
        sigma(a, sig1, T2, T0)
        load(T3, B_MAIN, size * (t - 16))
        load(T4, B_MAIN, size * (t - 7))
        addn(T1, T1, T2)
        addn(T1, T1, T3)
        addn(T1, T1, T4)
        store(T1, B_MAIN, size * t)

    regs = list(range(1, 9))
    for i, r in enumerate(regs):
        load(r, B_CONST, size * i)
    for t in range(rounds):
        ra, rb, rc, rd, re, rf, rg, rh = regs
        load(T0, B_AUX, size * t)
        load(T1, B_MAIN, size * t)
        sigma(a, sum1, T2, re)
        a.xor(T3, rf, rg)
        a.and_(T3, T3, re)
        a.xor(T3, T3, rg)
        addn(T4, rh, T2)
        addn(T4, T4, T3)
        addn(T4, T4, T0)
        addn(T4, T4, T1)
        sigma(a, sum0, T2, ra)
        a.or_(T3, ra, rb)
        a.and_(T3, T3, rc)
        a.and_(T5, ra, rb)
        a.or_(T3, T3, T5)
        addn(T2, T2, T3)
        addn(rd, rd, T4)
        addn(rh, T4, T2)
        regs = [rh, ra, rb, rc, rd, re, rf, rg]
    a.li(B_OUT, OUT)
    for i, r in enumerate(regs):
        load(T0, B_CONST, size * i)
        addn(r, r, T0)
        store(r, B_OUT, size * i)
    name = ("sha512" if wide else "sha256") + ("-accel" if accel else "-base")
    return a.build(OUT, 8 * size, name)


def sha256_program(accel: bool) -> Program:
    return _sha2(accel, wide=False)


def sha512_program(accel: bool) -> Program:
    return _sha2(accel, wide=True)


# ------------------------------------------------------------------- SM3


def _sm3_perm(a: Asm, op: CryptoOp, rd: int, rs: int) -> None:
    """rd <- P0/P1(rs); rd may equal rs."""
    if a.zbkb:
        a.crypto(op, rd, rs)
        return
    r1, r2 = (9, 17) if op is CryptoOp.SM3_P0 else (15, 23)
    a.rotl32(R_A, rs, r1, T7)
    a.rotl32(R_B, rs, r2, T7)
    a.xor(rd, rs, R_A)
    a.xor(rd, rd, R_B)


def sm3_program(accel: bool) -> Program:
    a = Asm(zbkb=accel)
    a.li(B_MAIN, W)
    a.li(B_AUX, SM3_TT)
    a.li(B_CONST, SM3_IVT)
    for j in range(16, 68):
        a.lwu(T0, B_MAIN, 4 * (j - 16))
        a.lwu(T1, B_MAIN, 4 * (j - 9))
        a.xor(T0, T0, T1)
        a.lwu(T1, B_MAIN, 4 * (j - 3))
        a.rotl32(T1, T1, 15, T7)
        a.xor(T0, T0, T1)
        _sm3_perm(a, CryptoOp.SM3_P1, T2, T0)
        a.lwu(T1, B_MAIN, 4 * (j - 13))
        a.rotl32(T1, T1, 7, T7)
        a.xor(T2, T2, T1)
        a.lwu(T1, B_MAIN, 4 * (j - 6))
        a.xor(T2, T2, T1)
        a.sw(T2, B_MAIN, 4 * j)

    regs = list(range(1, 9))
    for i, r in enumerate(regs):
        a.lwu(r, B_CONST, 4 * i)
    for j in range(64):
        ra, rb, rc, rd, re, rf, rg, rh = regs
        a.rotl32(T0, ra, 12, T7)
        a.lwu(T1, B_AUX, 4 * j)
        a.addw(T2, T0, re)
        a.addw(T2, T2, T1)
        a.rotl32(T2, T2, 7, T7)  # SS1
        a.xor(T3, T2, T0)  # SS2
        if j < 16:
            a.xor(T4, ra, rb)
            a.xor(T4, T4, rc)
            a.xor(T5, re, rf)
            a.xor(T5, T5, rg)
        else:
            a.or_(T4, ra, rb)
            a.and_(T4, T4, rc)
            a.and_(T6, ra, rb)
            a.or_(T4, T4, T6)
            a.xor(T5, rf, rg)
            a.and_(T5, T5, re)
            a.xor(T5, T5, rg)
        a.lwu(T0, B_MAIN, 4 * j)
        a.lwu(T1, B_MAIN, 4 * (j + 4))
        a.xor(T1, T1, T0)
        a.addw(rd, rd, T4)  # TT1 accumulates in d's register
        a.addw(rd, rd, T3)
        a.addw(rd, rd, T1)
        a.addw(rh, rh, T5)  # TT2 accumulates in h's register
        a.addw(rh, rh, T2)
        a.addw(rh, rh, T0)
        _sm3_perm(a, CryptoOp.SM3_P0, rh, rh)
        a.rotl32(rb, rb, 9, T7)
        a.rotl32(rf, rf, 19, T7)
        regs = [rd, ra, rb, rc, rh, re, rf, rg]
    a.li(B_OUT, OUT)
    for i, r in enumerate(regs):
        a.lwu(T0, B_CONST, 4 * i)
        a.xor(r, r, T0)
        a.sw(r, B_OUT, 4 * i)
    return a.build(OUT, 32, "sm3-accel" if accel else "sm3-base")


# ------------------------------------------------------------------- SM4


def _sm4_key_t(a: Asm, acc: int, x: int) -> None:
    """acc ^= L'(S(x)) with the key-schedule linear map."""
    if a.zbkb:
        for bs in range(4):
            a.crypto(CryptoOp.SM4_KS, acc, acc, x, bs)
        return
    for bs in range(4):
        dst = T3 if bs == 0 else T4
        _byte_lookup(a, dst, x, bs, B_CONST)
        if bs:
            a.slli(T4, T4, 8 * bs)
            a.or_(T3, T3, T4)
    a.rotl32(R_A, T3, 13, T7)
    a.rotl32(R_B, T3, 23, T7)
    a.xor(acc, acc, T3)
    a.xor(acc, acc, R_A)
    a.xor(acc, acc, R_B)


def _sm4_round_t(a: Asm, acc: int, x: int) -> None:
    """acc ^= L(S(x)) with the encryption linear map."""
    if a.zbkb:
        for bs in range(4):
            a.crypto(CryptoOp.SM4_ED, acc, acc, x, bs)
        return
    for bs in range(4):
        _word_lookup(a, T3, x, bs, B_TAB[bs])
        a.xor(acc, acc, T3)


def sm4_program(accel: bool) -> Program:
    a = Asm(zbkb=accel)
    a.li(B_MAIN, KEY)
    a.li(B_AUX, RK)
    a.li(B_OUT, SM4_FKT)
    if not accel:
        a.li(B_CONST, SM4_SB)
        for t, reg in enumerate(B_TAB):
            a.li(reg, SM4_TT + 1024 * t)
    k = [1, 2, 3, 4]
    for i, r in enumerate(k):
        a.lwu(r, B_MAIN, 4 * i)
        a.lwu(T0, B_OUT, 4 * i)
        a.xor(r, r, T0)
    for i in range(32):
        a.xor(T1, k[1], k[2])
        a.xor(T1, T1, k[3])
        a.lwu(T0, B_OUT, SM4_CKT - SM4_FKT + 4 * i)
        a.xor(T1, T1, T0)
        _sm4_key_t(a, k[0], T1)
        a.sw(k[0], B_AUX, 4 * i)
        k = k[1:] + k[:1]

    x = [5, 6, 7, 8]
    a.li(B_MAIN, IN)
    for i, r in enumerate(x):
        a.lwu(r, B_MAIN, 4 * i)
    for i in range(32):
        a.xor(T1, x[1], x[2])
        a.xor(T1, T1, x[3])
        a.lwu(T0, B_AUX, 4 * i)
        a.xor(T1, T1, T0)
        _sm4_round_t(a, x[0], T1)
        x = x[1:] + x[:1]
    a.li(B_OUT, OUT)
    for i, r in enumerate(reversed(x)):
        a.sw(r, B_OUT, 4 * i)
    return a.build(OUT, 16, "sm4-accel" if accel else "sm4-base")


# --------------------------------------------------------- data encoding


def be_words_to_le_image(data: bytes, width: int = 4) -> bytes:
    """Re-store big-endian words as little-endian images (harness byte swap)."""
    fmt = "I" if width == 4 else "Q"
    n = len(data) // width
    return struct.pack(f"<{n}{fmt}", *struct.unpack(f">{n}{fmt}", data))


def le_image_to_be_words(data: bytes, width: int = 4) -> bytes:
    return be_words_to_le_image(data, width)

