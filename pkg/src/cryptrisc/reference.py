"""Straightforward software references for the benchmark algorithms.

These are deliberately written from the algorithm definitions and share no
code with :mod:`cryptrisc.crypto_isa`; they act as the oracles that the
instruction-level compositions and the simulated benchmark programs are checked
against. The AES S-box is derived from GF(2^8) inversion plus the affine map
rather than copied as a table.
"""

from __future__ import annotations

import struct

# --------------------------------------------------------------------- AES


def _xt(a: int) -> int:
    a <<= 1
    return (a ^ 0x1B) & 0xFF if a & 0x100 else a


def _gmul(a: int, b: int) -> int:
    p = 0
    for _ in range(8):
        if b & 1:
            p ^= a
        a = _xt(a)
        b >>= 1
    return p


def _derive_aes_sbox() -> tuple[bytes, bytes]:
    sbox = bytearray(256)
    for x in range(256):
        inv = 0 if x == 0 else next(y for y in range(1, 256) if _gmul(x, y) == 1)
        s = inv
        for k in range(1, 5):
            s ^= ((inv << k) | (inv >> (8 - k))) & 0xFF
        sbox[x] = s ^ 0x63
    inv_sbox = bytearray(256)
    for x, s in enumerate(sbox):
        inv_sbox[s] = x
    return bytes(sbox), bytes(inv_sbox)


AES_SBOX, AES_INV_SBOX = _derive_aes_sbox()
_RCON = (0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1B, 0x36)


def aes_expand_key(key: bytes) -> list[bytes]:
    nk = len(key) // 4
    if len(key) not in (16, 24, 32):
        raise ValueError("AES key must be 16, 24 or 32 bytes")
    nr = nk + 6
    words = [list(key[4 * i : 4 * i + 4]) for i in range(nk)]
    for i in range(nk, 4 * (nr + 1)):
        t = list(words[i - 1])
        if i % nk == 0:
            t = t[1:] + t[:1]
            t = [AES_SBOX[b] for b in t]
            t[0] ^= _RCON[i // nk - 1]
        elif nk > 6 and i % nk == 4:
            t = [AES_SBOX[b] for b in t]
        words.append([a ^ b for a, b in zip(words[i - nk], t)])
    return [bytes(sum(words[4 * r : 4 * r + 4], [])) for r in range(nr + 1)]


def _shift_rows(s: list[int], inverse: bool = False) -> list[int]:
    out = [0] * 16
    for c in range(4):
        for r in range(4):
            src = (c - r) % 4 if inverse else (c + r) % 4
            out[4 * c + r] = s[4 * src + r]
    return out


def _mix_columns(s: list[int], inverse: bool = False) -> list[int]:
    coef = (14, 11, 13, 9) if inverse else (2, 3, 1, 1)
    out = [0] * 16
    for c in range(4):
        col = s[4 * c : 4 * c + 4]
        for r in range(4):
            acc = 0
            for k in range(4):
                acc ^= _gmul(coef[(k - r) % 4], col[k])
            out[4 * c + r] = acc
    return out


def aes_encrypt_block(key: bytes, block: bytes) -> bytes:
    if len(block) != 16:
        raise ValueError("AES block must be 16 bytes")
    rks = aes_expand_key(key)
    s = [b ^ k for b, k in zip(block, rks[0])]
    for rnd in range(1, len(rks)):
        s = [AES_SBOX[b] for b in s]
        s = _shift_rows(s)
        if rnd != len(rks) - 1:
            s = _mix_columns(s)
        s = [b ^ k for b, k in zip(s, rks[rnd])]
    return bytes(s)


def aes_decrypt_block(key: bytes, block: bytes) -> bytes:
    if len(block) != 16:
        raise ValueError("AES block must be 16 bytes")
    rks = aes_expand_key(key)
    nr = len(rks) - 1
    s = [b ^ k for b, k in zip(block, rks[nr])]
    for rnd in range(nr - 1, -1, -1):
        s = _shift_rows(s, inverse=True)
        s = [AES_INV_SBOX[b] for b in s]
        s = [b ^ k for b, k in zip(s, rks[rnd])]
        if rnd:
            s = _mix_columns(s, inverse=True)
    return bytes(s)


def aes_mix_columns(state: bytes, inverse: bool = False) -> bytes:
    return bytes(_mix_columns(list(state), inverse))


# ----------------------------------------------------------------- SHA-2


def _r32(x: int, n: int) -> int:
    return ((x >> n) | (x << (32 - n))) & 0xFFFFFFFF


def _r64(x: int, n: int) -> int:
    return ((x >> n) | (x << (64 - n))) & 0xFFFFFFFFFFFFFFFF


_K256 = (
    0x428A2F98, 0x71374491, 0xB5C0FBCF, 0xE9B5DBA5, 0x3956C25B, 0x59F111F1, 0x923F82A4, 0xAB1C5ED5,
    0xD807AA98, 0x12835B01, 0x243185BE, 0x550C7DC3, 0x72BE5D74, 0x80DEB1FE, 0x9BDC06A7, 0xC19BF174,
    0xE49B69C1, 0xEFBE4786, 0x0FC19DC6, 0x240CA1CC, 0x2DE92C6F, 0x4A7484AA, 0x5CB0A9DC, 0x76F988DA,
    0x983E5152, 0xA831C66D, 0xB00327C8, 0xBF597FC7, 0xC6E00BF3, 0xD5A79147, 0x06CA6351, 0x14292967,
    0x27B70A85, 0x2E1B2138, 0x4D2C6DFC, 0x53380D13, 0x650A7354, 0x766A0ABB, 0x81C2C92E, 0x92722C85,
    0xA2BFE8A1, 0xA81A664B, 0xC24B8B70, 0xC76C51A3, 0xD192E819, 0xD6990624, 0xF40E3585, 0x106AA070,
    0x19A4C116, 0x1E376C08, 0x2748774C, 0x34B0BCB5, 0x391C0CB3, 0x4ED8AA4A, 0x5B9CCA4F, 0x682E6FF3,
    0x748F82EE, 0x78A5636F, 0x84C87814, 0x8CC70208, 0x90BEFFFA, 0xA4506CEB, 0xBEF9A3F7, 0xC67178F2,
)
_H256 = (0x6A09E667, 0xBB67AE85, 0x3C6EF372, 0xA54FF53A, 0x510E527F, 0x9B05688C, 0x1F83D9AB, 0x5BE0CD19)

_K512 = (
    0x428A2F98D728AE22, 0x7137449123EF65CD, 0xB5C0FBCFEC4D3B2F, 0xE9B5DBA58189DBBC, 0x3956C25BF348B538,
    0x59F111F1B605D019, 0x923F82A4AF194F9B, 0xAB1C5ED5DA6D8118, 0xD807AA98A3030242, 0x12835B0145706FBE,
    0x243185BE4EE4B28C, 0x550C7DC3D5FFB4E2, 0x72BE5D74F27B896F, 0x80DEB1FE3B1696B1, 0x9BDC06A725C71235,
    0xC19BF174CF692694, 0xE49B69C19EF14AD2, 0xEFBE4786384F25E3, 0x0FC19DC68B8CD5B5, 0x240CA1CC77AC9C65,
    0x2DE92C6F592B0275, 0x4A7484AA6EA6E483, 0x5CB0A9DCBD41FBD4, 0x76F988DA831153B5, 0x983E5152EE66DFAB,
    0xA831C66D2DB43210, 0xB00327C898FB213F, 0xBF597FC7BEEF0EE4, 0xC6E00BF33DA88FC2, 0xD5A79147930AA725,
    0x06CA6351E003826F, 0x142929670A0E6E70, 0x27B70A8546D22FFC, 0x2E1B21385C26C926, 0x4D2C6DFC5AC42AED,
    0x53380D139D95B3DF, 0x650A73548BAF63DE, 0x766A0ABB3C77B2A8, 0x81C2C92E47EDAEE6, 0x92722C851482353B,
    0xA2BFE8A14CF10364, 0xA81A664BBC423001, 0xC24B8B70D0F89791, 0xC76C51A30654BE30, 0xD192E819D6EF5218,
    0xD69906245565A910, 0xF40E35855771202A, 0x106AA07032BBD1B8, 0x19A4C116B8D2D0C8, 0x1E376C085141AB53,
    0x2748774CDF8EEB99, 0x34B0BCB5E19B48A8, 0x391C0CB3C5C95A63, 0x4ED8AA4AE3418ACB, 0x5B9CCA4F7763E373,
    0x682E6FF3D6B2B8A3, 0x748F82EE5DEFB2FC, 0x78A5636F43172F60, 0x84C87814A1F0AB72, 0x8CC702081A6439EC,
    0x90BEFFFA23631E28, 0xA4506CEBDE82BDE9, 0xBEF9A3F7B2C67915, 0xC67178F2E372532B, 0xCA273ECEEA26619C,
    0xD186B8C721C0C207, 0xEADA7DD6CDE0EB1E, 0xF57D4F7FEE6ED178, 0x06F067AA72176FBA, 0x0A637DC5A2C898A6,
    0x113F9804BEF90DAE, 0x1B710B35131C471B, 0x28DB77F523047D84, 0x32CAAB7B40C72493, 0x3C9EBE0A15C9BEBC,
    0x431D67C49C100D4C, 0x4CC5D4BECB3E42B6, 0x597F299CFC657E2A, 0x5FCB6FAB3AD6FAEC, 0x6C44198C4A475817,
)
_H512 = (
    0x6A09E667F3BCC908, 0xBB67AE8584CAA73B, 0x3C6EF372FE94F82B, 0xA54FF53A5F1D36F1,
    0x510E527FADE682D1, 0x9B05688C2B3E6C1F, 0x1F83D9ABFB41BD6B, 0x5BE0CD19137E2179,
)


def md_pad(message: bytes, block_bytes: int, length_bytes: int) -> bytes:
    """Merkle-Damgard padding with a big-endian bit-length trailer."""
    bitlen = len(message) * 8
    padded = message + b"\x80"
    padded += b"\x00" * ((-len(padded) - length_bytes) % block_bytes)
    return padded + bitlen.to_bytes(length_bytes, "big")


def sha256_compress(state: tuple[int, ...], block: bytes) -> tuple[int, ...]:
    m = 0xFFFFFFFF
    w = list(struct.unpack(">16I", block))
    for t in range(16, 64):
        s0 = _r32(w[t - 15], 7) ^ _r32(w[t - 15], 18) ^ (w[t - 15] >> 3)
        s1 = _r32(w[t - 2], 17) ^ _r32(w[t - 2], 19) ^ (w[t - 2] >> 10)
        w.append((w[t - 16] + s0 + w[t - 7] + s1) & m)
    a, b, c, d, e, f, g, h = state
    for t in range(64):
        t1 = (h + (_r32(e, 6) ^ _r32(e, 11) ^ _r32(e, 25)) + ((e & f) ^ (~e & g)) + _K256[t] + w[t]) & m
        t2 = ((_r32(a, 2) ^ _r32(a, 13) ^ _r32(a, 22)) + ((a & b) ^ (a & c) ^ (b & c))) & m
        a, b, c, d, e, f, g, h = (t1 + t2) & m, a, b, c, (d + t1) & m, e, f, g
    return tuple((x + y) & m for x, y in zip(state, (a, b, c, d, e, f, g, h)))


def sha256(message: bytes) -> bytes:
    data = md_pad(message, 64, 8)
    state = _H256
    for i in range(0, len(data), 64):
        state = sha256_compress(state, data[i : i + 64])
    return struct.pack(">8I", *state)


def sha512_compress(state: tuple[int, ...], block: bytes) -> tuple[int, ...]:
    m = 0xFFFFFFFFFFFFFFFF
    w = list(struct.unpack(">16Q", block))
    for t in range(16, 80):
        s0 = _r64(w[t - 15], 1) ^ _r64(w[t - 15], 8) ^ (w[t - 15] >> 7)
        s1 = _r64(w[t - 2], 19) ^ _r64(w[t - 2], 61) ^ (w[t - 2] >> 6)
        w.append((w[t - 16] + s0 + w[t - 7] + s1) & m)
    a, b, c, d, e, f, g, h = state
    for t in range(80):
        t1 = (h + (_r64(e, 14) ^ _r64(e, 18) ^ _r64(e, 41)) + ((e & f) ^ (~e & g)) + _K512[t] + w[t]) & m
        t2 = ((_r64(a, 28) ^ _r64(a, 34) ^ _r64(a, 39)) + ((a & b) ^ (a & c) ^ (b & c))) & m
        a, b, c, d, e, f, g, h = (t1 + t2) & m, a, b, c, (d + t1) & m, e, f, g
    return tuple((x + y) & m for x, y in zip(state, (a, b, c, d, e, f, g, h)))


def sha512(message: bytes) -> bytes:
    data = md_pad(message, 128, 16)
    state = _H512
    for i in range(0, len(data), 128):
        state = sha512_compress(state, data[i : i + 128])
    return struct.pack(">8Q", *state)


SHA256_IV = _H256
SHA512_IV = _H512
SHA256_K = _K256
SHA512_K = _K512

# -------------------------------------------------------------------- SM3

SM3_IV = (0x7380166F, 0x4914B2B9, 0x172442D7, 0xDA8A0600, 0xA96F30BC, 0x163138AA, 0xE38DEE4D, 0xB0FB0E4E)


def _l32(x: int, n: int) -> int:
    n %= 32
    return ((x << n) | (x >> (32 - n))) & 0xFFFFFFFF


def sm3_compress(state: tuple[int, ...], block: bytes) -> tuple[int, ...]:
    m = 0xFFFFFFFF
    w = list(struct.unpack(">16I", block))
    for j in range(16, 68):
        x = w[j - 16] ^ w[j - 9] ^ _l32(w[j - 3], 15)
        w.append((x ^ _l32(x, 15) ^ _l32(x, 23)) ^ _l32(w[j - 13], 7) ^ w[j - 6])
    a, b, c, d, e, f, g, h = state
    for j in range(64):
        tj = 0x79CC4519 if j < 16 else 0x7A879D8A
        ss1 = _l32((_l32(a, 12) + e + _l32(tj, j)) & m, 7)
        ss2 = ss1 ^ _l32(a, 12)
        if j < 16:
            ff, gg = a ^ b ^ c, e ^ f ^ g
        else:
            ff = (a & b) | (a & c) | (b & c)
            gg = (e & f) | (~e & g)
        tt1 = (ff + d + ss2 + (w[j] ^ w[j + 4])) & m
        tt2 = (gg + h + ss1 + w[j]) & m
        a, b, c, d = tt1, a, _l32(b, 9), c
        e, f, g, h = tt2 ^ _l32(tt2, 9) ^ _l32(tt2, 17), e, _l32(f, 19), g
    return tuple(x ^ y for x, y in zip(state, (a, b, c, d, e, f, g, h)))


def sm3(message: bytes) -> bytes:
    data = md_pad(message, 64, 8)
    state = SM3_IV
    for i in range(0, len(data), 64):
        state = sm3_compress(state, data[i : i + 64])
    return struct.pack(">8I", *state)


# -------------------------------------------------------------------- SM4

SM4_SBOX = bytes.fromhex(
    "d690e9fecce13db716b614c228fb2c052b679a762abe04c3aa441326498606999c4250f491ef987a33540b43edcfac62"
    "e4b31ca9c908e89580df94fa758f3fa64707a7fcf37317ba83593c19e6854fa8686b81b27164da8bf8eb0f4b70569d35"
    "1e240e5e6358d1a225227c3b01217887d40046579fd327524c3602e7a0c4c89eeabf8ad240c738b5a3f7f2cef96115a1"
    "e0ae5da49b341a55ad933230f58cb1e31df6e22e8266ca60c02923ab0d534e6fd5db3745defd8e2f03ff6a726d6c5b51"
    "8d1baf92bbddbc7f11d95c411f105ad80ac13188a5cd7bbd2d74d012b8e5b4b08969974a0c96777e65b9f109c56ec684"
    "18f07dec3adc4d2079ee5f3ed7cb3948"
)
SM4_FK = (0xA3B1BAC6, 0x56AA3350, 0x677D9197, 0xB27022DC)
SM4_CK = tuple(
    int.from_bytes(bytes(((4 * i + j) * 7) & 0xFF for j in range(4)), "big") for i in range(32)
)


def _sm4_tau(x: int) -> int:
    return int.from_bytes(bytes(SM4_SBOX[b] for b in x.to_bytes(4, "big")), "big")


def sm4_round_keys(key: bytes) -> list[int]:
    if len(key) != 16:
        raise ValueError("SM4 key must be 16 bytes")
    k = [w ^ fk for w, fk in zip(struct.unpack(">4I", key), SM4_FK)]
    rks = []
    for i in range(32):
        b = _sm4_tau(k[i + 1] ^ k[i + 2] ^ k[i + 3] ^ SM4_CK[i])
        k.append(k[i] ^ b ^ _l32(b, 13) ^ _l32(b, 23))
        rks.append(k[-1])
    return rks


def _sm4_crypt(rks: list[int], block: bytes) -> bytes:
    if len(block) != 16:
        raise ValueError("SM4 block must be 16 bytes")
    x = list(struct.unpack(">4I", block))
    for rk in rks:
        b = _sm4_tau(x[-3] ^ x[-2] ^ x[-1] ^ rk)
        x.append(x[-4] ^ b ^ _l32(b, 2) ^ _l32(b, 10) ^ _l32(b, 18) ^ _l32(b, 24))
    return struct.pack(">4I", x[-1], x[-2], x[-3], x[-4])


def sm4_encrypt_block(key: bytes, block: bytes) -> bytes:
    return _sm4_crypt(sm4_round_keys(key), block)


def sm4_decrypt_block(key: bytes, block: bytes) -> bytes:
    return _sm4_crypt(sm4_round_keys(key)[::-1], block)
