import hashlib
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cryptrisc import crypto_isa as isa
from cryptrisc import reference as ref
from cryptrisc.crypto_isa import BaseOp, CryptoOp, IllegalInstruction, Instruction, exec_base, exec_crypto
from cryptrisc.fields import gf_mul

u64 = st.integers(0, 2**64 - 1)
u32 = st.integers(0, 2**32 - 1)


# --- an independent byte-matrix model of the AES round pieces ------------


def _state(rs1, rs2):
    return list(rs1.to_bytes(8, "little") + rs2.to_bytes(8, "little"))


def _shift_rows(s, inverse=False):
    sign = -1 if inverse else 1
    return [s[r + 4 * ((c + sign * r) % 4)] for c in range(4) for r in range(4)]


def _mix(col, coeffs):
    return [
        gf_mul(coeffs[0], col[r]) ^ gf_mul(coeffs[1], col[(r + 1) % 4])
        ^ gf_mul(coeffs[2], col[(r + 2) % 4]) ^ gf_mul(coeffs[3], col[(r + 3) % 4])
        for r in range(4)
    ]


def _mix_lo(b8, coeffs):
    return _mix(b8[:4], coeffs) + _mix(b8[4:8], coeffs)


def _word(b8):
    return int.from_bytes(bytes(b8), "little")


FWD, INV = (2, 3, 1, 1), (14, 11, 13, 9)


def oracle_aes(op, rs1, rs2):
    if op is CryptoOp.AES64_IM:
        return _word(_mix_lo(list(rs1.to_bytes(8, "little")), INV))
    inverse = op in (CryptoOp.AES64_DS, CryptoOp.AES64_DSM)
    box = ref.AES_INV_SBOX if inverse else ref.AES_SBOX
    lo = [box[b] for b in _shift_rows(_state(rs1, rs2), inverse)[:8]]
    if op is CryptoOp.AES64_ENCSM:
        lo = _mix_lo(lo, FWD)
    elif op is CryptoOp.AES64_DSM:
        lo = _mix_lo(lo, INV)
    return _word(lo)


AES_ROUND_OPS = [CryptoOp.AES64_ENCS, CryptoOp.AES64_ENCSM, CryptoOp.AES64_DS, CryptoOp.AES64_DSM, CryptoOp.AES64_IM]


@pytest.mark.parametrize("op", AES_ROUND_OPS, ids=lambda o: o.value)
def test_aes_round_ops_match_byte_model(op):
    rng = random.Random(op.value)
    for _ in range(300):
        a, b = rng.getrandbits(64), rng.getrandbits(64)
        assert exec_crypto(op, a, b) == oracle_aes(op, a, b)


@given(u64, u64)
def test_encsm_is_mixcolumns_of_encs(a, b):
    assert exec_crypto(CryptoOp.AES64_ENCSM, a, b) == isa.mix_columns64(exec_crypto(CryptoOp.AES64_ENCS, a, b))
    assert isa.inv_mix_columns64(isa.mix_columns64(a)) == a


def _r32(x, n):
    return ((x >> n) | (x << (32 - n))) & 0xFFFFFFFF


def _r64(x, n):
    return ((x >> n) | (x << (64 - n))) & (2**64 - 1)


SHA_FORMULAS = {
    CryptoOp.SHA256_SIG0: lambda x: _r32(x, 7) ^ _r32(x, 18) ^ (x >> 3),
    CryptoOp.SHA256_SIG1: lambda x: _r32(x, 17) ^ _r32(x, 19) ^ (x >> 10),
    CryptoOp.SHA256_SUM0: lambda x: _r32(x, 2) ^ _r32(x, 13) ^ _r32(x, 22),
    CryptoOp.SHA256_SUM1: lambda x: _r32(x, 6) ^ _r32(x, 11) ^ _r32(x, 25),
    CryptoOp.SM3_P0: lambda x: x ^ _r32(x, 32 - 9) ^ _r32(x, 32 - 17),
    CryptoOp.SM3_P1: lambda x: x ^ _r32(x, 32 - 15) ^ _r32(x, 32 - 23),
}
SHA512_FORMULAS = {
    CryptoOp.SHA512_SIG0: lambda x: _r64(x, 1) ^ _r64(x, 8) ^ (x >> 7),
    CryptoOp.SHA512_SIG1: lambda x: _r64(x, 19) ^ _r64(x, 61) ^ (x >> 6),
    CryptoOp.SHA512_SUM0: lambda x: _r64(x, 28) ^ _r64(x, 34) ^ _r64(x, 39),
    CryptoOp.SHA512_SUM1: lambda x: _r64(x, 14) ^ _r64(x, 18) ^ _r64(x, 41),
}


@given(u64)
def test_word32_hash_ops_use_low_word_and_zero_extend(x):
    for op, f in SHA_FORMULAS.items():
        out = exec_crypto(op, x)
        assert out == f(x & 0xFFFFFFFF)
        assert out >> 32 == 0


@given(u64)
def test_sha512_ops(x):
    for op, f in SHA512_FORMULAS.items():
        assert exec_crypto(op, x) == f(x)


def test_zero_inputs():
    assert exec_crypto(CryptoOp.SHA256_SIG0, 0) == 0
    assert exec_crypto(CryptoOp.SHA512_SUM0, 0) == 0


@given(u64, u64, st.integers(0, 3))
def test_sm4_ops_against_byte_formula(a, b, bs):
    x = ref.SM4_SBOX[(b >> (8 * bs)) & 0xFF]
    rotl = lambda v, n: _r32(v, (32 - n) % 32)  # noqa: E731
    ed = x ^ rotl(x, 2) ^ rotl(x, 10) ^ rotl(x, 18) ^ rotl(x, 24)
    ks = x ^ rotl(x, 13) ^ rotl(x, 23)
    assert exec_crypto(CryptoOp.SM4_ED, a, b, bs) == (a & 0xFFFFFFFF) ^ rotl(ed, 8 * bs)
    assert exec_crypto(CryptoOp.SM4_KS, a, b, bs) == (a & 0xFFFFFFFF) ^ rotl(ks, 8 * bs)


def test_immediate_checks():
    with pytest.raises(IllegalInstruction):
        exec_crypto(CryptoOp.AES64_KS1, 0, 0, 11)
    with pytest.raises(IllegalInstruction):
        exec_crypto(CryptoOp.SM4_ED, 0, 0, None)
    with pytest.raises(IllegalInstruction):
        Instruction(CryptoOp.SM4_KS, 1, 2, 3, 4)
    with pytest.raises(IllegalInstruction):
        Instruction(BaseOp.ADD, 32, 0, 0)


def test_opcode_parsing_and_aliases():
    assert isa.parse_opcode("saes64.encs") is CryptoOp.AES64_ENCS
    assert isa.parse_opcode("aes64ks1i") is CryptoOp.AES64_KS1
    assert isa.parse_opcode("saes64.imix") is CryptoOp.AES64_IM
    assert isa.parse_opcode("SM4.ED") is CryptoOp.SM4_ED
    assert isa.parse_opcode("add") is BaseOp.ADD
    assert len(CryptoOp) == 19
    with pytest.raises(IllegalInstruction):
        isa.parse_opcode("saes64.nope")


def test_base_examples():
    assert exec_base(BaseOp.XOR, 0xDEADBEEF, 0xDEADBEEF) == 0
    assert exec_base(BaseOp.ADD, 2**64 - 1, 1) == 0
    assert exec_base(BaseOp.RORIW, 1, 1) == 0x80000000
    assert exec_base(BaseOp.ADDW, 0xFFFFFFFF, 1) == 0
    assert exec_base(BaseOp.SUB, 0, 1) == 2**64 - 1
    with pytest.raises(IllegalInstruction):
        exec_base(BaseOp.LD, 0, 0)


@given(u64, st.integers(0, 63))
def test_base_rotates_invert(x, n):
    assert exec_base(BaseOp.ROL, exec_base(BaseOp.ROR, x, n), n) == x
    w = x & 0xFFFFFFFF
    assert exec_base(BaseOp.ROLW, exec_base(BaseOp.RORW, w, n), n) == w


# --- compositions against the oracles --------------------------------------


def test_aes128_vector_and_zero_block():
    key = bytes(range(16))
    pt = bytes.fromhex("00112233445566778899aabbccddeeff")
    assert isa.compose_aes128(key, pt).hex() == "69c4e0d86a7b0430d8cdb78070b4c55a"
    assert isa.compose_aes128(bytes(16), bytes(16)) == ref.aes_encrypt_block(bytes(16), bytes(16))
    with pytest.raises(ValueError):
        isa.compose_aes128(bytes(15), pt)


@pytest.mark.parametrize("klen", [16, 24, 32])
def test_aes_compositions_random(klen):
    rng = random.Random(klen)
    for _ in range(100):
        key, pt = rng.randbytes(klen), rng.randbytes(16)
        ct = isa.compose_aes_encrypt(key, pt)
        assert ct == ref.aes_encrypt_block(key, pt)
        assert isa.compose_aes_decrypt(key, ct) == pt


def test_hash_compositions_random():
    rng = random.Random(11)
    for n in [0, 3, 55, 56, 64, 111, 112, 129] + [rng.randrange(400) for _ in range(92)]:
        m = rng.randbytes(n)
        assert isa.compose_sha256(m) == hashlib.sha256(m).digest()
        assert isa.compose_sha512(m) == hashlib.sha512(m).digest()
        assert isa.compose_sm3(m) == ref.sm3(m)


def test_sm4_composition():
    k = bytes.fromhex("0123456789abcdeffedcba9876543210")
    assert isa.compose_sm4(k, k).hex() == "681edf34d206965e86b3e94f536e4246"
    rng = random.Random(12)
    for _ in range(100):
        key, pt = rng.randbytes(16), rng.randbytes(16)
        ct = isa.compose_sm4(key, pt)
        assert ct == ref.sm4_encrypt_block(key, pt)
        assert isa.compose_sm4(key, ct, decrypt=True) == pt


def test_literal_tables_agree_with_oracle():
    assert isa.AES_SBOX == bytes(ref.AES_SBOX)
    assert isa.AES_INV_SBOX == bytes(ref.AES_INV_SBOX)
    assert isa.SM4_SBOX == bytes(ref.SM4_SBOX)
