"""Bit-exact semantics of the 64-bit scalar cryptography instructions.

Mnemonics follow the older ``saes64`` / ``ssha`` / ``ssm`` spelling; the ratified
names (``aes64es``, ``sha256sig0``, ...) and a few historical spellings are
accepted through :func:`parse_opcode`.

Conventions:

* An AES state is 16 bytes held little-endian in two registers (bytes 0-7 in
  ``rs1``, bytes 8-15 in ``rs2``); byte ``4*c + r`` is row ``r`` of column ``c``.
* SHA-256, SM3 and SM4 instructions read the low 32 bits of their sources and
  zero-extend the 32-bit result into the 64-bit destination.
* Programs operate on decoded :class:`Instruction` records; there is no binary
  encoding.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass

from cryptrisc import kernels
from cryptrisc.fields import MASK32, MASK64, xtime
from cryptrisc.reference import SM4_CK, SM4_FK, md_pad, SHA256_IV, SHA256_K, SHA512_IV, SHA512_K, SM3_IV

# --------------------------------------------------------------- opcodes


class CryptoOp(str, enum.Enum):
    AES64_ENCS = "saes64.encs"
    AES64_ENCSM = "saes64.encsm"
    AES64_DS = "saes64.ds"
    AES64_DSM = "saes64.dsm"
    AES64_IM = "saes64.im"
    AES64_KS1 = "saes64.ks1"
    AES64_KS2 = "saes64.ks2"
    SM4_ED = "ssm4.ed"
    SM4_KS = "ssm4.ks"
    SM3_P0 = "ssm3.p0"
    SM3_P1 = "ssm3.p1"
    SHA256_SIG0 = "ssha256.sig0"
    SHA256_SIG1 = "ssha256.sig1"
    SHA256_SUM0 = "ssha256.sum0"
    SHA256_SUM1 = "ssha256.sum1"
    SHA512_SIG0 = "ssha512.sig0"
    SHA512_SIG1 = "ssha512.sig1"
    SHA512_SUM0 = "ssha512.sum0"
    SHA512_SUM1 = "ssha512.sum1"

    def __str__(self) -> str:
        return self.value


class BaseOp(str, enum.Enum):
    LI = "li"
    ADD = "add"
    ADDI = "addi"
    ADDW = "addw"
    SUB = "sub"
    XOR = "xor"
    XORI = "xori"
    AND = "and"
    ANDI = "andi"
    OR = "or"
    ORI = "ori"
    SLL = "sll"
    SLLI = "slli"
    SRL = "srl"
    SRLI = "srli"
    SLLIW = "slliw"
    SRLIW = "srliw"
    # Zbkb rotates: part of the crypto extension, unavailable to baseline code
    ROR = "ror"
    RORI = "rori"
    ROL = "rol"
    RORW = "rorw"
    RORIW = "roriw"
    ROLW = "rolw"
    LD = "ld"
    LWU = "lwu"
    LBU = "lbu"
    SD = "sd"
    SW = "sw"
    SB = "sb"
    BEQ = "beq"
    BNE = "bne"
    BLTU = "bltu"

    def __str__(self) -> str:
        return self.value


Opcode = CryptoOp | BaseOp

ALIASES: dict[str, CryptoOp] = {
    # ratified Zkn mnemonics
    "aes64es": CryptoOp.AES64_ENCS,
    "aes64esm": CryptoOp.AES64_ENCSM,
    "aes64ds": CryptoOp.AES64_DS,
    "aes64dsm": CryptoOp.AES64_DSM,
    "aes64im": CryptoOp.AES64_IM,
    "aes64ks1i": CryptoOp.AES64_KS1,
    "aes64ks2": CryptoOp.AES64_KS2,
    "sm4ed": CryptoOp.SM4_ED,
    "sm4ks": CryptoOp.SM4_KS,
    "sm3p0": CryptoOp.SM3_P0,
    "sm3p1": CryptoOp.SM3_P1,
    "sha256sig0": CryptoOp.SHA256_SIG0,
    "sha256sig1": CryptoOp.SHA256_SIG1,
    "sha256sum0": CryptoOp.SHA256_SUM0,
    "sha256sum1": CryptoOp.SHA256_SUM1,
    "sha512sig0": CryptoOp.SHA512_SIG0,
    "sha512sig1": CryptoOp.SHA512_SIG1,
    "sha512sum0": CryptoOp.SHA512_SUM0,
    "sha512sum1": CryptoOp.SHA512_SUM1,
    # spellings found in the literature
    "saes64.imix": CryptoOp.AES64_IM,
    "saes64.ks11": CryptoOp.AES64_KS1,
    "saes64.decs": CryptoOp.AES64_DS,
    "saes64.decsm": CryptoOp.AES64_DSM,
    "sm4.ed": CryptoOp.SM4_ED,
    "sm4.ks": CryptoOp.SM4_KS,
}

UNARY_CRYPTO = frozenset(
    {
        CryptoOp.AES64_IM,
        CryptoOp.AES64_KS1,
        CryptoOp.SM3_P0,
        CryptoOp.SM3_P1,
        CryptoOp.SHA256_SIG0,
        CryptoOp.SHA256_SIG1,
        CryptoOp.SHA256_SUM0,
        CryptoOp.SHA256_SUM1,
        CryptoOp.SHA512_SIG0,
        CryptoOp.SHA512_SIG1,
        CryptoOp.SHA512_SUM0,
        CryptoOp.SHA512_SUM1,
    }
)
WORD32_CRYPTO = frozenset(
    {
        CryptoOp.SM4_ED,
        CryptoOp.SM4_KS,
        CryptoOp.SM3_P0,
        CryptoOp.SM3_P1,
        CryptoOp.SHA256_SIG0,
        CryptoOp.SHA256_SIG1,
        CryptoOp.SHA256_SUM0,
        CryptoOp.SHA256_SUM1,
    }
)
IMM_RANGES: dict[Opcode, range] = {
    CryptoOp.AES64_KS1: range(0, 11),
    CryptoOp.SM4_ED: range(0, 4),
    CryptoOp.SM4_KS: range(0, 4),
}

IMM_BASE = frozenset(
    {
        BaseOp.LI, BaseOp.ADDI, BaseOp.XORI, BaseOp.ANDI, BaseOp.ORI, BaseOp.SLLI,
        BaseOp.SRLI, BaseOp.SLLIW, BaseOp.SRLIW, BaseOp.RORI, BaseOp.RORIW,
        BaseOp.LD, BaseOp.LWU, BaseOp.LBU, BaseOp.SD, BaseOp.SW, BaseOp.SB,
        BaseOp.BEQ, BaseOp.BNE, BaseOp.BLTU,
    }
)
LOAD_OPS = frozenset({BaseOp.LD, BaseOp.LWU, BaseOp.LBU})
STORE_OPS = frozenset({BaseOp.SD, BaseOp.SW, BaseOp.SB})
BRANCH_OPS = frozenset({BaseOp.BEQ, BaseOp.BNE, BaseOp.BLTU})
ZBKB_OPS = frozenset({BaseOp.ROR, BaseOp.RORI, BaseOp.ROL, BaseOp.RORW, BaseOp.RORIW, BaseOp.ROLW})


class IllegalInstruction(ValueError):
    """Malformed instruction: bad register index, missing or illegal immediate."""


def parse_opcode(name: str | Opcode) -> Opcode:
    if isinstance(name, (CryptoOp, BaseOp)):
        return name
    key = name.strip().lower()
    for enum_cls in (CryptoOp, BaseOp):
        try:
            return enum_cls(key)
        except ValueError:
            pass
    if key in ALIASES:
        return ALIASES[key]
    raise IllegalInstruction(f"unknown opcode {name!r}")


def needs_imm(op: Opcode) -> bool:
    return op in IMM_RANGES or op in IMM_BASE


@dataclass(frozen=True, slots=True)
class Instruction:
    """A decoded instruction; ``imm`` is the immediate, memory offset or branch target index."""

    op: Opcode
    rd: int = 0
    rs1: int = 0
    rs2: int = 0
    imm: int | None = None

    def __post_init__(self) -> None:
        for name in ("rd", "rs1", "rs2"):
            idx = getattr(self, name)
            if not 0 <= idx < 32:
                raise IllegalInstruction(f"{self.op}: register index {name}={idx} out of range")
        if needs_imm(self.op) != (self.imm is not None):
            state = "requires" if needs_imm(self.op) else "takes no"
            raise IllegalInstruction(f"{self.op} {state} immediate")
        legal = IMM_RANGES.get(self.op)
        if legal is not None and self.imm not in legal:
            raise IllegalInstruction(f"{self.op}: immediate {self.imm} outside {legal.start}..{legal.stop - 1}")

    def __str__(self) -> str:
        parts = [f"x{self.rd}", f"x{self.rs1}"]
        if self.op not in UNARY_CRYPTO and self.imm is None:
            parts.append(f"x{self.rs2}")
        if self.imm is not None:
            parts.append(str(self.imm))
        return f"{self.op} " + ", ".join(parts)


# ------------------------------------------------------------- AES tables

AES_SBOX = bytes.fromhex(
    "637c777bf26b6fc53001672bfed7ab76ca82c97dfa5947f0add4a2af9ca472c0"
    "b7fd9326363ff7cc34a5e5f171d8311504c723c31896059a071280e2eb27b275"
    "09832c1a1b6e5aa0523bd6b329e32f8453d100ed20fcb15b6acbbe394a4c58cf"
    "d0efaafb434d338545f9027f503c9fa851a3408f929d38f5bcb6da2110fff3d2"
    "cd0c13ec5f974417c4a77e3d645d197360814fdc222a908846eeb814de5e0bdb"
    "e0323a0a4906245cc2d3ac629195e479e7c8376d8dd54ea96c56f4ea657aae08"
    "ba78252e1ca6b4c6e8dd741f4bbd8b8a703eb5664803f60e613557b986c11d9e"
    "e1f8981169d98e949b1e87e9ce5528df8ca1890dbfe6426841992d0fb054bb16"
)
AES_INV_SBOX = bytes.fromhex(
    "52096ad53036a538bf40a39e81f3d7fb7ce339829b2fff87348e4344c4dee9cb"
    "547b9432a6c2233dee4c950b42fac34e082ea16628d924b2765ba2496d8bd125"
    "72f8f66486689816d4a45ccc5d65b6926c704850fdedb9da5e154657a78d9d84"
    "90d8ab008cbcd30af7e45805b8b34506d02c1e8fca3f0f02c1afbd0301138a6b"
    "3a9111414f67dcea97f2cfcef0b4e67396ac7422e7ad3585e2f937e81c75df6e"
    "47f11a711d29c5896fb7620eaa18be1bfc563e4bc6d279209adbc0fe78cd5af4"
    "1fdda8338807c731b11210592780ec5f60517fa919b54a0d2de57a9f93c99cef"
    "a0e03b4dae2af5b0c8ebbb3c83539961172b047eba77d626e169146355210c7d"
)
SM4_SBOX = bytes.fromhex(
    "d690e9fecce13db716b614c228fb2c052b679a762abe04c3aa441326498606999c4250f491ef987a33540b43edcfac62"
    "e4b31ca9c908e89580df94fa758f3fa64707a7fcf37317ba83593c19e6854fa8686b81b27164da8bf8eb0f4b70569d35"
    "1e240e5e6358d1a225227c3b01217887d40046579fd327524c3602e7a0c4c89eeabf8ad240c738b5a3f7f2cef96115a1"
    "e0ae5da49b341a55ad933230f58cb1e31df6e22e8266ca60c02923ab0d534e6fd5db3745defd8e2f03ff6a726d6c5b51"
    "8d1baf92bbddbc7f11d95c411f105ad80ac13188a5cd7bbd2d74d012b8e5b4b08969974a0c96777e65b9f109c56ec684"
    "18f07dec3adc4d2079ee5f3ed7cb3948"
)
AES_RCON = (0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1B, 0x36, 0x00)

# destination byte i of the low half <- source byte index in the 16-byte state
_SR_FWD = (0, 5, 10, 15, 4, 9, 14, 3)
_SR_INV = (0, 13, 10, 7, 4, 1, 14, 11)


def _gather(rs1: int, rs2: int, idx: tuple[int, ...]) -> int:
    state = ((rs2 << 64) | rs1).to_bytes(16, "little")
    return int.from_bytes(bytes(state[i] for i in idx), "little")


def _mix_column(col: int) -> int:
    a0, a1, a2, a3 = col & 0xFF, (col >> 8) & 0xFF, (col >> 16) & 0xFF, (col >> 24) & 0xFF
    t = a0 ^ a1 ^ a2 ^ a3
    b0 = a0 ^ t ^ xtime(a0 ^ a1)
    b1 = a1 ^ t ^ xtime(a1 ^ a2)
    b2 = a2 ^ t ^ xtime(a2 ^ a3)
    b3 = a3 ^ t ^ xtime(a3 ^ a0)
    return b0 | (b1 << 8) | (b2 << 16) | (b3 << 24)


def _inv_mix_column(col: int) -> int:
    # InvMixColumns = MixColumns composed with a cheap pre-multiplication
    a0, a1, a2, a3 = col & 0xFF, (col >> 8) & 0xFF, (col >> 16) & 0xFF, (col >> 24) & 0xFF
    u = xtime(xtime(a0 ^ a2))
    v = xtime(xtime(a1 ^ a3))
    return _mix_column((a0 ^ u) | ((a1 ^ v) << 8) | ((a2 ^ u) << 16) | ((a3 ^ v) << 24))


def mix_columns64(x: int) -> int:
    return _mix_column(x & MASK32) | (_mix_column(x >> 32) << 32)


def inv_mix_columns64(x: int) -> int:
    return _inv_mix_column(x & MASK32) | (_inv_mix_column(x >> 32) << 32)


def _r32(x: int, n: int) -> int:
    return ((x >> n) | (x << (32 - n))) & MASK32


def _l32(x: int, n: int) -> int:
    return ((x << n) | (x >> (32 - n))) & MASK32


def _r64(x: int, n: int) -> int:
    return ((x >> n) | (x << (64 - n))) & MASK64


def _sm4_contribution(rs1: int, rs2: int, bs: int, key_schedule: bool) -> int:
    x = SM4_SBOX[(rs2 >> (8 * bs)) & 0xFF]
    if key_schedule:
        y = x ^ _l32(x, 13) ^ _l32(x, 23)
    else:
        y = x ^ _l32(x, 2) ^ _l32(x, 10) ^ _l32(x, 18) ^ _l32(x, 24)
    return (_l32(y, 8 * bs) if bs else y) ^ (rs1 & MASK32)


def exec_crypto(op: CryptoOp, rs1: int, rs2: int = 0, imm: int | None = None) -> int:
    """Architectural result of one scalar crypto instruction (pure)."""
    legal = IMM_RANGES.get(op)
    if legal is not None and imm not in legal:
        raise IllegalInstruction(f"{op}: illegal immediate {imm!r}")
    rs1 &= MASK64
    rs2 &= MASK64
    if op is CryptoOp.AES64_ENCS:
        return kernels.sub_bytes64(_gather(rs1, rs2, _SR_FWD), AES_SBOX)
    if op is CryptoOp.AES64_ENCSM:
        return mix_columns64(kernels.sub_bytes64(_gather(rs1, rs2, _SR_FWD), AES_SBOX))
    if op is CryptoOp.AES64_DS:
        return kernels.sub_bytes64(_gather(rs1, rs2, _SR_INV), AES_INV_SBOX)
    if op is CryptoOp.AES64_DSM:
        return inv_mix_columns64(kernels.sub_bytes64(_gather(rs1, rs2, _SR_INV), AES_INV_SBOX))
    if op is CryptoOp.AES64_IM:
        return inv_mix_columns64(rs1)
    if op is CryptoOp.AES64_KS1:
        w = rs1 >> 32
        if imm != 0xA:
            w = _r32(w, 8)
        w = (kernels.sub_bytes64(w, AES_SBOX) & MASK32) ^ AES_RCON[imm]
        return (w << 32) | w
    if op is CryptoOp.AES64_KS2:
        w0 = (rs1 >> 32) ^ (rs2 & MASK32)
        w1 = w0 ^ (rs2 >> 32)
        return (w1 << 32) | w0
    if op is CryptoOp.SM4_ED:
        return _sm4_contribution(rs1, rs2, imm, key_schedule=False)
    if op is CryptoOp.SM4_KS:
        return _sm4_contribution(rs1, rs2, imm, key_schedule=True)
    x = rs1 & MASK32
    if op is CryptoOp.SM3_P0:
        return x ^ _l32(x, 9) ^ _l32(x, 17)
    if op is CryptoOp.SM3_P1:
        return x ^ _l32(x, 15) ^ _l32(x, 23)
    if op is CryptoOp.SHA256_SIG0:
        return _r32(x, 7) ^ _r32(x, 18) ^ (x >> 3)
    if op is CryptoOp.SHA256_SIG1:
        return _r32(x, 17) ^ _r32(x, 19) ^ (x >> 10)
    if op is CryptoOp.SHA256_SUM0:
        return _r32(x, 2) ^ _r32(x, 13) ^ _r32(x, 22)
    if op is CryptoOp.SHA256_SUM1:
        return _r32(x, 6) ^ _r32(x, 11) ^ _r32(x, 25)
    if op is CryptoOp.SHA512_SIG0:
        return _r64(rs1, 1) ^ _r64(rs1, 8) ^ (rs1 >> 7)
    if op is CryptoOp.SHA512_SIG1:
        return _r64(rs1, 19) ^ _r64(rs1, 61) ^ (rs1 >> 6)
    if op is CryptoOp.SHA512_SUM0:
        return _r64(rs1, 28) ^ _r64(rs1, 34) ^ _r64(rs1, 39)
    if op is CryptoOp.SHA512_SUM1:
        return _r64(rs1, 14) ^ _r64(rs1, 18) ^ _r64(rs1, 41)
    raise IllegalInstruction(f"not a crypto opcode: {op!r}")


def exec_base(op: BaseOp, rs1: int, operand: int = 0) -> int:
    """Result of a base ALU op; ``operand`` is rs2's value or the immediate.

    ``*w`` ops work on the low 32 bits and zero-extend.
    """
    a = rs1 & MASK64
    b = operand & MASK64
    if op is BaseOp.LI:
        return b
    if op is BaseOp.ADD or op is BaseOp.ADDI:
        return (a + b) & MASK64
    if op is BaseOp.SUB:
        return (a - b) & MASK64
    if op is BaseOp.ADDW:
        return (a + b) & MASK32
    if op is BaseOp.XOR or op is BaseOp.XORI:
        return a ^ b
    if op is BaseOp.AND or op is BaseOp.ANDI:
        return a & b
    if op is BaseOp.OR or op is BaseOp.ORI:
        return a | b
    if op is BaseOp.SLL or op is BaseOp.SLLI:
        return (a << (b & 63)) & MASK64
    if op is BaseOp.SRL or op is BaseOp.SRLI:
        return a >> (b & 63)
    if op is BaseOp.SLLIW:
        return (a << (b & 31)) & MASK32
    if op is BaseOp.SRLIW:
        return (a & MASK32) >> (b & 31)
    if op is BaseOp.ROR or op is BaseOp.RORI:
        return _r64(a, b & 63) if b & 63 else a
    if op is BaseOp.ROL:
        return _r64(a, 64 - (b & 63)) if b & 63 else a
    if op is BaseOp.RORW or op is BaseOp.RORIW:
        return _r32(a & MASK32, b & 31) if b & 31 else a & MASK32
    if op is BaseOp.ROLW:
        return _l32(a & MASK32, b & 31) if b & 31 else a & MASK32
    raise IllegalInstruction(f"{op} is not an ALU operation")


# ---------------------------------------------------------- compositions


def _split_block(block: bytes) -> tuple[int, int]:
    return int.from_bytes(block[:8], "little"), int.from_bytes(block[8:], "little")


def _join_block(lo: int, hi: int) -> bytes:
    return lo.to_bytes(8, "little") + hi.to_bytes(8, "little")


def aes_key_schedule(key: bytes) -> list[int]:
    """Round keys as 64-bit halves ``[rk0_lo, rk0_hi, rk1_lo, ...]`` via ks1/ks2."""
    if len(key) not in (16, 24, 32):
        raise ValueError("AES key must be 16, 24 or 32 bytes")
    nk64 = len(key) // 8
    nr = {2: 10, 3: 12, 4: 14}[nk64]
    ks = [int.from_bytes(key[8 * i : 8 * i + 8], "little") for i in range(nk64)]
    rnum = 0
    while len(ks) < 2 * (nr + 1):
        cur = ks[-nk64:]
        t = exec_crypto(CryptoOp.AES64_KS1, cur[-1], imm=rnum)
        rnum += 1
        new = [exec_crypto(CryptoOp.AES64_KS2, t, cur[0])]
        new.append(exec_crypto(CryptoOp.AES64_KS2, new[0], cur[1]))
        if nk64 == 3:
            new.append(exec_crypto(CryptoOp.AES64_KS2, new[1], cur[2]))
        elif nk64 == 4:
            t = exec_crypto(CryptoOp.AES64_KS1, new[1], imm=0xA)
            new.append(exec_crypto(CryptoOp.AES64_KS2, t, cur[2]))
            new.append(exec_crypto(CryptoOp.AES64_KS2, new[2], cur[3]))
        ks.extend(new)
    return ks[: 2 * (nr + 1)]


def compose_aes_encrypt(key: bytes, block: bytes) -> bytes:
    """AES-128/192/256 single-block encryption built only from saes64 instructions."""
    if len(block) != 16:
        raise ValueError("AES block must be 16 bytes")
    rk = aes_key_schedule(key)
    nr = len(rk) // 2 - 1
    s0, s1 = _split_block(block)
    s0, s1 = s0 ^ rk[0], s1 ^ rk[1]
    for r in range(1, nr + 1):
        op = CryptoOp.AES64_ENCS if r == nr else CryptoOp.AES64_ENCSM
        s0, s1 = exec_crypto(op, s0, s1) ^ rk[2 * r], exec_crypto(op, s1, s0) ^ rk[2 * r + 1]
    return _join_block(s0, s1)


def compose_aes_decrypt(key: bytes, block: bytes) -> bytes:
    """Equivalent-inverse-cipher decryption via ds/dsm with im-transformed round keys."""
    if len(block) != 16:
        raise ValueError("AES block must be 16 bytes")
    rk = aes_key_schedule(key)
    nr = len(rk) // 2 - 1
    s0, s1 = _split_block(block)
    s0, s1 = s0 ^ rk[2 * nr], s1 ^ rk[2 * nr + 1]
    for r in range(nr - 1, -1, -1):
        if r:
            k0 = exec_crypto(CryptoOp.AES64_IM, rk[2 * r])
            k1 = exec_crypto(CryptoOp.AES64_IM, rk[2 * r + 1])
            op = CryptoOp.AES64_DSM
        else:
            k0, k1, op = rk[0], rk[1], CryptoOp.AES64_DS
        s0, s1 = exec_crypto(op, s0, s1) ^ k0, exec_crypto(op, s1, s0) ^ k1
    return _join_block(s0, s1)


def compose_aes128(key: bytes, block: bytes) -> bytes:
    if len(key) != 16:
        raise ValueError("AES-128 key must be 16 bytes")
    return compose_aes_encrypt(key, block)


def _sha256_block(state: list[int], block: bytes) -> list[int]:
    w = list(struct.unpack(">16I", block))
    for t in range(16, 64):
        s0 = exec_crypto(CryptoOp.SHA256_SIG0, w[t - 15])
        s1 = exec_crypto(CryptoOp.SHA256_SIG1, w[t - 2])
        w.append((w[t - 16] + s0 + w[t - 7] + s1) & MASK32)
    a, b, c, d, e, f, g, h = state
    for t in range(64):
        t1 = h + exec_crypto(CryptoOp.SHA256_SUM1, e) + ((e & f) ^ (~e & g)) + SHA256_K[t] + w[t]
        t2 = exec_crypto(CryptoOp.SHA256_SUM0, a) + ((a & b) ^ (a & c) ^ (b & c))
        a, b, c, d, e, f, g, h = (t1 + t2) & MASK32, a, b, c, (d + t1) & MASK32, e, f, g
    return [(x + y) & MASK32 for x, y in zip(state, (a, b, c, d, e, f, g, h))]


def compose_sha256(message: bytes) -> bytes:
    data = md_pad(message, 64, 8)
    state = list(SHA256_IV)
    for i in range(0, len(data), 64):
        state = _sha256_block(state, data[i : i + 64])
    return struct.pack(">8I", *state)


def _sha512_block(state: list[int], block: bytes) -> list[int]:
    w = list(struct.unpack(">16Q", block))
    for t in range(16, 80):
        s0 = exec_crypto(CryptoOp.SHA512_SIG0, w[t - 15])
        s1 = exec_crypto(CryptoOp.SHA512_SIG1, w[t - 2])
        w.append((w[t - 16] + s0 + w[t - 7] + s1) & MASK64)
    a, b, c, d, e, f, g, h = state
    for t in range(80):
        t1 = h + exec_crypto(CryptoOp.SHA512_SUM1, e) + ((e & f) ^ (~e & g)) + SHA512_K[t] + w[t]
        t2 = exec_crypto(CryptoOp.SHA512_SUM0, a) + ((a & b) ^ (a & c) ^ (b & c))
        a, b, c, d, e, f, g, h = (t1 + t2) & MASK64, a, b, c, (d + t1) & MASK64, e, f, g
    return [(x + y) & MASK64 for x, y in zip(state, (a, b, c, d, e, f, g, h))]


def compose_sha512(message: bytes) -> bytes:
    data = md_pad(message, 128, 16)
    state = list(SHA512_IV)
    for i in range(0, len(data), 128):
        state = _sha512_block(state, data[i : i + 128])
    return struct.pack(">8Q", *state)


def _sm3_block(state: list[int], block: bytes) -> list[int]:
    w = list(struct.unpack(">16I", block))
    for j in range(16, 68):
        x = w[j - 16] ^ w[j - 9] ^ _l32(w[j - 3], 15)
        w.append(exec_crypto(CryptoOp.SM3_P1, x) ^ _l32(w[j - 13], 7) ^ w[j - 6])
    a, b, c, d, e, f, g, h = state
    for j in range(64):
        tj = 0x79CC4519 if j < 16 else 0x7A879D8A
        a12 = _l32(a, 12)
        ss1 = _l32((a12 + e + _l32(tj, j % 32)) & MASK32, 7)
        ss2 = ss1 ^ a12
        if j < 16:
            ff, gg = a ^ b ^ c, e ^ f ^ g
        else:
            ff = (a & b) | (a & c) | (b & c)
            gg = (e & f) | (~e & g)
        tt1 = (ff + d + ss2 + (w[j] ^ w[j + 4])) & MASK32
        tt2 = (gg + h + ss1 + w[j]) & MASK32
        a, b, c, d = tt1, a, _l32(b, 9), c
        e, f, g, h = exec_crypto(CryptoOp.SM3_P0, tt2), e, _l32(f, 19), g
    return [x ^ y for x, y in zip(state, (a, b, c, d, e, f, g, h))]


def compose_sm3(message: bytes) -> bytes:
    data = md_pad(message, 64, 8)
    state = list(SM3_IV)
    for i in range(0, len(data), 64):
        state = _sm3_block(state, data[i : i + 64])
    return struct.pack(">8I", *state)


def _sm4_t(op: CryptoOp, acc: int, x: int) -> int:
    for bs in range(4):
        acc = exec_crypto(op, acc, x, bs)
    return acc


def sm4_key_schedule(key: bytes) -> list[int]:
    if len(key) != 16:
        raise ValueError("SM4 key must be 16 bytes")
    k = [w ^ fk for w, fk in zip(struct.unpack(">4I", key), SM4_FK)]
    for i in range(32):
        k.append(_sm4_t(CryptoOp.SM4_KS, k[i], k[i + 1] ^ k[i + 2] ^ k[i + 3] ^ SM4_CK[i]))
    return k[4:]


def compose_sm4(key: bytes, block: bytes, decrypt: bool = False) -> bytes:
    """SM4 single-block encryption (or decryption) built from ssm4.ks / ssm4.ed."""
    if len(block) != 16:
        raise ValueError("SM4 block must be 16 bytes")
    rks = sm4_key_schedule(key)
    if decrypt:
        rks = rks[::-1]
    x = list(struct.unpack(">4I", block))
    for i, rk in enumerate(rks):
        x.append(_sm4_t(CryptoOp.SM4_ED, x[i], x[i + 1] ^ x[i + 2] ^ x[i + 3] ^ rk))
    return struct.pack(">4I", x[-1], x[-2], x[-3], x[-4])
