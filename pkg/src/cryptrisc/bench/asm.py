"""A tiny program builder: emits decoded instructions and resolves labels."""

from __future__ import annotations

from cryptrisc.crypto_isa import (
    BRANCH_OPS,
    ZBKB_OPS,
    BaseOp,
    CryptoOp,
    Instruction,
)
from cryptrisc.fields import MASK32, MASK64
from cryptrisc.pipeline import Program


class Asm:
    """Accumulates instructions; ``zbkb`` gates the rotate helpers."""

    def __init__(self, zbkb: bool = False) -> None:
        self.zbkb = zbkb
        self._ins: list[Instruction | tuple] = []
        self._labels: dict[str, int] = {}

    def emit(self, op, rd: int = 0, rs1: int = 0, rs2: int = 0, imm: int | None = None) -> None:
        if op in ZBKB_OPS and not self.zbkb:
            raise ValueError(f"{op} needs the Zbkb extension")
        self._ins.append(Instruction(op, rd, rs1, rs2, imm))

    def label(self, name: str) -> None:
        if name in self._labels:
            raise ValueError(f"duplicate label {name!r}")
        self._labels[name] = len(self._ins)

    def branch(self, op: BaseOp, rs1: int, rs2: int, target: str) -> None:
        if op not in BRANCH_OPS:
            raise ValueError(f"{op} is not a branch")
        self._ins.append((op, rs1, rs2, target))

    def build(self, output_addr: int = 0, output_len: int = 0, name: str = "") -> Program:
        out = []
        for ins in self._ins:
            if isinstance(ins, tuple):
                op, rs1, rs2, target = ins
                out.append(Instruction(op, 0, rs1, rs2, self._labels[target]))
            else:
                out.append(ins)
        return Program(tuple(out), output_addr, output_len, name)

    # -------------------------------------------------------- base ops

    def li(self, rd: int, value: int) -> None:
        self.emit(BaseOp.LI, rd, imm=value & MASK64)

    def mv(self, rd: int, rs: int) -> None:
        self.emit(BaseOp.ADDI, rd, rs, imm=0)

    def rr(self, op: BaseOp, rd: int, rs1: int, rs2: int) -> None:
        self.emit(op, rd, rs1, rs2)

    def ri(self, op: BaseOp, rd: int, rs1: int, imm: int) -> None:
        self.emit(op, rd, rs1, imm=imm)

    def xor(self, rd, rs1, rs2):
        self.emit(BaseOp.XOR, rd, rs1, rs2)

    def and_(self, rd, rs1, rs2):
        self.emit(BaseOp.AND, rd, rs1, rs2)

    def or_(self, rd, rs1, rs2):
        self.emit(BaseOp.OR, rd, rs1, rs2)

    def add(self, rd, rs1, rs2):
        self.emit(BaseOp.ADD, rd, rs1, rs2)

    def addw(self, rd, rs1, rs2):
        self.emit(BaseOp.ADDW, rd, rs1, rs2)

    def addi(self, rd, rs1, imm):
        self.emit(BaseOp.ADDI, rd, rs1, imm=imm)

    def andi(self, rd, rs1, imm):
        self.emit(BaseOp.ANDI, rd, rs1, imm=imm)

    def slli(self, rd, rs1, n):
        self.emit(BaseOp.SLLI, rd, rs1, imm=n)

    def srli(self, rd, rs1, n):
        self.emit(BaseOp.SRLI, rd, rs1, imm=n)

    def slliw(self, rd, rs1, n):
        self.emit(BaseOp.SLLIW, rd, rs1, imm=n)

    def srliw(self, rd, rs1, n):
        self.emit(BaseOp.SRLIW, rd, rs1, imm=n)

    def ld(self, rd, base, off=0):
        self.emit(BaseOp.LD, rd, base, imm=off)

    def lwu(self, rd, base, off=0):
        self.emit(BaseOp.LWU, rd, base, imm=off)

    def lbu(self, rd, base, off=0):
        self.emit(BaseOp.LBU, rd, base, imm=off)

    def sd(self, rs, base, off=0):
        self.emit(BaseOp.SD, 0, base, rs, imm=off)

    def sw(self, rs, base, off=0):
        self.emit(BaseOp.SW, 0, base, rs, imm=off)

    def sb(self, rs, base, off=0):
        self.emit(BaseOp.SB, 0, base, rs, imm=off)

    def crypto(self, op: CryptoOp, rd: int, rs1: int, rs2: int = 0, imm: int | None = None) -> None:
        self.emit(op, rd, rs1, rs2, imm)

    # ------------------------------------------------------- rotations

    def rotr32(self, rd: int, rs: int, n: int, tmp: int) -> None:
        """Rotate the zero-extended low word right by ``n``; ``tmp`` may be clobbered."""
        n %= 32
        if n == 0:
            self.mv(rd, rs)
        elif self.zbkb:
            self.emit(BaseOp.RORIW, rd, rs, imm=n)
        else:
            self.srliw(tmp, rs, n)
            self.slliw(rd, rs, 32 - n)
            self.or_(rd, rd, tmp)

    def rotl32(self, rd: int, rs: int, n: int, tmp: int) -> None:
        self.rotr32(rd, rs, 32 - (n % 32), tmp)

    def rotr64(self, rd: int, rs: int, n: int, tmp: int) -> None:
        n %= 64
        if n == 0:
            self.mv(rd, rs)
        elif self.zbkb:
            self.emit(BaseOp.RORI, rd, rs, imm=n)
        else:
            self.srli(tmp, rs, n)
            self.slli(rd, rs, 64 - n)
            self.or_(rd, rd, tmp)

    def __len__(self) -> int:
        return len(self._ins)


def words_le(values, width: int = 4) -> bytes:
    """Pack integers as little-endian ``width``-byte words (memory image)."""
    mask = MASK32 if width == 4 else MASK64
    return b"".join((v & mask).to_bytes(width, "little") for v in values)
