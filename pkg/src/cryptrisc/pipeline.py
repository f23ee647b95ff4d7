"""Architectural simulator for the six-stage core with FDL tagging and MCU masking.

The model is functional with a flat latency table:

* register-register ops (base and crypto): 1 cycle
* loads and stores: 2 cycles
* taken branches: 1 extra cycle

Masking happens alongside operand fetch and adds no latency. Each retired
instruction yields one :class:`PowerEvent` describing its EX-stage bus activity.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from cryptrisc.crypto_isa import (
    BRANCH_OPS,
    LOAD_OPS,
    STORE_OPS,
    UNARY_CRYPTO,
    WORD32_CRYPTO,
    BaseOp,
    CryptoOp,
    IllegalInstruction,
    Instruction,
    exec_base,
    exec_crypto,
)
from cryptrisc.fdl import DEFAULT_POLICY, FieldDetectionLayer, MaskMode, MaskPolicy
from cryptrisc.fields import MASK32, MASK64
from cryptrisc.mcu import DOMAIN_MASK, LfsrBank, PrngState, Scheme, _mask_raw, _unmask_raw, derive_state

MEM_SIZE = 1 << 20
DEFAULT_STEP_BUDGET = 5_000_000

LATENCY_ALU = 1
LATENCY_MEM = 2
BRANCH_TAKEN_PENALTY = 1

_ACCESS_SIZE = {
    BaseOp.LD: 8, BaseOp.SD: 8,
    BaseOp.LWU: 4, BaseOp.SW: 4,
    BaseOp.LBU: 1, BaseOp.SB: 1,
}


class MemoryFault(IndexError):
    """Access outside the simulated address space."""


class StepBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True, slots=True)
class PowerEvent:
    """Bus values of one EX-stage activity.

    ``op1``, ``op2`` and ``result`` are the first share of each value when the
    instruction is masked; any further shares are listed in ``aux``.
    """

    cycle: int
    op1: int
    op2: int
    result: int
    prev_rd: int
    opcode: str = ""
    aux: tuple[int, ...] = ()


@dataclass(frozen=True, slots=True)
class Program:
    """A straight-line or looping instruction list plus where its output lives."""

    instructions: tuple[Instruction, ...]
    output_addr: int = 0
    output_len: int = 0
    name: str = ""

    def __len__(self) -> int:
        return len(self.instructions)


@dataclass
class ExecStats:
    cycles: int = 0
    instret: int = 0
    histogram: Counter = field(default_factory=Counter)


@dataclass
class MachineState:
    regs: list[int] = field(default_factory=lambda: [0] * 32)
    mem: dict[int, int] = field(default_factory=dict)
    pc: int = 0
    cycle_count: int = 0
    instret: int = 0
    masking_enabled: bool = False
    policy: MaskPolicy = DEFAULT_POLICY
    prng: PrngState = field(default_factory=lambda: PrngState(1))
    scheme: Scheme = "affine"
    bank: LfsrBank | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.bank is None:
            self.bank = LfsrBank(self.prng.state)

    def load_bytes(self, addr: int, data: bytes) -> None:
        _check_range(addr, len(data))
        for i, b in enumerate(data):
            self.mem[addr + i] = b

    def read_bytes(self, addr: int, n: int) -> bytes:
        _check_range(addr, n)
        get = self.mem.get
        return bytes(get(addr + i, 0) for i in range(n))


def _check_range(addr: int, n: int) -> None:
    if addr < 0 or addr + n > MEM_SIZE:
        raise MemoryFault(f"access of {n} bytes at {addr:#x} outside [0, {MEM_SIZE:#x})")


class Machine:
    """Owns one :class:`MachineState` and executes a program against it."""

    def __init__(self, state: MachineState | None = None, fdl: FieldDetectionLayer | None = None) -> None:
        self.state = state if state is not None else MachineState()
        self.fdl = fdl if fdl is not None else FieldDetectionLayer(policy=self.state.policy)
        self.histogram: Counter = Counter()

    def step(self, program: Sequence[Instruction], record: bool = True) -> PowerEvent | None:
        s = self.state
        if not 0 <= s.pc < len(program):
            raise IllegalInstruction(f"pc {s.pc} outside program of length {len(program)}")
        ins = program[s.pc]
        op = ins.op
        regs = s.regs
        a = regs[ins.rs1]
        b = regs[ins.rs2]
        prev = regs[ins.rd]
        latency = LATENCY_ALU
        next_pc = s.pc + 1
        aux: tuple[int, ...] = ()
        bus1, bus2 = a, b

        if isinstance(op, CryptoOp):
            unary = op in UNARY_CRYPTO
            if unary:
                bus2 = b = 0
            meta = self.fdl.metadata(op) if s.masking_enabled else None
            if meta is not None and meta.masked:
                res, bus1, bus2, bus_res, aux = self._masked_crypto(op, a, b, ins.imm, meta, unary)
            else:
                res = bus_res = exec_crypto(op, a, b, ins.imm)
            write = True
        elif op in LOAD_OPS:
            size = _ACCESS_SIZE[op]
            addr = (a + ins.imm) & MASK64
            res = bus_res = int.from_bytes(s.read_bytes(addr, size), "little")
            bus2 = addr
            latency = LATENCY_MEM
            write = True
        elif op in STORE_OPS:
            size = _ACCESS_SIZE[op]
            addr = (a + ins.imm) & MASK64
            s.load_bytes(addr, (b & ((1 << (8 * size)) - 1)).to_bytes(size, "little"))
            bus1, bus2, bus_res = addr, b, 0
            latency = LATENCY_MEM
            write = False
            res = 0
        elif op in BRANCH_OPS:
            if op is BaseOp.BEQ:
                taken = a == b
            elif op is BaseOp.BNE:
                taken = a != b
            else:
                taken = a < b
            if taken:
                next_pc = ins.imm
                latency += BRANCH_TAKEN_PENALTY
            res = bus_res = int(taken)
            write = False
        else:
            operand = ins.imm if ins.imm is not None else b
            bus2 = operand & MASK64
            res = bus_res = exec_base(op, a, operand)
            write = True

        if write and ins.rd:
            regs[ins.rd] = res
        s.pc = next_pc
        s.cycle_count += latency
        s.instret += 1
        self.histogram[op] += 1
        if not record:
            return None
        return PowerEvent(s.cycle_count - latency, bus1, bus2, bus_res, prev, op.value, aux)

    def _masked_crypto(self, op, a, b, imm, meta, unary):
        mode = meta.mask_mode
        k = meta.mask_shares
        scheme = self.state.scheme
        width = 32 if op in WORD32_CRYPTO and mode is not MaskMode.AFFINE else 64
        if width == 32:
            a &= MASK32
            b &= MASK32
        draw = self.state.bank.draw
        sa, ma = _mask_raw(a, mode, k, width, draw, scheme, 0)
        if unary:
            sb, mb = (0,), ()
        else:
            sb, mb = _mask_raw(b, mode, k, width, draw, scheme, 1)
        # CFU: unmask internally, compute, remask with fresh randomness
        x = _unmask_raw(mode, width, sa, ma)
        y = _unmask_raw(mode, width, sb, mb) if mb else 0
        r = exec_crypto(op, x, y, imm)
        sr, mr = _mask_raw(r, mode, k, width, draw, scheme, 2)
        res = _unmask_raw(mode, width, sr, mr)
        aux = sa[1:] + sb[1:] + sr[1:]
        return res, sa[0], sb[0], sr[0], aux

    def run(
        self,
        program: Sequence[Instruction],
        record: bool = False,
        budget: int = DEFAULT_STEP_BUDGET,
    ) -> list[PowerEvent]:
        events: list[PowerEvent] = []
        n = len(program)
        steps = 0
        while self.state.pc != n:
            if steps >= budget:
                raise StepBudgetExceeded(f"program did not halt within {budget} steps")
            ev = self.step(program, record)
            if record:
                events.append(ev)
            steps += 1
        return events

    def stats(self) -> ExecStats:
        return ExecStats(self.state.cycle_count, self.state.instret, Counter(self.histogram))


def step(state: MachineState, program: Sequence[Instruction]) -> tuple[MachineState, PowerEvent]:
    """Retire one instruction of ``program`` on ``state`` (updated in place)."""
    m = Machine(state)
    ev = m.step(program)
    return state, ev


def run(
    program: Program,
    inputs: Mapping[int, bytes] | None = None,
    masking: bool = False,
    seed: int = 1,
    *,
    policy: MaskPolicy = DEFAULT_POLICY,
    regs: Mapping[int, int] | None = None,
    record: bool = False,
    budget: int = DEFAULT_STEP_BUDGET,
) -> tuple[bytes, ExecStats, list[PowerEvent]]:
    """Execute ``program`` from a fresh machine and return its output bytes.

    ``inputs`` maps base addresses to data preloaded into memory; ``regs``
    optionally presets registers. The masking PRNG is derived from ``seed``.
    """
    state = MachineState(
        masking_enabled=masking,
        policy=policy,
        prng=derive_state(seed, 0, DOMAIN_MASK),
    )
    for addr, data in (inputs or {}).items():
        state.load_bytes(addr, data)
    for idx, value in (regs or {}).items():
        if idx:
            state.regs[idx] = value & MASK64
    machine = Machine(state)
    events = machine.run(program.instructions, record=record, budget=budget)
    out = state.read_bytes(program.output_addr, program.output_len)
    return out, machine.stats(), events
