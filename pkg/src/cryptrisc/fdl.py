"""Decode-stage field detection: opcode -> algebraic field -> masking metadata.

The opcode-to-field table is plain data (:data:`DEFAULT_LUT`) and can be
replaced or extended when constructing a :class:`FieldDetectionLayer`.
"""

from __future__ import annotations

import enum
import os
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType

from cryptrisc.crypto_isa import CryptoOp, Opcode

POLICY_ENV = "CRYPTRISC_POLICY"


class FieldTag(str, enum.Enum):
    FIELD_GF2 = "FIELD_GF2"
    FIELD_GF2N = "FIELD_GF2N"
    FIELD_Z2N = "FIELD_Z2N"
    DEFAULT = "DEFAULT"


class MaskMode(enum.IntEnum):
    NONE = 0b00
    BOOLEAN = 0b01
    AFFINE = 0b10
    ARITHMETIC = 0b11

    def __str__(self) -> str:
        return format(self.value, "02b")


TAG_TO_MODE: Mapping[FieldTag, MaskMode] = MappingProxyType(
    {
        FieldTag.FIELD_GF2: MaskMode.BOOLEAN,
        FieldTag.FIELD_GF2N: MaskMode.AFFINE,
        FieldTag.FIELD_Z2N: MaskMode.ARITHMETIC,
        FieldTag.DEFAULT: MaskMode.NONE,
    }
)

_GF2N, _GF2, _Z2N = FieldTag.FIELD_GF2N, FieldTag.FIELD_GF2, FieldTag.FIELD_Z2N

DEFAULT_LUT: Mapping[str, FieldTag] = MappingProxyType(
    {
        "saes64.encs": _GF2N,
        "saes64.encsm": _GF2N,
        "saes64.ds": _GF2N,
        "saes64.dsm": _GF2N,
        "saes64.im": _GF2N,
        "saes64.ks1": _GF2N,
        "saes64.ks2": _GF2N,
        "ssm4.ed": _GF2N,
        "ssm4.ks": _GF2N,
        "ssm3.p0": _GF2,
        "ssm3.p1": _Z2N,
        "ssha256.sig0": _GF2,
        "ssha256.sig1": _GF2,
        "ssha256.sum0": _Z2N,
        "ssha256.sum1": _Z2N,
        "ssha512.sig0": _GF2,
        "ssha512.sig1": _GF2,
        "ssha512.sum0": _Z2N,
        "ssha512.sum1": _Z2N,
    }
)


@dataclass(frozen=True, slots=True)
class MaskMetadata:
    """Two-bit mask mode plus share count, attached to a decoded instruction."""

    mask_mode: MaskMode
    mask_shares: int

    def __post_init__(self) -> None:
        if not 0 <= self.mask_shares <= 3:
            raise ValueError(f"mask_shares must fit in 2 bits, got {self.mask_shares}")
        if self.mask_mode is not MaskMode.NONE and self.mask_shares < 1:
            raise ValueError("a masked mode needs at least one share")
        if self.mask_mode is MaskMode.NONE and self.mask_shares != 0:
            raise ValueError("unmasked metadata carries no shares")

    @property
    def masked(self) -> bool:
        return self.mask_mode is not MaskMode.NONE


UNMASKED = MaskMetadata(MaskMode.NONE, 0)


@dataclass(frozen=True, slots=True)
class MaskPolicy:
    """Per-tag share counts; every masked tag defaults to one share."""

    shares: Mapping[FieldTag, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        merged = {tag: 1 for tag in (_GF2, _GF2N, _Z2N)}
        for tag, k in dict(self.shares).items():
            tag = FieldTag(tag)
            if tag is FieldTag.DEFAULT:
                raise ValueError("DEFAULT tag is never masked; it takes no share count")
            if k not in (1, 2, 3):
                raise ValueError(f"share count for {tag.value} must be 1, 2 or 3, got {k!r}")
            merged[tag] = k
        object.__setattr__(self, "shares", MappingProxyType(merged))

    def shares_for(self, tag: FieldTag) -> int:
        return 0 if tag is FieldTag.DEFAULT else self.shares[tag]

    @classmethod
    def uniform(cls, k: int) -> MaskPolicy:
        return cls({_GF2: k, _GF2N: k, _Z2N: k})

    @classmethod
    def parse(cls, text: str) -> MaskPolicy:
        """Parse ``KEY=VALUE`` lines; ``#`` starts a comment."""
        overrides: dict[FieldTag, int] = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"policy line {lineno}: expected KEY=VALUE, got {raw!r}")
            key = key.strip().upper()
            try:
                tag = FieldTag(key)
                k = int(value.strip())
            except ValueError:
                raise ValueError(f"policy line {lineno}: bad entry {raw!r}") from None
            overrides[tag] = k
        return cls(overrides)

    @classmethod
    def from_file(cls, path: str | os.PathLike[str]) -> MaskPolicy:
        return cls.parse(Path(path).read_text())

    @classmethod
    def from_env(cls) -> MaskPolicy:
        path = os.environ.get(POLICY_ENV)
        return cls.from_file(path) if path else cls()


DEFAULT_POLICY = MaskPolicy()


def derive_metadata(tag: FieldTag, policy: MaskPolicy = DEFAULT_POLICY) -> MaskMetadata:
    mode = TAG_TO_MODE[tag]
    if mode is MaskMode.NONE:
        return UNMASKED
    return MaskMetadata(mode, policy.shares_for(tag))


class FieldDetectionLayer:
    """Static opcode classifier; immutable after construction."""

    __slots__ = ("_lut", "_policy", "_meta_cache")

    def __init__(
        self,
        lut: Mapping[str, FieldTag | str] | None = None,
        policy: MaskPolicy = DEFAULT_POLICY,
    ) -> None:
        table = DEFAULT_LUT if lut is None else lut
        resolved: dict[CryptoOp, FieldTag] = {}
        for name, tag in table.items():
            op = CryptoOp(name) if not isinstance(name, CryptoOp) else name
            resolved[op] = FieldTag(tag)
        missing = set(CryptoOp) - set(resolved)
        if missing:
            names = ", ".join(sorted(op.value for op in missing))
            raise ValueError(f"lookup table has no entry for: {names}")
        self._lut = MappingProxyType(resolved)
        self._policy = policy
        self._meta_cache = {op: derive_metadata(tag, policy) for op, tag in resolved.items()}

    @property
    def policy(self) -> MaskPolicy:
        return self._policy

    @property
    def lut(self) -> Mapping[CryptoOp, FieldTag]:
        return self._lut

    def classify(self, op: Opcode) -> FieldTag:
        return self._lut.get(op, FieldTag.DEFAULT) if isinstance(op, CryptoOp) else FieldTag.DEFAULT

    def metadata(self, op: Opcode) -> MaskMetadata:
        return self._meta_cache.get(op, UNMASKED) if isinstance(op, CryptoOp) else UNMASKED


_DEFAULT_FDL = FieldDetectionLayer()


def classify(op: Opcode) -> FieldTag:
    """Field tag of ``op`` under the built-in table; non-crypto ops are DEFAULT."""
    return _DEFAULT_FDL.classify(op)
