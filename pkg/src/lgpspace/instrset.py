"""Instruction-set construction.

The default set is fully combinatorial: every destination register crossed
with every function and every ordered pair of operand references, giving
n = R * |funcs| * (R + B)^2 members.  Unary functions keep their stored src2,
so each tuple is its own member.  Variant sets extend the default set with
wrapped or extra members; every variant is a strict superset of its base.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Tuple

from .core import DEFAULT_FUNCTIONS, FUNCTION_ARITY, Instruction, RegisterConfig

VARIANT_NAMES = ("default", "fx1.1", "fx2", "fx4", "exp", "add+100", "add+1000")


@dataclass(frozen=True)
class InstructionSet:
    """Immutable, deterministically ordered collection of members."""

    config: RegisterConfig
    members: Tuple[Instruction, ...]
    name: str = "default"
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self.members:
            raise ValueError("instruction set must not be empty")
        if len(set(self.members)) != len(self.members):
            raise ValueError("duplicate members in instruction set")
        for ins in self.members:
            if not 0 <= ins.dest < self.config.num_registers:
                raise ValueError(f"bad destination in {ins}")
            if not (0 <= ins.src1 < self.config.num_operands
                    and 0 <= ins.src2 < self.config.num_operands):
                raise ValueError(f"bad operand in {ins}")
        object.__setattr__(self, "_index",
                           {ins: k for k, ins in enumerate(self.members)})

    def __len__(self) -> int:
        return len(self.members)

    def __getitem__(self, k: int) -> Instruction:
        return self.members[k]

    def index(self, ins: Instruction) -> int:
        return self._index[ins]

    @property
    def size(self) -> int:
        return len(self.members)


def build_instruction_set(config: RegisterConfig,
                          funcs: Sequence[str] = DEFAULT_FUNCTIONS) -> InstructionSet:
    """Combinatorial closure over destinations, functions and operand pairs."""
    if not funcs:
        raise ValueError("need at least one function")
    for f in funcs:
        if f not in FUNCTION_ARITY:
            raise ValueError(f"unknown function {f!r}")
    width = config.num_operands
    members = tuple(
        Instruction(d, f, a, b)
        for d in range(config.num_registers)
        for f in funcs
        for a in range(width)
        for b in range(width))
    return InstructionSet(config, members)


def _scaled_copy(base: InstructionSet, factor: float, name: str) -> InstructionSet:
    extra = tuple(ins._replace(wrapper=("scale", factor)) for ins in base.members)
    return InstructionSet(base.config, base.members + extra, name)


def _offset_add_copy(base: InstructionSet, offset: float, name: str) -> InstructionSet:
    extra = tuple(ins._replace(wrapper=("offset", offset))
                  for ins in base.members if ins.op == "add")
    if not extra:
        raise ValueError("base set has no add members to duplicate")
    return InstructionSet(base.config, base.members + extra, name)


def _with_exp(base: InstructionSet, name: str) -> InstructionSet:
    # one unary exp member per (dest, src) pair; the inert src2 mirrors src1
    cfg = base.config
    extra = tuple(Instruction(d, "exp", s, s)
                  for d in range(cfg.num_registers)
                  for s in range(cfg.num_operands))
    return InstructionSet(cfg, base.members + extra, name)


def build_variant(name: str, base: InstructionSet) -> InstructionSet:
    """Named extensions of a base set used in the enrichment study."""
    if name == "default":
        return base
    if name == "fx1.1":
        return _scaled_copy(base, 1.1, name)
    if name == "fx2":
        return _scaled_copy(base, 2.0, name)
    if name == "fx4":
        return _scaled_copy(base, 4.0, name)
    if name == "exp":
        return _with_exp(base, name)
    if name == "add+100":
        return _offset_add_copy(base, 100.0, name)
    if name == "add+1000":
        return _offset_add_copy(base, 1000.0, name)
    raise ValueError(f"unknown variant {name!r}; known: {', '.join(VARIANT_NAMES)}")
