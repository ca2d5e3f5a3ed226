"""Register-machine core: instructions, program semantics, intron analysis.

A program is a plain tuple of Instruction records executed top to bottom on a
register file.  Operand references are encoded as a single integer: values
below ``num_registers`` address registers, values from ``num_registers`` up
address the (read-only) input features.  The semantics of a program on a batch
of input cases is the full register-file-plus-features matrix after execution,
one row per case.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Tuple

import numpy as np

VALUE_CLAMP = 1e12
DIV_GUARD = 1e-9

# function name -> arity; unary functions carry an inert src2 operand that is
# stored (and compared) but never read.
FUNCTION_ARITY = {
    "add": 2,
    "sub": 2,
    "mul": 2,
    "div": 2,
    "sin": 1,
    "cos": 1,
    "sqrt": 1,
    "log": 1,
    "exp": 1,
}

DEFAULT_FUNCTIONS = ("add", "sub", "mul", "div", "sin", "cos", "sqrt", "log")

UNARY_FUNCTIONS = frozenset(n for n, a in FUNCTION_ARITY.items() if a == 1)


class Instruction(NamedTuple):
    """One register assignment: ``dest = op(src1, src2)``.

    ``wrapper`` optionally post-processes the raw function output before
    clamping: ``("scale", c)`` multiplies by c, ``("offset", c)`` adds c.
    Two instructions differing only in an inert src2 or in their wrapper are
    distinct set members on purpose.
    """

    dest: int
    op: str
    src1: int
    src2: int
    wrapper: Optional[Tuple[str, float]] = None


Program = Tuple[Instruction, ...]


@dataclass(frozen=True)
class RegisterConfig:
    """Shape of the register machine."""

    num_registers: int = 8
    num_features: int = 1
    output_registers: Tuple[int, ...] = (0,)

    def __post_init__(self):
        if self.num_registers < 1:
            raise ValueError("need at least one register")
        if self.num_features < 1:
            raise ValueError("need at least one input feature")
        if not self.output_registers:
            raise ValueError("need at least one output register")
        for r in self.output_registers:
            if not 0 <= r < self.num_registers:
                raise ValueError(f"output register {r} out of range")

    @property
    def num_operands(self) -> int:
        """Width of the operand space (registers plus features)."""
        return self.num_registers + self.num_features


@dataclass(frozen=True)
class Semantics:
    """Register file contents across all cases: shape (cases, registers+features)."""

    values: np.ndarray

    @property
    def num_cases(self) -> int:
        return self.values.shape[0]

    def output(self, config: RegisterConfig) -> np.ndarray:
        return self.values[:, config.output_registers[0]]

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)


def semantic_distance(a: Semantics, b: Semantics) -> float:
    """Euclidean distance between two full semantics matrices."""
    return float(np.linalg.norm(a.values - b.values))


def _clamp(values: np.ndarray) -> np.ndarray:
    return np.clip(np.nan_to_num(values, nan=0.0), -VALUE_CLAMP, VALUE_CLAMP)


def apply_function(name: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Total version of the primitive ``name`` on already-clamped inputs."""
    if name == "add":
        return a + b
    if name == "sub":
        return a - b
    if name == "mul":
        return a * b
    if name == "div":
        # protected division: return the numerator for near-zero denominators
        small = np.abs(b) < DIV_GUARD
        return np.where(small, a, a / np.where(small, 1.0, b))
    if name == "sin":
        return np.sin(a)
    if name == "cos":
        return np.cos(a)
    if name == "sqrt":
        return np.sqrt(np.abs(a))
    if name == "log":
        small = np.abs(a) < DIV_GUARD
        return np.where(small, 0.0, np.log(np.where(small, 1.0, np.abs(a))))
    if name == "exp":
        return np.exp(np.clip(a, -709.0, 709.0))
    raise ValueError(f"unknown function {name!r}")


def initial_semantics(config: RegisterConfig, features: np.ndarray) -> Semantics:
    """Build the starting register file from a feature matrix (cases, features).

    Register i is initialized from feature (i mod num_features); the feature
    columns themselves are appended read-only.
    """
    feats = np.asarray(features, dtype=float)
    if feats.ndim == 1:
        feats = feats[:, None]
    if feats.shape[1] != config.num_features:
        raise ValueError(
            f"expected {config.num_features} feature columns, got {feats.shape[1]}")
    cases = feats.shape[0]
    vals = np.empty((cases, config.num_operands))
    for r in range(config.num_registers):
        vals[:, r] = feats[:, r % config.num_features]
    vals[:, config.num_registers:] = feats
    return Semantics(vals)


def execute(program: Iterable[Instruction], start: Semantics,
            config: RegisterConfig, skip_introns: bool = False) -> Semantics:
    """Run a program sequentially on a copy of ``start``.

    ``skip_introns=True`` executes structurally effective instructions only;
    by construction the output is identical (see intron_mask).
    """
    prog = tuple(program)
    if skip_introns:
        mask = intron_mask(prog, config)
        prog = tuple(ins for ins, dead in zip(prog, mask) if not dead)
    vals = start.values.copy()
    for ins in prog:
        out = apply_function(ins.op, vals[:, ins.src1], vals[:, ins.src2])
        if ins.wrapper is not None:
            kind, c = ins.wrapper
            if kind == "scale":
                out = out * c
            elif kind == "offset":
                out = out + c
            else:
                raise ValueError(f"unknown wrapper {kind!r}")
        vals[:, ins.dest] = _clamp(out)
    return Semantics(vals)


def execute_prefixes(program: Iterable[Instruction], start: Semantics,
                     config: RegisterConfig) -> list[Semantics]:
    """Semantics after every prefix of the program (length m+1, starts with start)."""
    out = [Semantics(start.values.copy())]
    vals = start.values
    for ins in program:
        vals = execute((ins,), Semantics(vals), config).values
        out.append(Semantics(vals))
    return out


def transform_values(values: np.ndarray, ins: Instruction) -> np.ndarray:
    """Apply one instruction to a batch of register files of shape (..., slots).

    Returns a new array; matches ``execute`` including wrapper and clamping.
    """
    out = np.array(values, copy=True)
    res = apply_function(ins.op, out[..., ins.src1], out[..., ins.src2])
    if ins.wrapper is not None:
        kind, c = ins.wrapper
        if kind == "scale":
            res = res * c
        elif kind == "offset":
            res = res + c
        else:
            raise ValueError(f"unknown wrapper {kind!r}")
    out[..., ins.dest] = _clamp(res)
    return out


def _register_sources(ins: Instruction, num_registers: int) -> Tuple[int, ...]:
    if ins.op in UNARY_FUNCTIONS:
        srcs = (ins.src1,)
    else:
        srcs = (ins.src1, ins.src2)
    return tuple(s for s in srcs if s < num_registers)


def effective_register_slots(program: Program,
                             config: RegisterConfig) -> list[frozenset]:
    """Effective register sets at every insertion slot, computed backward.

    Slot i is the point just before instruction i; slot m (= len(program)) is
    the program end.  An instruction inserted at slot i is an intron exactly
    when its destination is outside the returned set for that slot.
    """
    m = len(program)
    slots: list = [None] * (m + 1)
    eff = set(config.output_registers)
    slots[m] = frozenset(eff)
    for i in range(m - 1, -1, -1):
        ins = program[i]
        if ins.dest in eff:
            eff.discard(ins.dest)
            eff.update(_register_sources(ins, config.num_registers))
        slots[i] = frozenset(eff)
    return slots


def intron_mask(program: Program, config: RegisterConfig) -> np.ndarray:
    """Boolean mask over instructions, True where structurally ineffective.

    Backward liveness pass: an instruction whose destination is not in the
    current effective set cannot influence any output register.  Removing any
    masked instruction leaves the program output bit-identical.
    """
    m = len(program)
    mask = np.zeros(m, dtype=bool)
    eff = set(config.output_registers)
    for i in range(m - 1, -1, -1):
        ins = program[i]
        if ins.dest in eff:
            eff.discard(ins.dest)
            eff.update(_register_sources(ins, config.num_registers))
        else:
            mask[i] = True
    return mask


def count_exons(program: Program, config: RegisterConfig) -> int:
    return int(len(program) - intron_mask(program, config).sum())


def intron_choice_count(effective_dests: int, num_registers: int,
                        set_size: int) -> float:
    """Number of set members that are introns at a slot with k effective
    destination registers, assuming destinations are uniform over the file:
    (R - k) * n / R.
    """
    if not 0 <= effective_dests <= num_registers:
        raise ValueError("effective destination count out of range")
    return (num_registers - effective_dests) * set_size / num_registers


# --- text round-trip ---------------------------------------------------------

_INS_RE = re.compile(
    r"^R(?P<dest>\d+)\s*=\s*(?:(?P<scale>[-0-9.eE+]+)\*)?"
    r"(?P<op>[a-z]+)\((?P<a>[Rx]\d+),\s*(?P<b>[Rx]\d+)\)"
    r"(?:\+(?P<offset>[-0-9.eE+]+))?$")


def _format_operand(ref: int, config: RegisterConfig) -> str:
    if ref < config.num_registers:
        return f"R{ref}"
    return f"x{ref - config.num_registers}"


def _parse_operand(token: str, config: RegisterConfig) -> int:
    idx = int(token[1:])
    if token[0] == "R":
        if idx >= config.num_registers:
            raise ValueError(f"register {token} out of range")
        return idx
    if idx >= config.num_features:
        raise ValueError(f"feature {token} out of range")
    return config.num_registers + idx


def format_instruction(ins: Instruction, config: RegisterConfig) -> str:
    body = (f"{ins.op}({_format_operand(ins.src1, config)}, "
            f"{_format_operand(ins.src2, config)})")
    if ins.wrapper is not None:
        kind, c = ins.wrapper
        if kind == "scale":
            body = f"{c!r}*{body}"
        else:
            body = f"{body}+{c!r}"
    return f"R{ins.dest} = {body}"


def parse_instruction(text: str, config: RegisterConfig) -> Instruction:
    m = _INS_RE.match(text.strip())
    if m is None:
        raise ValueError(f"cannot parse instruction {text!r}")
    op = m.group("op")
    if op not in FUNCTION_ARITY:
        raise ValueError(f"unknown function {op!r}")
    wrapper = None
    if m.group("scale") is not None:
        wrapper = ("scale", float(m.group("scale")))
    elif m.group("offset") is not None:
        wrapper = ("offset", float(m.group("offset")))
    return Instruction(int(m.group("dest")), op,
                       _parse_operand(m.group("a"), config),
                       _parse_operand(m.group("b"), config), wrapper)


def program_to_text(program: Program, config: RegisterConfig) -> str:
    return "\n".join(format_instruction(ins, config) for ins in program)


def program_from_text(text: str, config: RegisterConfig) -> Program:
    lines = [ln for ln in (t.strip() for t in text.splitlines()) if ln]
    return tuple(parse_instruction(ln, config) for ln in lines)
