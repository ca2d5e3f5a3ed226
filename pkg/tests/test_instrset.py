"""Instruction-set construction and its named variants."""

import pytest

from lgpspace.core import Instruction, RegisterConfig
from lgpspace.instrset import (VARIANT_NAMES, InstructionSet,
                               build_instruction_set, build_variant)


def test_default_set_is_fully_combinatorial():
    # R * |funcs| * (R + B)^2 members
    config = RegisterConfig(num_registers=8, num_features=2)
    assert len(build_instruction_set(config)) == 8 * 8 * 100 == 6400

    config = RegisterConfig(num_registers=4, num_features=1)
    assert len(build_instruction_set(config, ("add",))) == 100


def test_member_order_is_deterministic():
    config = RegisterConfig(num_registers=2, num_features=1)
    iset = build_instruction_set(config, ("add", "mul"))
    assert iset[0] == Instruction(0, "add", 0, 0)
    assert iset[1] == Instruction(0, "add", 0, 1)
    assert iset.index(Instruction(1, "mul", 2, 2)) == len(iset) - 1
    assert iset.size == len(iset) == 2 * 2 * 9


def test_rejects_empty_and_unknown_functions():
    config = RegisterConfig(num_registers=2, num_features=1)
    with pytest.raises(ValueError):
        build_instruction_set(config, ())
    with pytest.raises(ValueError, match="unknown function"):
        build_instruction_set(config, ("add", "hypot"))


def test_rejects_duplicates_and_bad_references():
    config = RegisterConfig(num_registers=2, num_features=1)
    ins = Instruction(0, "add", 0, 0)
    with pytest.raises(ValueError, match="duplicate"):
        InstructionSet(config, (ins, ins))
    with pytest.raises(ValueError, match="destination"):
        InstructionSet(config, (Instruction(2, "add", 0, 0),))
    with pytest.raises(ValueError, match="operand"):
        InstructionSet(config, (Instruction(0, "add", 0, 3),))
    with pytest.raises(ValueError, match="empty"):
        InstructionSet(config, ())


@pytest.fixture
def base():
    config = RegisterConfig(num_registers=2, num_features=1)
    return build_instruction_set(config)


def test_default_variant_is_identity(base):
    assert build_variant("default", base) is base


@pytest.mark.parametrize("name,factor", [("fx1.1", 1.1), ("fx2", 2.0),
                                         ("fx4", 4.0)])
def test_scaled_variants_double_the_set(base, name, factor):
    variant = build_variant(name, base)
    assert len(variant) == 2 * len(base)
    assert variant.members[:len(base)] == base.members
    extras = variant.members[len(base):]
    assert all(ins.wrapper == ("scale", factor) for ins in extras)
    assert variant.name == name


def test_exp_variant_adds_unary_members(base):
    variant = build_variant("exp", base)
    cfg = base.config
    added = len(variant) - len(base)
    assert added == cfg.num_registers * cfg.num_operands
    assert all(ins.op == "exp" and ins.src1 == ins.src2
               for ins in variant.members[len(base):])


@pytest.mark.parametrize("name,offset", [("add+100", 100.0),
                                         ("add+1000", 1000.0)])
def test_offset_variants_duplicate_add_members(base, name, offset):
    variant = build_variant(name, base)
    adds = [ins for ins in base.members if ins.op == "add"]
    assert len(variant) == len(base) + len(adds)
    assert all(ins.wrapper == ("offset", offset)
               for ins in variant.members[len(base):])


def test_every_variant_is_a_strict_superset(base):
    for name in VARIANT_NAMES:
        variant = build_variant(name, base)
        assert set(base.members) <= set(variant.members)
        if name != "default":
            assert len(variant) > len(base)


def test_unknown_variant_rejected(base):
    with pytest.raises(ValueError, match="unknown variant"):
        build_variant("fx8", base)


def test_offset_variant_needs_add_members():
    config = RegisterConfig(num_registers=2, num_features=1)
    mul_only = build_instruction_set(config, ("mul",))
    with pytest.raises(ValueError, match="no add members"):
        build_variant("add+100", mul_only)
