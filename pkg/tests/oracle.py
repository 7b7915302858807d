"""Independent brute-force rule walker used to cross-check the validator.

Deliberately written as a flat rule-by-rule scan over the tree, sharing
only the catalog data and the violation-code vocabulary with the real
validator. Produces (path, code) pairs.
"""

from __future__ import annotations

from storybot.catalog import Catalog, EnumSlot, NumberSlot, TextSlot
from storybot.program import Block, BlockProgram

INTEGER_PARAMS = {("repeat", "count"), ("random_int", "min"), ("random_int", "max")}


def is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def is_whole(value) -> bool:
    return is_number(value) and float(value) == int(value)


def walk_violations(program: BlockProgram, catalog: Catalog) -> list[tuple[str, str]]:
    found: list[tuple[str, str]] = []

    if program.version != 1 or isinstance(program.version, bool):
        found.append(("/version", "bad-version"))
    if not (isinstance(program.seed, int) and not isinstance(program.seed, bool) and program.seed >= 0):
        found.append(("/seed", "bad-seed"))

    def scan_block(block: Block, path: str) -> None:
        kind = catalog.by_id.get(block.kind_id)
        if kind is None:
            return
        declared = [p.name for p in kind.params]
        for name in declared:
            if name not in block.args:
                found.append((f"{path}/{name}", "missing-arg"))
        for name in block.args:
            if name not in declared:
                found.append((f"{path}/{name}", "unexpected-arg"))
        for spec in kind.params:
            if spec.name not in block.args:
                continue
            value = block.args[spec.name]
            arg_path = f"{path}/{spec.name}"
            if isinstance(value, Block):
                scan_plugged(kind, spec, value, arg_path)
            else:
                scan_literal(kind, spec, value, arg_path)
        for slot_name in kind.child_slots:
            if slot_name not in block.children:
                found.append((f"{path}/{slot_name}", "missing-child"))
        for name, seq in block.children.items():
            if name not in kind.child_slots:
                found.append((f"{path}/{name}", "unexpected-child"))
                continue
            for i, child in enumerate(seq):
                child_path = f"{path}/{name}/{i}"
                child_kind = catalog.by_id.get(child.kind_id)
                if child_kind is None:
                    found.append((child_path, "unknown-kind"))
                    continue
                if child_kind.connects_as != "statement":
                    found.append((child_path, "not-statement"))
                scan_block(child, child_path)

    def scan_literal(kind, spec, value, path: str) -> None:
        slot = spec.slot
        if isinstance(slot, NumberSlot):
            if not is_number(value):
                found.append((path, "type-mismatch"))
            elif value < slot.min or value > slot.max:
                found.append((path, "out-of-range"))
            elif (kind.id, spec.name) in INTEGER_PARAMS and not is_whole(value):
                found.append((path, "not-integer"))
        elif isinstance(slot, TextSlot):
            if not isinstance(value, str):
                found.append((path, "type-mismatch"))
            elif len(value) > slot.max_len:
                found.append((path, "text-too-long"))
        elif isinstance(slot, EnumSlot):
            if not isinstance(value, str):
                found.append((path, "type-mismatch"))
            elif value not in slot.options:
                found.append((path, "bad-enum"))

    def scan_plugged(outer_kind, spec, nested: Block, path: str) -> None:
        slot = spec.slot
        if not (isinstance(slot, NumberSlot) and spec.accepts_value_block):
            found.append((path, "value-not-allowed"))
        nested_kind = catalog.by_id.get(nested.kind_id)
        if nested_kind is None:
            found.append((path, "unknown-kind"))
            return
        if nested_kind.connects_as != "value":
            found.append((path, "not-value"))
        scan_block(nested, path)
        if not isinstance(slot, NumberSlot):
            return
        if nested.kind_id == "number":
            literal = nested.args.get("value")
            if is_number(literal):
                if literal < slot.min or literal > slot.max:
                    found.append((path, "value-out-of-range"))
                elif (outer_kind.id, spec.name) in INTEGER_PARAMS and not is_whole(literal):
                    found.append((path, "not-integer"))
        elif nested.kind_id == "random_int":
            lo, hi = nested.args.get("min"), nested.args.get("max")
            if is_number(lo) and is_number(hi):
                if lo > hi:
                    found.append((path, "bad-range"))
                elif lo < slot.min or hi > slot.max:
                    found.append((path, "value-out-of-range"))

    root_kind = catalog.by_id.get(program.root.kind_id)
    if root_kind is None:
        found.append(("/root", "unknown-kind"))
    else:
        if root_kind.connects_as != "root":
            found.append(("/root", "bad-root"))
        scan_block(program.root, "/root")
    return found
