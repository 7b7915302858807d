/**
 * Client-side drop rules for the block canvas.
 *
 * These mirror the server's connection rules so drags the server would
 * reject never land on the canvas. They are deliberately a strict subset:
 * anything accepted here is connection-valid on the server, and the server
 * remains the authority for full validation.
 */

import type { ArgValue, BlockNode, CatalogKind, ParamSpec } from './types.js'

/** Number params that only accept whole values (mirrors server semantics). */
const INTEGER_PARAMS = new Set(['repeat.count', 'random_int.min', 'random_int.max'])

export interface BodyDrop {
  where: 'body'
  parent: string
  slot: string
  child: BlockNode
}

export interface ParamDrop {
  where: 'param'
  parent: string
  param: string
  child: BlockNode
}

export type DropCase = BodyDrop | ParamDrop

function isNumber(value: ArgValue | undefined): value is number {
  return typeof value === 'number' && Number.isFinite(value)
}

function isWhole(value: number): boolean {
  return Number.isInteger(value)
}

export class DropRules {
  private readonly byId = new Map<string, CatalogKind>()

  constructor(kinds: CatalogKind[]) {
    for (const kind of kinds) {
      this.byId.set(kind.id, kind)
    }
  }

  kind(id: string): CatalogKind | undefined {
    return this.byId.get(id)
  }

  /** Can this block sit in a statement sequence of the parent kind? */
  canPlaceInBody(parentId: string, slot: string, childId: string): boolean {
    const parent = this.byId.get(parentId)
    const child = this.byId.get(childId)
    if (!parent || !child) return false
    if (!parent.child_slots.includes(slot)) return false
    return child.connects_as === 'statement'
  }

  /** Can this value block plug into the named parameter of the parent kind? */
  canPlugValue(parentId: string, paramName: string, child: BlockNode): boolean {
    const parent = this.byId.get(parentId)
    const childKind = this.byId.get(child.kind)
    if (!parent || !childKind) return false
    const spec = parent.params.find((p) => p.name === paramName)
    if (!spec) return false
    if (spec.slot.type !== 'number' || !spec.accepts_value_block) return false
    if (childKind.connects_as !== 'value') return false
    return this.valueStaysInRange(parent, spec, child)
  }

  allows(drop: DropCase): boolean {
    if (drop.where === 'body') {
      return this.canPlaceInBody(drop.parent, drop.slot, drop.child.kind)
    }
    return this.canPlugValue(drop.parent, drop.param, drop.child)
  }

  private valueStaysInRange(parent: CatalogKind, spec: ParamSpec, child: BlockNode): boolean {
    const lo = spec.slot.min ?? -Infinity
    const hi = spec.slot.max ?? Infinity
    const wholeOnly = INTEGER_PARAMS.has(`${parent.id}.${spec.name}`)
    if (child.kind === 'number') {
      const literal = child.args['value']
      if (!isNumber(literal)) return false
      if (literal < lo || literal > hi) return false
      return !wholeOnly || isWhole(literal)
    }
    if (child.kind === 'random_int') {
      const min = child.args['min']
      const max = child.args['max']
      if (!isNumber(min) || !isNumber(max)) return false
      if (!isWhole(min) || !isWhole(max)) return false
      if (min > max) return false
      return min >= lo && max <= hi
    }
    return false
  }
}

/** Sensible default argument values for a freshly dropped block. */
export function defaultArgs(kind: CatalogKind): Record<string, number | string> {
  const args: Record<string, number | string> = {}
  for (const spec of kind.params) {
    if (spec.slot.type === 'enum') {
      args[spec.name] = spec.slot.options?.[0] ?? ''
    } else if (spec.slot.type === 'text') {
      args[spec.name] = ''
    } else {
      const lo = spec.slot.min ?? 0
      const hi = spec.slot.max ?? 0
      const whole = INTEGER_PARAMS.has(`${kind.id}.${spec.name}`)
      const preferred = lo <= 1 && hi >= 1 ? 1 : lo
      args[spec.name] = whole ? Math.ceil(preferred) : preferred
    }
  }
  return args
}

/** A fresh block instance of the given kind with default args. */
export function newBlock(kind: CatalogKind): BlockNode {
  const children: Record<string, BlockNode[]> = {}
  for (const slot of kind.child_slots) {
    children[slot] = []
  }
  return { kind: kind.id, args: defaultArgs(kind), children }
}
