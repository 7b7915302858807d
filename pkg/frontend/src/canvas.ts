/**
 * The block canvas model: a mutable block tree that only ever changes
 * through drop-rule-checked operations, and always serializes to the wire
 * program format (never a widget-native shape).
 */

import { DropRules, newBlock } from './dropRules.js'
import type { BlockNode, CatalogKind, ProgramDoc } from './types.js'

export class ProgramCanvas {
  readonly root: BlockNode
  seed = 0

  constructor(private readonly rules: DropRules) {
    const start = rules.kind('start')
    if (!start) throw new Error('catalog has no start kind')
    this.root = newBlock(start)
  }

  /** Locate a block by its body path, e.g. [] is the root, [2] the third block. */
  blockAt(path: number[]): BlockNode {
    let node = this.root
    for (const index of path) {
      const body = node.children['body'] ?? []
      const next = body[index]
      if (!next) throw new Error(`no block at ${path.join('/')}`)
      node = next
    }
    return node
  }

  /** Drop a new block of `kindId` into the body of the block at `parentPath`. */
  dropStatement(parentPath: number[], kindId: string, position?: number): boolean {
    const parent = this.blockAt(parentPath)
    if (!this.rules.canPlaceInBody(parent.kind, 'body', kindId)) return false
    const kind = this.rules.kind(kindId) as CatalogKind
    const body = parent.children['body']
    const block = newBlock(kind)
    body.splice(position ?? body.length, 0, block)
    return true
  }

  /** Plug a fresh value block into a parameter slot. */
  plugValue(parentPath: number[], param: string, kindId: string): boolean {
    const parent = this.blockAt(parentPath)
    const kind = this.rules.kind(kindId)
    if (!kind) return false
    const candidate = newBlock(kind)
    if (!this.rules.canPlugValue(parent.kind, param, candidate)) return false
    parent.args[param] = candidate
    return true
  }

  setArg(path: number[], param: string, value: number | string): void {
    this.blockAt(path).args[param] = value
  }

  remove(parentPath: number[], index: number): void {
    this.blockAt(parentPath).children['body'].splice(index, 1)
  }

  toProgram(): ProgramDoc {
    return { version: 1, seed: this.seed, root: structuredClone(this.root) }
  }

  loadProgram(doc: ProgramDoc): void {
    this.seed = doc.seed
    this.root.args = structuredClone(doc.root.args)
    this.root.children = structuredClone(doc.root.children)
  }

  get length(): number {
    return this.root.children['body'].length
  }
}
