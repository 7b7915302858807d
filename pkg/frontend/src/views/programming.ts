/**
 * Programming and deployment screen: the block drawer (from the exported
 * catalog), the drag-and-drop canvas constrained by the client drop rules,
 * the 2D simulator with speech display, the goals reference panel, and the
 * robot connect/run controls. Running on the robot is only offered once
 * connected, and always runs the simulator alongside.
 */

import type { ApiClient } from '../api.js'
import { ProgramCanvas } from '../canvas.js'
import { clear, el } from '../dom.js'
import { DropRules } from '../dropRules.js'
import { TracePlayer } from '../simulatorPlayer.js'
import type { BlockNode, CatalogKind, SessionDoc, Violation } from '../types.js'

export interface ProgrammingDeps {
  api: ApiClient
  session: SessionDoc
  kinds: CatalogKind[]
  onSessionChanged: (session: SessionDoc) => void
  onError: (message: string) => void
}

export interface ProgrammingScreen {
  canvas: ProgramCanvas
  rules: DropRules
  player: TracePlayer
  syncProgram(): Promise<void>
  runSim(): Promise<void>
  runBoth(): Promise<void>
  connect(ip: string, port?: number): Promise<void>
}

function describeArgs(block: BlockNode): string {
  const parts: string[] = []
  for (const [name, value] of Object.entries(block.args)) {
    if (typeof value === 'object') {
      const nested = Object.entries(value.args)
        .map(([k, v]) => `${k}=${String(v)}`)
        .join(' ')
      parts.push(`${name}=${value.kind}(${nested})`)
    } else {
      parts.push(`${name}=${String(value)}`)
    }
  }
  return parts.join(', ')
}

export function renderProgrammingPhase(container: HTMLElement, deps: ProgrammingDeps): ProgrammingScreen {
  const { api, session, kinds } = deps
  clear(container)

  const rules = new DropRules(kinds)
  const canvas = new ProgramCanvas(rules)
  if (session.program) {
    canvas.loadProgram(session.program)
  }

  // --- block drawer -------------------------------------------------------
  const drawer = el('section', { class: 'drawer' }, el('h3', {}, 'Blocks'))
  const byCategory = new Map<string, CatalogKind[]>()
  for (const kind of kinds) {
    if (kind.connects_as === 'root') continue
    const group = byCategory.get(kind.category) ?? []
    group.push(kind)
    byCategory.set(kind.category, group)
  }
  for (const [category, group] of byCategory) {
    const list = el('div', { class: 'drawer-category-blocks' })
    for (const kind of group) {
      const chip = el('div', {
        class: `drawer-block ${kind.connects_as}`,
        draggable: 'true',
        'data-kind': kind.id,
      }, kind.id)
      chip.addEventListener('dragstart', (event) => {
        ;(event as DragEvent).dataTransfer?.setData('text/block-kind', kind.id)
      })
      list.append(chip)
    }
    drawer.append(el('div', { class: 'drawer-category' }, el('h4', {}, category), list))
  }

  // --- canvas -------------------------------------------------------------
  const canvasEl = el('section', { class: 'canvas' }, el('h3', {}, 'Program'))
  const reportEl = el('div', { class: 'validation-report' })

  const renderCanvas = () => {
    const existing = canvasEl.querySelector('.canvas-body')
    if (existing) existing.remove()
    const bodyEl = el('div', { class: 'canvas-body' })
    bodyEl.append(renderSequence([], canvas.root))
    canvasEl.append(bodyEl)
  }

  const renderSequence = (path: number[], block: BlockNode): HTMLElement => {
    const sequence = el('div', { class: 'sequence', 'data-path': path.join('/') })
    const blocks = block.children['body'] ?? []
    blocks.forEach((child, index) => {
      const row = el('div', { class: `block ${child.kind}`, 'data-kind': child.kind })
      row.append(el('span', { class: 'block-label' }, `${child.kind}(${describeArgs(child)})`))
      const remove = el('button', { class: 'remove' }, '×')
      remove.addEventListener('click', () => {
        canvas.remove(path, index)
        renderCanvas()
        void syncProgram()
      })
      row.append(remove)
      if ((child.children['body'] ?? null) !== null && rules.kind(child.kind)?.child_slots.length) {
        row.append(renderSequence([...path, index], child))
      }
      sequence.append(row)
    })
    const dropZone = el('div', { class: 'drop-zone' }, 'drop a block here')
    dropZone.addEventListener('dragover', (event) => event.preventDefault())
    dropZone.addEventListener('drop', (event) => {
      event.preventDefault()
      const kindId = (event as DragEvent).dataTransfer?.getData('text/block-kind')
      if (!kindId) return
      if (canvas.dropStatement(path, kindId)) {
        dropZone.classList.remove('drop-rejected')
        renderCanvas()
        void syncProgram()
      } else {
        // Connection rules refuse the drop client-side; the server stays
        // authoritative for anything subtler.
        dropZone.classList.add('drop-rejected')
      }
    })
    sequence.append(dropZone)
    return sequence
  }

  const renderReport = (violations: Violation[]) => {
    clear(reportEl)
    if (!violations.length) {
      reportEl.append(el('div', { class: 'report-ok' }, 'program is valid'))
      return
    }
    for (const violation of violations) {
      reportEl.append(
        el('div', { class: 'violation', 'data-path': violation.path },
          `${violation.path}: ${violation.message}`),
      )
    }
  }

  const syncProgram = async (): Promise<void> => {
    try {
      const response = await api.putProgram(session.id, canvas.toProgram())
      renderReport(response.report)
    } catch (err) {
      deps.onError(String(err))
    }
  }

  // --- simulator ----------------------------------------------------------
  const led = el('div', { class: 'sim-led' })
  const face = el('div', { class: 'sim-face' }, 'default')
  const speech = el('div', { class: 'sim-speech' })
  const audio = el('div', { class: 'sim-audio' })
  const head = el('div', { class: 'sim-head' })
  const arms = el('div', { class: 'sim-arms' })
  const clock = el('div', { class: 'sim-clock' }, '0.0 s')
  const player = new TracePlayer({ led, face, speech, audio, head, arms, clock })
  const simPanel = el(
    'section',
    { class: 'simulator' },
    el('h3', {}, 'Simulator'),
    el('div', { class: 'sim-robot' }, face, led, head, arms),
    speech,
    audio,
    clock,
  )

  // --- goals reference panel ------------------------------------------------
  const goalsPanel = el('section', { class: 'goals-reference' }, el('h3', {}, 'Your goals'))
  const currentGoals = session.goalsets.at(-1)
  if (currentGoals) {
    currentGoals.goals.forEach((goal, goalIndex) => {
      const item = el('div', { class: `goal-ref ${goal.verdict.status}` }, `${goalIndex + 1}. ${goal.goal}`)
      goalsPanel.append(item)
    })
  } else {
    goalsPanel.append(el('p', {}, 'No goals generated yet.'))
  }

  // --- connect + run ---------------------------------------------------------
  const indicator = el('span', { class: 'indicator red', title: 'not connected' })
  const ipInput = el('input', { class: 'ip-input', placeholder: 'robot IP address' }) as HTMLInputElement
  const portInput = el('input', { class: 'port-input', placeholder: '80' }) as HTMLInputElement
  const connectButton = el('button', { class: 'connect' }, 'Connect')
  const runSimButton = el('button', { class: 'run-sim' }, 'Run in simulator')
  const runBothButton = el('button', { class: 'run-both' }, 'Run on simulator + robot') as HTMLButtonElement

  const applyConnection = (connected: boolean) => {
    indicator.classList.toggle('green', connected)
    indicator.classList.toggle('red', !connected)
    runBothButton.disabled = !connected
  }
  applyConnection(session.connection?.state === 'connected')

  const connect = async (ip: string, port?: number): Promise<void> => {
    try {
      const connection = await api.connect(session.id, ip, port)
      applyConnection(connection.state === 'connected')
      if (connection.state !== 'connected' && connection.last_error) {
        deps.onError(`connection failed: ${connection.last_error}`)
      }
    } catch (err) {
      applyConnection(false)
      deps.onError(String(err))
    }
  }
  connectButton.addEventListener('click', () => {
    const port = portInput.value ? Number(portInput.value) : undefined
    void connect(ipInput.value.trim(), port)
  })

  const runSim = async (): Promise<void> => {
    await syncProgram()
    try {
      const result = await api.run(session.id, 'sim')
      player.play(result.trace)
    } catch (err) {
      deps.onError(String(err))
    }
  }
  const runBoth = async (): Promise<void> => {
    await syncProgram()
    try {
      const result = await api.run(session.id, 'sim_and_robot')
      player.play(result.trace)
      if (result.report && result.report.outcome.status !== 'completed') {
        deps.onError(`deployment aborted: ${result.report.outcome.reason ?? 'unknown'}`)
      }
    } catch (err) {
      deps.onError(String(err))
    }
  }
  runSimButton.addEventListener('click', () => void runSim())
  runBothButton.addEventListener('click', () => void runBoth())

  const connectPanel = el(
    'section',
    { class: 'connect-panel' },
    el('h3', {}, 'Robot'),
    el('div', { class: 'connect-row' }, indicator, ipInput, portInput, connectButton),
    el('div', { class: 'run-row' }, runSimButton, runBothButton),
  )

  renderCanvas()
  renderReport([])
  container.append(drawer, canvasEl, reportEl, simPanel, goalsPanel, connectPanel)

  return { canvas, rules, player, syncProgram, runSim, runBoth, connect }
}
