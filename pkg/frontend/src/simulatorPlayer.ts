/**
 * 2D schematic playback of a simulator state trace: LED swatch, face
 * sprite label, joint-angle gauges, and the speech/audio bubbles. The
 * trace contract is renderer-agnostic; this renderer is deliberately
 * simple DOM.
 */

import type { RobotStateDoc, StateTraceDoc } from './types.js'

export interface PlayerElements {
  led: HTMLElement
  face: HTMLElement
  speech: HTMLElement
  audio: HTMLElement
  head: HTMLElement
  arms: HTMLElement
  clock: HTMLElement
}

export class TracePlayer {
  private timer: ReturnType<typeof setTimeout> | null = null

  constructor(private readonly el: PlayerElements) {}

  applyFrame(frame: RobotStateDoc): void {
    this.el.led.style.backgroundColor = `rgb(${frame.led.r}, ${frame.led.g}, ${frame.led.b})`
    this.el.face.textContent = frame.face
    this.el.face.dataset.expression = frame.face
    this.el.speech.textContent = frame.speaking ?? ''
    this.el.speech.style.visibility = frame.speaking ? 'visible' : 'hidden'
    this.el.audio.textContent = frame.audio ? `♪ ${frame.audio}` : ''
    this.el.head.textContent =
      `pitch ${frame.head.pitch.toFixed(1)}° roll ${frame.head.roll.toFixed(1)}° yaw ${frame.head.yaw.toFixed(1)}°`
    this.el.arms.textContent =
      `left ${frame.arms.left.toFixed(1)}° right ${frame.arms.right.toFixed(1)}°`
    this.el.clock.textContent = `${frame.clock.toFixed(1)} s`
  }

  /** Play all frames, pacing by their clock deltas scaled by `speed`. */
  play(trace: StateTraceDoc, speed = 1, onDone?: () => void): void {
    this.stop()
    const frames = trace.frames
    const showFrame = (index: number) => {
      this.applyFrame(frames[index])
      if (index + 1 >= frames.length) {
        this.timer = null
        onDone?.()
        return
      }
      const delay = ((frames[index + 1].clock - frames[index].clock) * 1000) / speed
      this.timer = setTimeout(() => showFrame(index + 1), Math.max(0, delay))
    }
    if (frames.length) showFrame(0)
  }

  stop(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer)
      this.timer = null
    }
  }

  get playing(): boolean {
    return this.timer !== null
  }
}
