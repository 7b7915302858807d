/**
 * Narrative phase screen: task blurb, agent chat with suggestion chips,
 * the seven-milestone checklist with per-milestone help, and the robot
 * capability panel.
 */

import type { ApiClient } from '../api.js'
import { clear, el } from '../dom.js'
import type { SessionDoc } from '../types.js'

export interface NarrativeDeps {
  api: ApiClient
  session: SessionDoc
  capabilityText: string
  onSessionChanged: (session: SessionDoc) => void
  onError: (message: string) => void
}

const TASK_BLURB =
  'Invent a short story starring your robot. Chat with the agent to shape it, ' +
  'tick off the story milestones as you cover them, then summarize the story ' +
  'to move on to goals.'

export function renderNarrativePhase(container: HTMLElement, deps: NarrativeDeps): void {
  const { api, session } = deps
  clear(container)

  const chatLog = el('div', { class: 'chat-log' })
  for (const turn of session.narrative.transcript) {
    chatLog.append(el('div', { class: `turn ${turn.author}` }, `${turn.author}: ${turn.text}`))
  }

  const chips = el('div', { class: 'suggestion-chips' })
  const input = el('input', { class: 'chat-input', placeholder: 'Tell the agent about your story…' })
  const send = el('button', { class: 'chat-send' }, 'Send')

  const submit = async (message: string) => {
    if (!message) return
    try {
      await api.chat(session.id, message)
      deps.onSessionChanged(await api.getSession(session.id))
    } catch (err) {
      deps.onError(String(err))
    }
  }
  send.addEventListener('click', () => void submit(input.value.trim()))
  input.addEventListener('keydown', (event) => {
    if ((event as KeyboardEvent).key === 'Enter') void submit(input.value.trim())
  })

  const checklist = el('div', { class: 'milestones' })
  for (const milestone of session.narrative.milestones) {
    const checkbox = el('input', { type: 'checkbox', 'data-kind': milestone.kind }) as HTMLInputElement
    checkbox.checked = milestone.complete
    checkbox.addEventListener('change', () => {
      void api
        .setMilestone(session.id, milestone.kind, checkbox.checked)
        .then(() => api.getSession(session.id))
        .then(deps.onSessionChanged)
        .catch((err) => deps.onError(String(err)))
    })
    const help = el('button', { class: 'help-me', 'data-kind': milestone.kind }, 'Help Me')
    help.addEventListener('click', () => {
      void api
        .requestHelp(session.id, milestone.kind)
        .then((response) => {
          clear(chips)
          for (const suggestion of response.suggestions) {
            const chip = el('button', { class: 'chip' }, suggestion)
            // Accepting a suggestion is a separate user action: it goes
            // back through chat so the transcript shows the choice.
            chip.addEventListener('click', () => void submit(suggestion))
            chips.append(chip)
          }
        })
        .catch((err) => deps.onError(String(err)))
    })
    checklist.append(el('label', { class: 'milestone' }, checkbox, ` ${milestone.kind} `, help))
  }

  const summarizeButton = el('button', { class: 'summarize' }, 'Write my story text')
  summarizeButton.addEventListener('click', () => {
    void api
      .summarize(session.id)
      .then(() => api.getSession(session.id))
      .then(deps.onSessionChanged)
      .catch((err) => deps.onError(String(err)))
  })

  container.append(
    el('section', { class: 'task-description' }, TASK_BLURB),
    el('section', { class: 'chat' }, chatLog, chips, el('div', { class: 'chat-row' }, input, send)),
    el(
      'section',
      { class: 'milestone-panel' },
      el('h3', {}, 'Story milestones'),
      checklist,
      summarizeButton,
    ),
    el(
      'section',
      { class: 'capability-panel' },
      el('h3', {}, 'Robot features'),
      el('pre', { class: 'capability-text' }, deps.capabilityText),
    ),
  )

  if (session.narrative.story_text) {
    container.append(
      el('section', { class: 'story-text' }, el('h3', {}, 'Story so far'), session.narrative.story_text),
    )
  }
}
