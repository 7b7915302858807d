/**
 * Goal phase screen: the narrative panel on one side, goal cards on the
 * other. Each card shows its story snippet, the goal text, a verdict badge
 * (warning badge with the unknown references for flagged goals), and
 * expandable hints whose opens are logged for usage analysis.
 */

import type { ApiClient } from '../api.js'
import { clear, el } from '../dom.js'
import type { GoalDoc, SessionDoc } from '../types.js'

export interface GoalDeps {
  api: ApiClient
  session: SessionDoc
  onSessionChanged: (session: SessionDoc) => void
  onError: (message: string) => void
}

function verdictBadge(goal: GoalDoc): HTMLElement {
  if (goal.verdict.status === 'flagged') {
    const refs = (goal.verdict.unknown_refs ?? []).join(', ')
    return el(
      'span',
      { class: 'badge warning', title: 'These references do not match the robot' },
      `⚠ not available: ${refs}`,
    )
  }
  if (goal.verdict.status === 'valid') {
    return el('span', { class: 'badge valid' }, '✓ matches robot abilities')
  }
  return el('span', { class: 'badge unchecked' }, 'unchecked')
}

export function renderGoalPhase(container: HTMLElement, deps: GoalDeps): void {
  const { api, session } = deps
  clear(container)

  const narrativePanel = el(
    'section',
    { class: 'narrative-panel' },
    el('h3', {}, 'Your story'),
    el('div', { class: 'story-text' }, session.narrative.story_text || '(no story text yet — finish the narrative phase first)'),
  )

  const generate = el('button', { class: 'generate-goals' }, 'Generate Program Goals')
  const retry = el('button', { class: 'retry-goals' }, 'Retry')
  const refresh = () =>
    api.getSession(session.id).then(deps.onSessionChanged).catch((err) => deps.onError(String(err)))
  generate.addEventListener('click', () => {
    void api.generateGoals(session.id).then(refresh).catch((err) => deps.onError(String(err)))
  })
  retry.addEventListener('click', () => {
    void api.retryGoals(session.id).then(refresh).catch((err) => deps.onError(String(err)))
  })

  const current = session.goalsets.at(-1) ?? null
  const cards = el('div', { class: 'goal-cards' })
  if (current) {
    cards.append(el('div', { class: 'generation' }, `generation ${current.generation}`))
    current.goals.forEach((goal, goalIndex) => {
      const hints = el('div', { class: 'hints' })
      goal.hints.forEach((hint, hintIndex) => {
        const body = el('div', { class: 'hint-body' })
        body.style.display = 'none'
        const toggle = el('button', { class: 'hint-toggle' }, `Hint ${hintIndex + 1}`)
        toggle.addEventListener('click', () => {
          if (body.style.display === 'none') {
            // Opening a hint is usage the researchers count: exactly one
            // log event per expansion.
            void api
              .openHint(session.id, goalIndex, hintIndex)
              .then((full) => {
                body.style.display = 'block'
                clear(body)
                body.append(el('div', { class: 'hint-text' }, full.text))
                for (const ref of full.block_refs) {
                  body.append(el('code', { class: 'hint-ref' }, `${ref.category} › ${ref.kind_id}`))
                }
              })
              .catch((err) => deps.onError(String(err)))
          } else {
            body.style.display = 'none'
          }
        })
        hints.append(toggle, body)
      })
      cards.append(
        el(
          'article',
          { class: `goal-card ${goal.verdict.status}` },
          el('blockquote', { class: 'snippet' }, goal.snippet),
          el('h4', { class: 'goal-text' }, goal.goal),
          verdictBadge(goal),
          hints,
        ),
      )
    })
  } else {
    cards.append(el('p', {}, 'No goals yet. Generate some from your story.'))
  }

  container.append(
    narrativePanel,
    el('section', { class: 'goal-panel' }, el('div', { class: 'goal-actions' }, generate, retry), cards),
  )
}
