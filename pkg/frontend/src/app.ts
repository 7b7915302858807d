/**
 * Studio shell: session bootstrap, phase tabs, and view wiring.
 *
 * The service base URL comes from the `?service=` query parameter and
 * defaults to the local dev service.
 */

import { ApiClient } from './api.js'
import { clear, el } from './dom.js'
import type { CatalogKind, SessionDoc } from './types.js'
import { renderGoalPhase } from './views/goals.js'
import { renderNarrativePhase } from './views/narrative.js'
import { renderProgrammingPhase } from './views/programming.js'

const PHASE_TABS = [
  { key: 'narrative', label: '1 · Story' },
  { key: 'goals', label: '2 · Goals' },
  { key: 'programming', label: '3 · Program & Deploy' },
] as const

type TabKey = (typeof PHASE_TABS)[number]['key']

export function serviceBaseUrl(location: Location): string {
  const fromQuery = new URLSearchParams(location.search).get('service')
  return (fromQuery ?? 'http://127.0.0.1:8000').replace(/\/$/, '')
}

export class StudioApp {
  session!: SessionDoc
  kinds: CatalogKind[] = []
  capabilityText = ''
  activeTab: TabKey = 'narrative'

  constructor(
    readonly api: ApiClient,
    readonly rootEl: HTMLElement,
  ) {}

  async start(): Promise<void> {
    const catalog = await this.api.catalog()
    this.kinds = catalog.kinds
    this.capabilityText = catalog.capability_text

    const storedId = window.sessionStorage.getItem('storybot-session')
    if (storedId) {
      try {
        this.session = await this.api.getSession(storedId)
      } catch {
        this.session = await this.api.createSession()
      }
    } else {
      this.session = await this.api.createSession()
    }
    window.sessionStorage.setItem('storybot-session', this.session.id)
    this.render()
  }

  setSession(session: SessionDoc): void {
    this.session = session
    this.render()
  }

  showError(message: string): void {
    const bar = this.rootEl.querySelector('.error-bar')
    if (bar) bar.textContent = message
  }

  render(): void {
    clear(this.rootEl)
    const tabs = el('nav', { class: 'tabs' })
    for (const tab of PHASE_TABS) {
      const button = el('button', { class: `tab ${tab.key === this.activeTab ? 'active' : ''}` }, tab.label)
      button.addEventListener('click', () => {
        this.activeTab = tab.key
        this.render()
      })
      tabs.append(button)
    }
    const errorBar = el('div', { class: 'error-bar' })
    const phaseEl = el('main', { class: `phase ${this.activeTab}` })
    this.rootEl.append(tabs, errorBar, phaseEl)

    const deps = {
      api: this.api,
      session: this.session,
      onSessionChanged: (session: SessionDoc) => this.setSession(session),
      onError: (message: string) => this.showError(message),
    }
    if (this.activeTab === 'narrative') {
      renderNarrativePhase(phaseEl, { ...deps, capabilityText: this.capabilityText })
    } else if (this.activeTab === 'goals') {
      renderGoalPhase(phaseEl, deps)
    } else {
      renderProgrammingPhase(phaseEl, { ...deps, kinds: this.kinds })
    }
  }
}

export async function boot(): Promise<StudioApp> {
  const root = document.getElementById('app')
  if (!root) throw new Error('missing #app root element')
  const app = new StudioApp(new ApiClient(serviceBaseUrl(window.location)), root)
  await app.start()
  return app
}

declare global {
  interface Window {
    __STORYBOT_NO_AUTOBOOT__?: boolean
  }
}

if (typeof window !== 'undefined' && !window.__STORYBOT_NO_AUTOBOOT__) {
  void boot().catch((err) => {
    const root = document.getElementById('app')
    if (root) root.textContent = `failed to start: ${String(err)}`
  })
}
