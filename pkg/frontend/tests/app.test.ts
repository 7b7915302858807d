import { Window } from 'happy-dom'
import { afterAll, beforeAll, describe, expect, it } from 'vitest'

import { ApiClient, ApiRequestError } from '../src/api.js'
import { serviceBaseUrl } from '../src/app.js'
import { renderGoalPhase } from '../src/views/goals.js'
import type { SessionDoc } from '../src/types.js'
import { startService, type ProcessHandle } from './helpers.js'

const GOALS = JSON.stringify({
  goals: [{
    snippet: 's', goal: 'Wave hello',
    hints: [{ text: 'use move_arm', block_refs: [{ category: 'Movement', kind_id: 'move_arm' }], placement: null }],
  }],
})

let service: ProcessHandle
let api: ApiClient
let dom: Window

beforeAll(async () => {
  dom = new Window({ url: 'http://localhost/' })
  Object.assign(globalThis, { document: dom.document, window: dom })
  service = await startService(['a reply', 'A story about waving.', GOALS])
  api = new ApiClient(service.base)
})

afterAll(() => service?.stop())

describe('service base url', () => {
  it('defaults to the local service and honors ?service=', () => {
    expect(serviceBaseUrl({ search: '' } as Location)).toBe('http://127.0.0.1:8000')
    expect(serviceBaseUrl({ search: '?service=http://10.0.0.5:9000/' } as Location)).toBe(
      'http://10.0.0.5:9000',
    )
  })
})

describe('api client', () => {
  it('surfaces structured errors with status codes', async () => {
    const session = await api.createSession()
    try {
      await api.run(session.id, 'sim')
      expect.unreachable('run without a program must fail')
    } catch (err) {
      expect(err).toBeInstanceOf(ApiRequestError)
      expect((err as ApiRequestError).status).toBe(409)
      expect((err as ApiRequestError).body['error']).toBe('no_program')
    }
  })

  it('reload reproduces the same view from server state', async () => {
    const session = await api.createSession()
    await api.chat(session.id, 'robot waves')
    await api.summarize(session.id)
    await api.generateGoals(session.id)

    const renderFromServer = async (): Promise<string> => {
      const fresh: SessionDoc = await api.getSession(session.id)
      const root = dom.document.createElement('div')
      renderGoalPhase(root as unknown as HTMLElement, {
        api, session: fresh,
        onSessionChanged: () => undefined,
        onError: () => undefined,
      })
      return root.innerHTML
    }

    const first = await renderFromServer()
    const second = await renderFromServer()
    expect(second).toBe(first)
    expect(first).toContain('Wave hello')
  })
})
