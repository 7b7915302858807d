/** Typed client for the session service. All artifact mutations go through here. */

import type {
  ActivityEvent,
  CatalogResponse,
  ConnectionDoc,
  GoalSetDoc,
  HelpResponse,
  HintDoc,
  NarrativeDoc,
  ProgramDoc,
  RunResult,
  SessionDoc,
  ValidationResponse,
} from './types.js'

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly body: Record<string, unknown>,
  ) {
    super(`${status}: ${JSON.stringify(body)}`)
  }
}

async function parse<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => ({}))
  if (!response.ok) {
    throw new ApiRequestError(response.status, body as Record<string, unknown>)
  }
  return body as T
}

export class ApiClient {
  constructor(readonly baseUrl: string) {}

  private async post<T>(path: string, body?: unknown): Promise<T> {
    return parse<T>(
      await fetch(`${this.baseUrl}${path}`, {
        method: 'POST',
        headers: body === undefined ? {} : { 'Content-Type': 'application/json' },
        body: body === undefined ? undefined : JSON.stringify(body),
      }),
    )
  }

  private async get<T>(path: string): Promise<T> {
    return parse<T>(await fetch(`${this.baseUrl}${path}`))
  }

  catalog(): Promise<CatalogResponse> {
    return this.get('/catalog')
  }

  createSession(): Promise<SessionDoc> {
    return this.post('/sessions')
  }

  getSession(id: string): Promise<SessionDoc> {
    return this.get(`/sessions/${id}`)
  }

  chat(id: string, message: string): Promise<{ reply: string; narrative: NarrativeDoc }> {
    return this.post(`/sessions/${id}/chat`, { message })
  }

  requestHelp(id: string, milestone: string): Promise<HelpResponse> {
    return this.post(`/sessions/${id}/help/${milestone}`)
  }

  setMilestone(id: string, kind: string, complete: boolean): Promise<{ milestones: NarrativeDoc['milestones'] }> {
    return this.post(`/sessions/${id}/milestones/${kind}`, { complete })
  }

  summarize(id: string): Promise<{ story_text: string; revisions: string[] }> {
    return this.post(`/sessions/${id}/summarize`)
  }

  generateGoals(id: string): Promise<GoalSetDoc> {
    return this.post(`/sessions/${id}/goals`)
  }

  retryGoals(id: string): Promise<GoalSetDoc> {
    return this.post(`/sessions/${id}/goals/retry`)
  }

  getGoals(id: string): Promise<{ goalsets: GoalSetDoc[]; current: GoalSetDoc | null }> {
    return this.get(`/sessions/${id}/goals`)
  }

  openHint(id: string, goalIndex: number, hintIndex: number): Promise<HintDoc> {
    return this.post(`/sessions/${id}/goals/${goalIndex}/hints/${hintIndex}/open`)
  }

  async putProgram(id: string, program: ProgramDoc): Promise<ValidationResponse> {
    return parse<ValidationResponse>(
      await fetch(`${this.baseUrl}/sessions/${id}/program`, {
        method: 'PUT',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(program),
      }),
    )
  }

  validateProgram(id: string): Promise<ValidationResponse> {
    return this.post(`/sessions/${id}/validate`)
  }

  run(id: string, mode: 'sim' | 'sim_and_robot'): Promise<RunResult> {
    return this.post(`/sessions/${id}/run`, { mode })
  }

  connect(id: string, ip: string, port?: number): Promise<ConnectionDoc> {
    return this.post(`/sessions/${id}/connect`, port === undefined ? { ip } : { ip, port })
  }

  activity(id: string): Promise<{ events: ActivityEvent[] }> {
    return this.get(`/sessions/${id}/activity`)
  }
}
