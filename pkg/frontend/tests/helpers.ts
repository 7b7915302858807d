/** Spawns the real session service and mock robot for integration tests. */

import { spawn, type ChildProcess } from 'node:child_process'
import { mkdtempSync, writeFileSync } from 'node:fs'
import net from 'node:net'
import { tmpdir } from 'node:os'
import { join } from 'node:path'

export function freePort(): Promise<number> {
  return new Promise((resolvePort, reject) => {
    const server = net.createServer()
    server.once('error', reject)
    server.listen(0, '127.0.0.1', () => {
      const address = server.address()
      if (address && typeof address === 'object') {
        const port = address.port
        server.close(() => resolvePort(port))
      } else {
        reject(new Error('no port assigned'))
      }
    })
  })
}

export async function waitForHttp(url: string, timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs
  while (Date.now() < deadline) {
    try {
      await fetch(url)
      return
    } catch {
      await new Promise((r) => setTimeout(r, 150))
    }
  }
  throw new Error(`service at ${url} never came up`)
}

export async function pollUntil<T>(
  produce: () => Promise<T>,
  accept: (value: T) => boolean,
  timeoutMs = 10_000,
): Promise<T> {
  const deadline = Date.now() + timeoutMs
  let last: T = await produce()
  while (Date.now() < deadline) {
    if (accept(last)) return last
    await new Promise((r) => setTimeout(r, 100))
    last = await produce()
  }
  throw new Error(`condition never satisfied; last value: ${JSON.stringify(last)}`)
}

export interface ProcessHandle {
  base: string
  ip: string
  port: number
  proc: ChildProcess
  stop(): void
}

/** Start `storybot serve` with a scripted gateway queue (virtual pacing). */
export async function startService(replies: string[]): Promise<ProcessHandle> {
  const dir = mkdtempSync(join(tmpdir(), 'storybot-ui-'))
  const script = join(dir, 'script.json')
  writeFileSync(script, JSON.stringify(replies))
  const port = await freePort()
  const proc = spawn(
    'python3',
    [
      '-m', 'storybot.cli', 'serve',
      '--port', String(port),
      '--storage', join(dir, 'store'),
      '--gateway', `mock:${script}`,
      '--pacing', 'virtual',
    ],
    { stdio: 'ignore' },
  )
  const base = `http://127.0.0.1:${port}`
  await waitForHttp(`${base}/catalog`)
  return { base, ip: '127.0.0.1', port, proc, stop: () => void proc.kill() }
}

/** Start `storybot mock-robot` and wait for its health endpoint. */
export async function startMockRobot(): Promise<ProcessHandle> {
  const port = await freePort()
  const proc = spawn('python3', ['-m', 'storybot.cli', 'mock-robot', '--port', String(port)], {
    stdio: 'ignore',
  })
  const base = `http://127.0.0.1:${port}`
  await waitForHttp(`${base}/api/device`)
  return { base, ip: '127.0.0.1', port, proc, stop: () => void proc.kill() }
}
