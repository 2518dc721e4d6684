// Review-service client with an offline retry queue.
//
// Fetch and storage are injectable so the logic runs identically in the
// browser and under tests. Queued verdicts persist in storage until the
// service acknowledges them; nothing is recomputed client-side.

import type { AgreementPayload, NextCaseResponse, ProgressPayload, Verdict } from './types'

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>

export interface StorageLike {
  getItem(key: string): string | null
  setItem(key: string, value: string): void
  removeItem(key: string): void
}

const QUEUE_KEY = 'refwhy.verdict.queue'
export const REVIEWER_KEY = 'refwhy.reviewer'

export class MemoryStorage implements StorageLike {
  private data = new Map<string, string>()
  getItem(key: string): string | null {
    return this.data.has(key) ? (this.data.get(key) as string) : null
  }
  setItem(key: string, value: string): void {
    this.data.set(key, value)
  }
  removeItem(key: string): void {
    this.data.delete(key)
  }
}

export interface PostResult {
  ok: boolean
  queued: boolean
  error?: string
}

export class ReviewApi {
  private fetchFn: FetchLike
  private storage: StorageLike
  readonly base: string

  constructor(fetchFn: FetchLike, storage: StorageLike, base = '') {
    this.fetchFn = fetchFn
    this.storage = storage
    this.base = base
  }

  async nextCase(reviewer: string): Promise<NextCaseResponse> {
    const response = await this.fetchFn(
      `${this.base}/api/cases?reviewer=${encodeURIComponent(reviewer)}`,
    )
    if (!response.ok) throw new Error(`cases: HTTP ${response.status}`)
    return (await response.json()) as NextCaseResponse
  }

  async agreement(): Promise<AgreementPayload> {
    const response = await this.fetchFn(`${this.base}/api/agreement`)
    if (!response.ok) throw new Error(`agreement: HTTP ${response.status}`)
    return (await response.json()) as AgreementPayload
  }

  async progress(): Promise<ProgressPayload> {
    const response = await this.fetchFn(`${this.base}/api/progress`)
    if (!response.ok) throw new Error(`progress: HTTP ${response.status}`)
    return (await response.json()) as ProgressPayload
  }

  queuedVerdicts(): Verdict[] {
    const raw = this.storage.getItem(QUEUE_KEY)
    return raw ? (JSON.parse(raw) as Verdict[]) : []
  }

  private saveQueue(queue: Verdict[]): void {
    if (queue.length === 0) this.storage.removeItem(QUEUE_KEY)
    else this.storage.setItem(QUEUE_KEY, JSON.stringify(queue))
  }

  /**
   * Post one verdict. A rejected submission (4xx) surfaces the error;
   * a network failure queues the verdict for later retry instead of
   * dropping it.
   */
  async postVerdict(verdict: Verdict): Promise<PostResult> {
    try {
      const response = await this.fetchFn(`${this.base}/api/verdicts`, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(verdict),
      })
      if (response.ok) return { ok: true, queued: false }
      const detail = await response.text()
      return { ok: false, queued: false, error: `HTTP ${response.status}: ${detail}` }
    } catch {
      const queue = this.queuedVerdicts()
      queue.push(verdict)
      this.saveQueue(queue)
      return { ok: false, queued: true, error: 'offline: verdict queued locally' }
    }
  }

  /**
   * Drain the offline queue in order. Stops at the first network
   * failure (still offline); server rejections are dropped from the
   * queue as acknowledged-but-invalid and reported.
   */
  async drainQueue(): Promise<{ sent: number; rejected: number; remaining: number }> {
    let queue = this.queuedVerdicts()
    let sent = 0
    let rejected = 0
    while (queue.length > 0) {
      const head = queue[0]
      let response: Response
      try {
        response = await this.fetchFn(`${this.base}/api/verdicts`, {
          method: 'POST',
          headers: { 'Content-Type': 'application/json' },
          body: JSON.stringify(head),
        })
      } catch {
        break // still offline; keep the queue intact
      }
      queue = queue.slice(1)
      this.saveQueue(queue)
      if (response.ok) sent += 1
      else rejected += 1
    }
    return { sent, rejected, remaining: queue.length }
  }
}

/**
 * Form rule: a disagree decision needs at least one correct-model pick
 * or a non-empty note before it may be submitted.
 */
export function validateVerdict(verdict: Verdict): string | null {
  if (verdict.decision === 'disagree' && verdict.correct_models.length === 0 && verdict.note.trim() === '') {
    return 'a disagree verdict needs at least one correct-model pick or a note'
  }
  return null
}
