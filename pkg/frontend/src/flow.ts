// Review session state machine: fetch next case, submit, advance.
// DOM-free so the whole flow is exercisable under tests; app.ts wires
// it to the page.

import { ReviewApi, validateVerdict } from './api'
import type { CaseView, ModelName, NextCaseResponse, Verdict } from './types'

export interface SessionState {
  reviewer: string
  current: CaseView | null
  done: boolean
  reviewed: number
  total: number
  conflict: boolean // server already holds a verdict for the shown case
  lastError: string | null
}

export class ReviewSession {
  readonly api: ReviewApi
  state: SessionState

  constructor(api: ReviewApi, reviewer: string) {
    this.api = api
    this.state = {
      reviewer,
      current: null,
      done: false,
      reviewed: 0,
      total: 0,
      conflict: false,
      lastError: null,
    }
  }

  /** Reconnect handler: drain the offline queue, then fetch the next case. */
  async start(): Promise<SessionState> {
    await this.api.drainQueue()
    return this.advance()
  }

  async advance(): Promise<SessionState> {
    const next: NextCaseResponse = await this.api.nextCase(this.state.reviewer)
    this.state.done = next.done
    this.state.reviewed = next.reviewed
    this.state.total = next.total
    this.state.current = next.case ?? null
    this.state.conflict = Boolean(next.my_verdict)
    return this.state
  }

  buildVerdict(decision: 'agree' | 'disagree', models: ModelName[], note: string): Verdict {
    if (!this.state.current) throw new Error('no case on screen')
    return {
      case_id: this.state.current.case_id,
      reviewer_id: this.state.reviewer,
      decision,
      correct_models: models,
      note,
    }
  }

  /**
   * Validate and submit the verdict for the current case. On success or
   * offline-queue the session advances; a validation or server
   * rejection keeps the case on screen with the error surfaced.
   */
  async submit(decision: 'agree' | 'disagree', models: ModelName[], note: string): Promise<SessionState> {
    const verdict = this.buildVerdict(decision, models, note)
    const invalid = validateVerdict(verdict)
    if (invalid) {
      this.state.lastError = invalid
      return this.state
    }
    const result = await this.api.postVerdict(verdict)
    if (!result.ok && !result.queued) {
      this.state.lastError = result.error ?? 'submission rejected'
      return this.state
    }
    this.state.lastError = result.queued ? (result.error ?? null) : null
    try {
      return await this.advance()
    } catch {
      // still offline: the verdict sits in the queue, the case stays up
      return this.state
    }
  }

  queuedCount(): number {
    return this.api.queuedVerdicts().length
  }
}
