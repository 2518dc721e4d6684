// Re-exports so test files import app types from one place.

export type { CaseView, Verdict } from '../src/types'
export type { FetchLike } from '../src/api'
