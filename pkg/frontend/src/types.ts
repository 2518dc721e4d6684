// Wire types mirroring the review service's JSON contract.

export interface ModelOutput {
  motivation: string
  description: string
  reasoning: string
}

export interface ModelVerdict {
  verdict: 'agree' | 'disagree'
  reasoning: string
}

export interface CaseView {
  case_id: string
  refactoring_type: string
  abbreviation: string
  commit_message: string
  code_diff: string
  ground_truth: string
  lrm_output: ModelOutput
  v1_verdict: ModelVerdict | null
  v2_verdict: ModelVerdict | null
  v3_verdict: ModelVerdict | null
  final_source: string
  final_motivation: string
  model_label?: string
}

export interface NextCaseResponse {
  done: boolean
  reviewed: number
  total: number
  case?: CaseView
  my_verdict?: Verdict | null
}

export type ModelName = 'LRM' | 'V1' | 'V2' | 'V3'

export interface Verdict {
  case_id: string
  reviewer_id: string
  decision: 'agree' | 'disagree'
  correct_models: ModelName[]
  note: string
}

export interface KappaBlock {
  n: number
  kappa: number | null
  std_err?: number
  ci_low?: number
  ci_high?: number
  kappa_p?: number
  bowker_chi_square?: number
  bowker_df?: number
  bowker_p?: number
  degenerate?: boolean
  raw_agreement?: number
  table: number[][]
  labels: string[]
}

export interface PairBlock extends KappaBlock {
  a: string
  b: string
}

export interface VsModelBlock extends KappaBlock {
  reviewer: string
}

export interface AgreementPayload {
  reviewers: string[]
  pairs: PairBlock[]
  vs_model: VsModelBlock[]
}

export interface ProgressPayload {
  total_cases: number
  per_reviewer: Record<string, number>
  verdicts: number
  resolved: number
  resolutions: Record<string, string>
}
