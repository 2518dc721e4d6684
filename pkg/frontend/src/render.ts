// HTML renderers for the review panels. Pure string producers: every
// statistic comes from a service payload, nothing is computed here.

import { escapeHtml, renderUnifiedDiff } from './diff'
import type { AgreementPayload, CaseView, KappaBlock, ProgressPayload } from './types'

export function formatKappa(block: KappaBlock): string {
  if (block.kappa === null || block.kappa === undefined) {
    return block.degenerate ? 'degenerate table' : 'n/a'
  }
  return block.kappa.toFixed(3)
}

export function renderCase(view: CaseView): string {
  const verdictRow = (name: string, verdict: { verdict: string; reasoning: string } | null) =>
    verdict
      ? `<tr><th>${name}</th><td class="v-${verdict.verdict}">${escapeHtml(verdict.verdict)}</td>` +
        `<td>${escapeHtml(verdict.reasoning)}</td></tr>`
      : `<tr><th>${name}</th><td class="v-skip">not invoked</td><td></td></tr>`

  const groundTruth = view.ground_truth
    ? `<section class="ground-truth"><h3>Reported motivation</h3><p>${escapeHtml(view.ground_truth)}</p></section>`
    : ''

  return `
<article class="case" data-case-id="${escapeHtml(view.case_id)}">
  <header>
    <span class="rt-badge">${escapeHtml(view.abbreviation)}</span>
    <h2>${escapeHtml(view.refactoring_type)}</h2>
    <code class="case-id">${escapeHtml(view.case_id)}</code>
  </header>
  <section><h3>Commit message</h3><pre class="message">${escapeHtml(view.commit_message)}</pre></section>
  <section><h3>Code diff</h3>${renderUnifiedDiff(view.code_diff)}</section>
  <section class="motivation">
    <h3>Proposed motivation (${escapeHtml(view.final_source)})</h3>
    <p class="motivation-text">${escapeHtml(view.final_motivation)}</p>
    <details><summary>description and reasoning</summary>
      <p>${escapeHtml(view.lrm_output.description)}</p>
      <pre>${escapeHtml(view.lrm_output.reasoning)}</pre>
    </details>
  </section>
  <section><h3>Validator verdicts</h3>
    <table class="verdicts">
      ${verdictRow('V1', view.v1_verdict)}
      ${verdictRow('V2', view.v2_verdict)}
      ${verdictRow('V3', view.v3_verdict)}
    </table>
  </section>
  ${groundTruth}
</article>`
}

export function renderProgress(progress: ProgressPayload, reviewer: string): string {
  const done = progress.per_reviewer[reviewer] ?? 0
  const total = progress.total_cases
  const percent = total > 0 ? Math.round((100 * done) / total) : 0
  return `
<div class="progress" role="progressbar" aria-valuenow="${done}" aria-valuemax="${total}">
  <div class="progress-fill" style="width:${percent}%"></div>
  <span class="progress-text">${done}/${total} reviewed, ${progress.resolved} resolved</span>
</div>`
}

export function renderAgreement(payload: AgreementPayload, reviewer: string): string {
  const mine = payload.vs_model.find((block) => block.reviewer === reviewer)
  const mineRow = mine
    ? `<tr><th>you vs model</th><td class="kappa-value">${formatKappa(mine)}</td><td>n=${mine.n}</td></tr>`
    : '<tr><th>you vs model</th><td class="kappa-value">n/a</td><td>no labels</td></tr>'
  const pairRows = payload.pairs
    .map(
      (pair) =>
        `<tr><th>${escapeHtml(pair.a)} vs ${escapeHtml(pair.b)}</th>` +
        `<td class="kappa-value">${formatKappa(pair)}</td><td>n=${pair.n}</td></tr>`,
    )
    .join('')
  return `
<table class="kappa-panel">
  <caption>live agreement (Cohen's kappa)</caption>
  ${mineRow}
  ${pairRows}
</table>`
}

export function renderOfflineBanner(queued: number): string {
  if (queued === 0) return ''
  return `<div class="offline-banner">offline: ${queued} verdict${queued === 1 ? '' : 's'} queued, will retry</div>`
}
