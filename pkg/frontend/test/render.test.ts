import { describe, expect, it } from 'vitest'

import { formatKappa, renderAgreement, renderCase, renderOfflineBanner, renderProgress } from '../src/render'
import type { AgreementPayload, ProgressPayload } from '../src/types'
import { makeCases } from './fake_service'

describe('renderCase', () => {
  it('shows the full reviewing context', () => {
    const view = makeCases(1)[0]
    const html = renderCase(view)
    expect(html).toContain('Extract Method')
    expect(html).toContain('EM')
    expect(html).toContain('commit message 0')
    expect(html).toContain('diff-add')
    expect(html).toContain('m0')
    expect(html).toContain('not invoked') // V3 was skipped for this case
  })

  it('escapes hostile content', () => {
    const view = { ...makeCases(1)[0], commit_message: '<script>alert(1)</script>' }
    const html = renderCase(view)
    expect(html).not.toContain('<script>alert')
    expect(html).toContain('&lt;script&gt;')
  })
})

describe('kappa panel', () => {
  const payload: AgreementPayload = {
    reviewers: ['alice', 'bob'],
    pairs: [
      { a: 'alice', b: 'bob', n: 10, kappa: 1.0, table: [[5, 0], [0, 5]], labels: ['d', 'a'] },
    ],
    vs_model: [
      { reviewer: 'alice', n: 198, kappa: 0.5672, table: [[59, 8], [34, 97]], labels: ['No', 'Yes'] },
    ],
  }

  it('displays the service-provided kappa values verbatim', () => {
    const html = renderAgreement(payload, 'alice')
    expect(html).toContain('0.567')
    expect(html).toContain('1.000')
    expect(html).toContain('n=198')
  })

  it('marks degenerate tables instead of inventing a number', () => {
    expect(formatKappa({ n: 5, kappa: null, degenerate: true, table: [[5, 0], [0, 0]], labels: [] }))
      .toBe('degenerate table')
  })
})

describe('progress and offline banner', () => {
  it('renders the reviewer progress bar', () => {
    const progress: ProgressPayload = {
      total_cases: 10,
      per_reviewer: { alice: 10 },
      verdicts: 10,
      resolved: 2,
      resolutions: {},
    }
    const html = renderProgress(progress, 'alice')
    expect(html).toContain('10/10 reviewed')
    expect(html).toContain('width:100%')
  })

  it('banner appears only with queued verdicts', () => {
    expect(renderOfflineBanner(0)).toBe('')
    expect(renderOfflineBanner(3)).toContain('3 verdicts queued')
  })
})
