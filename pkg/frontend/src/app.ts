// Page wiring: binds the review session to the DOM, keyboard shortcuts
// included. All heavy lifting lives in the DOM-free modules.

import { MemoryStorage, ReviewApi, REVIEWER_KEY, StorageLike } from './api'
import { ReviewSession } from './flow'
import { renderAgreement, renderCase, renderOfflineBanner, renderProgress } from './render'
import type { ModelName } from './types'

const MODELS: ModelName[] = ['LRM', 'V1', 'V2', 'V3']

function storage(): StorageLike {
  try {
    window.localStorage.setItem('refwhy.probe', '1')
    window.localStorage.removeItem('refwhy.probe')
    return window.localStorage
  } catch {
    return new MemoryStorage()
  }
}

function element<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing element #${id}`)
  return node as T
}

async function refreshPanels(api: ReviewApi, session: ReviewSession): Promise<void> {
  const [agreement, progress] = await Promise.all([api.agreement(), api.progress()])
  element('agreement').innerHTML = renderAgreement(agreement, session.state.reviewer)
  element('progress').innerHTML = renderProgress(progress, session.state.reviewer)
  element('offline').innerHTML = renderOfflineBanner(session.queuedCount())
}

function showState(session: ReviewSession): void {
  const stage = element('stage')
  if (session.state.done) {
    stage.innerHTML = `<div class="all-done">All ${session.state.total} cases reviewed. Thank you.</div>`
    return
  }
  if (!session.state.current) {
    stage.innerHTML = '<div class="all-done">No case assigned.</div>'
    return
  }
  stage.innerHTML = renderCase(session.state.current)
  element('error').textContent = session.state.lastError ?? ''
  element('conflict').textContent = session.state.conflict
    ? 'A newer verdict for this case already exists on the server; refresh before re-submitting.'
    : ''
  ;(element<HTMLTextAreaElement>('note')).value = ''
  for (const model of MODELS) {
    ;(element<HTMLInputElement>(`model-${model}`)).checked = false
  }
}

async function submit(session: ReviewSession, api: ReviewApi, decision: 'agree' | 'disagree'): Promise<void> {
  const models = MODELS.filter((model) => element<HTMLInputElement>(`model-${model}`).checked)
  const note = element<HTMLTextAreaElement>('note').value
  await session.submit(decision, models, note)
  showState(session)
  await refreshPanels(api, session)
}

export async function boot(): Promise<void> {
  const store = storage()
  let reviewer = store.getItem(REVIEWER_KEY) ?? ''
  while (!reviewer) {
    reviewer = window.prompt('Reviewer id:')?.trim() ?? ''
  }
  store.setItem(REVIEWER_KEY, reviewer)

  const api = new ReviewApi((url, init) => window.fetch(url, init), store)
  const session = new ReviewSession(api, reviewer)

  element('agree').addEventListener('click', () => void submit(session, api, 'agree'))
  element('disagree').addEventListener('click', () => void submit(session, api, 'disagree'))
  document.addEventListener('keydown', (event) => {
    const target = event.target as HTMLElement | null
    if (target && (target.tagName === 'TEXTAREA' || target.tagName === 'INPUT')) return
    if (event.key === 'a') void submit(session, api, 'agree')
    if (event.key === 'd') void submit(session, api, 'disagree')
  })
  window.addEventListener('online', () => void session.start().then(() => showState(session)))

  await session.start()
  showState(session)
  await refreshPanels(api, session)
}

if (typeof document !== 'undefined' && document.getElementById('stage')) {
  void boot()
}
