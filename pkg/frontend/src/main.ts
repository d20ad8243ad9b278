// Entry point: hash routing between the new-assay form, an open session's
// checklist, and the comparison browser.

import { ApiClient, ApiError } from './api.js'
import { ChecklistScreen } from './checklist.js'
import { CompareScreen } from './compare.js'

const api = new ApiClient()

function el(id: string): HTMLElement {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing element #${id}`)
  return node
}

function showScreen(name: 'new' | 'session' | 'compare'): void {
  for (const screen of ['new', 'session', 'compare']) {
    el(`screen-${screen}`).hidden = screen !== name
  }
}

async function openSession(sessionId: string): Promise<void> {
  showScreen('session')
  const container = el('screen-session')
  try {
    const session = await api.getSession(sessionId)
    new ChecklistScreen(api, container, session)
  } catch (err) {
    container.replaceChildren()
    const p = document.createElement('p')
    p.className = err instanceof ApiError && err.status === 404 ? 'not-found' : 'error'
    p.textContent = String(err instanceof ApiError ? err.message : err)
    container.append(p)
  }
}

async function submitNewAssay(): Promise<void> {
  const text = (el('assay-text') as HTMLTextAreaElement).value
  const assayId = (el('assay-id') as HTMLInputElement).value.trim()
  const threshold = Number((el('threshold') as HTMLInputElement).value) || 1
  const errorBox = el('new-assay-error')
  errorBox.textContent = ''
  try {
    const session = await api.createSession(text, threshold, assayId || undefined)
    window.location.hash = `#/session/${session.session_id}`
  } catch (err) {
    errorBox.textContent = err instanceof ApiError ? err.message : String(err)
  }
}

function route(): void {
  const hash = window.location.hash
  const sessionMatch = hash.match(/^#\/session\/(\w+)/)
  if (sessionMatch) {
    void openSession(sessionMatch[1])
    return
  }
  const compareMatch = hash.match(/^#\/compare\?assays=(.*)/)
  if (compareMatch) {
    showScreen('compare')
    const ids = decodeURIComponent(compareMatch[1]).split(',').filter(Boolean)
    void new CompareScreen(api, el('compare-table')).show(ids)
    return
  }
  showScreen('new')
}

export function start(): void {
  el('add-bioassay').addEventListener('click', () => void submitNewAssay())
  el('compare-go').addEventListener('click', () => {
    const ids = (el('compare-assays') as HTMLInputElement).value
    window.location.hash = `#/compare?assays=${encodeURIComponent(ids)}`
  })
  window.addEventListener('hashchange', route)
  route()
}

if (typeof document !== 'undefined' && document.getElementById('screen-new')) {
  start()
}
