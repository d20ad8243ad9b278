// Session checklist screen: one accept/reject row per proposed statement,
// with insert gated on every row being decided (or the empty-contribution
// toggle for proposals the curator rejects wholesale).

import { ApiClient, ApiError, Decision, DecisionRow, InsertResult, SessionView } from './api.js'

export const NO_ANNOTATIONS_NOTICE = 'no annotations — outside training scope'

export function insertEnabled(rows: DecisionRow[], emptyContribution: boolean): boolean {
  if (rows.length === 0) return emptyContribution
  if (rows.every((r) => r.decision !== 'pending')) return true
  return emptyContribution
}

export class ChecklistScreen {
  private session: SessionView
  private emptyContribution = false

  constructor(
    private readonly api: ApiClient,
    private readonly container: HTMLElement,
    session: SessionView,
    private readonly onInserted?: (result: InsertResult) => void,
  ) {
    this.session = session
    this.render()
  }

  get view(): SessionView {
    return this.session
  }

  private render(): void {
    this.container.replaceChildren()

    const heading = document.createElement('h2')
    heading.textContent = `Session ${this.session.session_id} (${this.session.state})`
    this.container.append(heading)

    const text = document.createElement('blockquote')
    text.className = 'assay-text'
    text.textContent = this.session.text
    this.container.append(text)

    if (this.session.rows.length === 0) {
      const notice = document.createElement('p')
      notice.className = 'empty-proposal'
      notice.textContent = NO_ANNOTATIONS_NOTICE
      this.container.append(notice)
    } else {
      this.container.append(this.buildTable())
    }

    this.container.append(this.buildInsertControls())
  }

  private buildTable(): HTMLTableElement {
    const table = document.createElement('table')
    table.className = 'checklist'
    const head = table.createTHead().insertRow()
    for (const label of ['Property', 'Value', 'Accept', 'Reject']) {
      const th = document.createElement('th')
      th.textContent = label
      head.append(th)
    }
    const body = table.createTBody()
    for (const row of this.session.rows) {
      const tr = body.insertRow()
      tr.dataset.property = row.property
      tr.dataset.value = row.value
      tr.insertCell().textContent = row.property
      tr.insertCell().textContent = row.value
      tr.append(this.decisionCell(row, 'accepted'), this.decisionCell(row, 'rejected'))
    }
    return table
  }

  private decisionCell(row: DecisionRow, decision: Decision): HTMLTableCellElement {
    const cell = document.createElement('td')
    const input = document.createElement('input')
    input.type = 'checkbox'
    input.checked = row.decision === decision
    input.disabled = this.session.state !== 'open'
    input.dataset.decision = decision
    input.addEventListener('change', () => {
      void this.decide(row, input.checked ? decision : 'pending')
    })
    cell.append(input)
    return cell
  }

  private async decide(row: DecisionRow, decision: Decision): Promise<void> {
    try {
      // server acknowledgment is the source of truth; re-render from its state
      this.session = await this.api.submitDecisions(this.session, [{ ...row, decision }])
    } catch (err) {
      this.showError(err)
      return
    }
    this.render()
  }

  private buildInsertControls(): HTMLElement {
    const controls = document.createElement('div')
    controls.className = 'insert-controls'

    const toggle = document.createElement('input')
    toggle.type = 'checkbox'
    toggle.id = 'empty-contribution'
    toggle.checked = this.emptyContribution
    toggle.addEventListener('change', () => {
      this.emptyContribution = toggle.checked
      this.render()
    })
    const toggleLabel = document.createElement('label')
    toggleLabel.htmlFor = 'empty-contribution'
    toggleLabel.textContent = 'insert as empty contribution'
    controls.append(toggle, toggleLabel)

    const button = document.createElement('button')
    button.id = 'insert-button'
    button.textContent = 'Insert Data'
    button.disabled =
      this.session.state !== 'open' || !insertEnabled(this.session.rows, this.emptyContribution)
    button.addEventListener('click', () => void this.insert(button))
    controls.append(button)
    return controls
  }

  private async insert(button: HTMLButtonElement): Promise<void> {
    button.disabled = true // no retries behind the user's back
    let result: InsertResult
    try {
      result = await this.api.insert(this.session.session_id, this.emptyContribution)
    } catch (err) {
      button.disabled = false
      this.showError(err)
      return
    }
    this.session = await this.api.getSession(this.session.session_id)
    this.render()
    this.showResult(result)
    this.onInserted?.(result)
  }

  private showResult(result: InsertResult): void {
    const panel = document.createElement('div')
    panel.className = 'insert-result'
    const summary = document.createElement('p')
    summary.textContent = `${result.triples_written} triples written for ${result.assay_id}`
    panel.append(summary)
    const list = document.createElement('ul')
    for (const s of result.statements) {
      const item = document.createElement('li')
      item.textContent = `${s.property} → ${s.value}`
      list.append(item)
    }
    panel.append(list)
    this.container.append(panel)
  }

  private showError(err: unknown): void {
    const box = document.createElement('p')
    box.className = 'error'
    box.textContent = err instanceof ApiError ? `${err.status}: ${err.message}` : String(err)
    const retry = document.createElement('button')
    retry.textContent = 'retry'
    retry.addEventListener('click', () => this.render())
    box.append(' ', retry)
    this.container.append(box)
  }
}
