// Comparison browser: property x assay matrix with blanks for missing values.

import { ApiClient, ApiError, ComparisonView } from './api.js'

export class CompareScreen {
  private sortAscending = true

  constructor(
    private readonly api: ApiClient,
    private readonly container: HTMLElement,
  ) {}

  async show(assayIds: string[]): Promise<void> {
    this.container.replaceChildren()
    if (assayIds.length === 0) {
      this.emptyState('no assays selected')
      return
    }
    let view: ComparisonView
    try {
      view = await this.api.compare(assayIds)
    } catch (err) {
      if (err instanceof ApiError && err.status === 404) {
        this.notFound(err.message)
      } else {
        this.emptyState(String(err))
      }
      return
    }
    if (view.properties.length === 0) {
      this.emptyState('nothing inserted yet for these assays')
      return
    }
    this.container.append(this.buildTable(view))
  }

  renderMatrix(view: ComparisonView): HTMLTableElement {
    return this.buildTable(view)
  }

  private buildTable(view: ComparisonView): HTMLTableElement {
    const table = document.createElement('table')
    table.className = 'comparison'
    const head = table.createTHead().insertRow()
    const propHeader = document.createElement('th')
    propHeader.textContent = 'Property'
    propHeader.addEventListener('click', () => {
      this.sortAscending = !this.sortAscending
      table.replaceWith(this.buildTable(view))
    })
    head.append(propHeader)
    for (const assay of view.assays) {
      const th = document.createElement('th')
      th.textContent = assay
      head.append(th)
    }
    const body = table.createTBody()
    const props = [...view.properties].sort()
    if (!this.sortAscending) props.reverse()
    for (const prop of props) {
      const tr = body.insertRow()
      tr.insertCell().textContent = prop
      for (const assay of view.assays) {
        const values = view.matrix[prop]?.[assay] ?? []
        tr.insertCell().textContent = values.join('; ') // blank cell when missing
      }
    }
    return table
  }

  private emptyState(message: string): void {
    const p = document.createElement('p')
    p.className = 'empty-state'
    p.textContent = message
    this.container.append(p)
  }

  private notFound(message: string): void {
    const p = document.createElement('p')
    p.className = 'not-found'
    p.textContent = `not found: ${message}`
    this.container.append(p)
  }
}
