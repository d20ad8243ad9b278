// In-memory stand-in for the curation service, mirroring its JSON contract:
// proposal-bound decisions, single insert per session, accepted-only triples.

import { DecisionRow, SessionView, StatementRow } from '../src/api.js'

interface StoredSession extends SessionView {
  inserted: boolean
}

export class FakeServer {
  sessions = new Map<string, StoredSession>()
  triples = new Map<string, StatementRow[]>() // assay id -> inserted statements
  private counter = 0

  constructor(private readonly proposalFor: (text: string) => StatementRow[]) {}

  fetch = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = typeof input === 'string' ? input : input.toString()
    const method = init?.method ?? 'GET'
    const body = init?.body ? JSON.parse(init.body as string) : undefined

    if (method === 'POST' && url.endsWith('/sessions')) {
      if (!body.text?.trim()) return this.error(400, 'text must be non-empty')
      const id = `sess${this.counter++}`
      const session: StoredSession = {
        session_id: id,
        assay_id: body.assay_id ?? `session-${id}`,
        text: body.text,
        state: 'open',
        threshold: body.threshold ?? 1,
        curator: 'anonymous',
        rows: this.proposalFor(body.text).map((s) => ({ ...s, decision: 'pending' as const })),
        inserted: false,
      }
      this.sessions.set(id, session)
      return this.json(session, 201)
    }

    const sessionMatch = url.match(/\/sessions\/(\w+)(\/insert)?$/)
    if (sessionMatch) {
      const session = this.sessions.get(sessionMatch[1])
      if (!session) return this.error(404, 'unknown session')
      if (method === 'GET') return this.json(session)
      if (session.state !== 'open') return this.error(409, `session is ${session.state}`)
      if (method === 'PATCH') {
        for (const d of body.decisions as DecisionRow[]) {
          const row = session.rows.find((r) => r.property === d.property && r.value === d.value)
          if (!row) return this.error(400, 'statement was not proposed')
          row.decision = d.decision
        }
        return this.json(session)
      }
      if (method === 'POST' && sessionMatch[2]) {
        const accepted = session.rows.filter((r) => r.decision === 'accepted')
        if (accepted.length === 0 && !body.empty_contribution) {
          return this.error(400, 'no accepted statements')
        }
        session.state = 'inserted'
        const statements = accepted.map(({ property, value }) => ({ property, value }))
        this.triples.set(session.assay_id, statements)
        return this.json({
          session_id: session.session_id,
          assay_id: session.assay_id,
          triples_written: statements.length,
          statements,
        })
      }
    }

    const compareMatch = url.match(/\/compare\?assays=([^&]*)/)
    if (compareMatch && method === 'GET') {
      const ids = decodeURIComponent(compareMatch[1]).split(',').filter(Boolean)
      const matrix: Record<string, Record<string, string[]>> = {}
      for (const id of ids) {
        const stored = this.triples.get(id)
        if (stored === undefined) return this.error(404, `unknown assay id '${id}'`)
        for (const s of stored) {
          matrix[s.property] ??= {}
          matrix[s.property][id] ??= []
          matrix[s.property][id].push(s.value)
        }
      }
      const properties = Object.keys(matrix).sort()
      for (const p of properties) {
        for (const id of ids) matrix[p][id] ??= []
      }
      return this.json({ assays: ids, properties, matrix })
    }

    return this.error(404, `no route for ${method} ${url}`)
  }

  private json(obj: unknown, status = 200): Response {
    return new Response(JSON.stringify(obj), {
      status,
      headers: { 'Content-Type': 'application/json' },
    })
  }

  private error(status: number, detail: string): Response {
    return new Response(JSON.stringify({ detail }), { status })
  }
}
