// Session controller: talks to the service, owns the view state, and
// re-renders through a callback. The service stays authoritative; on
// any divergence (conflict, stale preview) the fix is a re-fetch.

import { ApiError, Client } from "./api.js";
import { SortKey, ViewState, initialState, toggleSort } from "./state.js";

export class Controller {
  state: ViewState;
  private client: Client;
  private onChange: (state: ViewState) => void;
  private retryAction: (() => Promise<void>) | null = null;

  constructor(client: Client, onChange: (state: ViewState) => void) {
    this.client = client;
    this.onChange = onChange;
    this.state = initialState();
  }

  private emit(): void {
    this.onChange(this.state);
  }

  private fail(err: unknown): void {
    const msg = err instanceof ApiError ? err.detail : String(err);
    this.state = { ...this.state, banner: msg, busy: false };
    this.emit();
  }

  private async guard(action: () => Promise<void>): Promise<void> {
    this.retryAction = action;
    this.state = { ...this.state, busy: true, banner: null };
    this.emit();
    try {
      await action();
      this.state = { ...this.state, busy: false };
      this.emit();
    } catch (err) {
      this.fail(err);
    }
  }

  /** Load a graph and start a fresh session at the factual vertex. */
  open(graphId: string, factual: number): Promise<void> {
    return this.guard(async () => {
      const summary = await this.client.summary(graphId);
      const session = await this.client.createSession(graphId, factual);
      this.state = { ...this.state, summary, session };
    });
  }

  /** Resume an existing session, e.g. after a page refresh. */
  resume(sessionId: string): Promise<void> {
    return this.guard(async () => {
      const session = await this.client.getSession(sessionId);
      const summary = await this.client.summary(session.graph_id);
      this.state = { ...this.state, summary, session };
    });
  }

  /** Re-fetch the session document; the poll loop lands here. */
  refresh(): Promise<void> {
    const session = this.state.session;
    if (session === null) return Promise.resolve();
    return this.guard(async () => {
      const doc = await this.client.getSession(session.session_id);
      this.state = { ...this.state, session: doc };
    });
  }

  /** One poll tick. Suppressed while a request is in flight. */
  pollTick(): Promise<void> {
    if (this.state.busy || this.state.session === null) return Promise.resolve();
    return this.refresh();
  }

  /** Step to a neighbor shown in the current previews. A version
   * conflict means another tab moved first: re-fetch and say so. */
  async chooseStep(neighbor: number): Promise<void> {
    const session = this.state.session;
    if (session === null) return;
    if (!session.previews.some((p) => p.neighbor === neighbor)) {
      // stale click on a re-rendered table; refresh instead of guessing
      return this.refresh();
    }
    this.retryAction = null;
    this.state = { ...this.state, busy: true, banner: null };
    this.emit();
    try {
      const doc = await this.client.step(session.session_id, neighbor, session.version);
      this.state = { ...this.state, session: doc, busy: false };
      this.emit();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        try {
          const doc = await this.client.getSession(session.session_id);
          this.state = {
            ...this.state,
            session: doc,
            busy: false,
            banner: `${err.detail}; the view has been refreshed`,
          };
          this.emit();
        } catch (refreshErr) {
          this.fail(refreshErr);
        }
        return;
      }
      this.fail(err);
    }
  }

  setSort(key: SortKey): void {
    this.state = { ...this.state, sort: toggleSort(this.state.sort, key) };
    this.emit();
  }

  retry(): Promise<void> {
    if (this.retryAction === null) {
      this.state = { ...this.state, banner: null };
      this.emit();
      return Promise.resolve();
    }
    return this.guard(this.retryAction);
  }
}
