// Typed client for the dialog service HTTP API.

export interface Reply {
  kind: string;
  text: string;
}

export interface TurnRecord {
  utterance: string;
  reply: Reply;
  slots: Record<string, unknown>;
  slots_rendered: string;
  trace?: string[];
  event?: CalendarEventJson;
}

export interface CalendarEventJson {
  id: string;
  name: string;
  start: string; // ISO, minutes precision
  duration_minutes: number;
  partners: string[];
  place?: string;
}

export interface Transcript {
  lines: string[];
  text: string;
  turns: TurnRecord[];
}

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

type FetchLike = typeof fetch;

export class CaltalkClient {
  private readonly fetchFn: FetchLike;

  constructor(readonly baseUrl = "", fetchFn?: FetchLike) {
    this.fetchFn = fetchFn ?? ((...args) => fetch(...args));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new ApiError(`service unreachable: ${String(err)}`, 0);
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(detail, response.status);
    }
    return (await response.json()) as T;
  }

  async createSession(): Promise<string> {
    const body = await this.request<{ session_id: string }>("/sessions", {
      method: "POST",
    });
    return body.session_id;
  }

  sendUtterance(sessionId: string, utterance: string): Promise<TurnRecord> {
    return this.request<TurnRecord>(`/sessions/${sessionId}/turns`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ utterance }),
    });
  }

  transcript(sessionId: string): Promise<Transcript> {
    return this.request<Transcript>(`/sessions/${sessionId}/transcript`);
  }

  async calendar(sessionId: string): Promise<CalendarEventJson[]> {
    const body = await this.request<{ events: CalendarEventJson[] }>(
      `/sessions/${sessionId}/calendar`,
    );
    return body.events;
  }
}
