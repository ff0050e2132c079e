// Chat window: transcript pane, composer, calendar panel, and a per-turn
// inspector (slots + chart trace) that stays hidden unless asked for.

import { ApiError, CalendarEventJson, CaltalkClient } from "./api.js";

export interface TurnView {
  speaker: "user" | "system";
  text: string;
  slotsRendered?: string;
  trace?: string[];
}

export class ChatApp {
  readonly turns: TurnView[] = [];
  sessionId: string | null = null;
  private inFlight = false;

  private transcriptEl!: HTMLElement;
  private formEl!: HTMLFormElement;
  private inputEl!: HTMLInputElement;
  private sendEl!: HTMLButtonElement;
  private errorEl!: HTMLElement;
  private calendarEl!: HTMLElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly client: CaltalkClient,
  ) {}

  async init(): Promise<void> {
    this.render();
    try {
      this.sessionId = await this.client.createSession();
    } catch (err) {
      this.showError(err);
    }
  }

  private render(): void {
    this.root.innerHTML = `
      <div class="chat">
        <div class="transcript" aria-live="polite"></div>
        <div class="error-banner" hidden></div>
        <form class="composer">
          <input type="text" name="utterance" autocomplete="off"
                 placeholder="Schedule a meeting with Bob." />
          <button type="submit">Send</button>
        </form>
      </div>
      <aside class="calendar-panel">
        <h2>Calendar</h2>
        <ul class="events"></ul>
      </aside>`;
    this.transcriptEl = this.root.querySelector(".transcript")!;
    this.formEl = this.root.querySelector(".composer")!;
    this.inputEl = this.root.querySelector("input")!;
    this.sendEl = this.root.querySelector("button")!;
    this.errorEl = this.root.querySelector(".error-banner")!;
    this.calendarEl = this.root.querySelector(".events")!;
    this.formEl.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.send();
    });
  }

  /** Post the composer's utterance; append both turns; refresh the
   *  calendar when the reply executed an action. */
  async send(): Promise<void> {
    const text = this.inputEl.value.trim();
    if (!text || this.inFlight || !this.sessionId) {
      return; // empty input sends nothing
    }
    this.inFlight = true;
    this.sendEl.disabled = true;
    this.hideError();
    try {
      const record = await this.client.sendUtterance(this.sessionId, text);
      this.appendTurn({ speaker: "user", text });
      this.appendTurn({
        speaker: "system",
        text: record.reply.text,
        slotsRendered: record.slots_rendered,
        trace: record.trace,
      });
      this.inputEl.value = "";
      if (record.reply.kind === "execute") {
        await this.refreshCalendar();
      }
    } catch (err) {
      this.showError(err); // input stays put for a retry
    } finally {
      this.inFlight = false;
      this.sendEl.disabled = false;
    }
  }

  appendTurn(turn: TurnView): void {
    this.turns.push(turn);
    const bubble = document.createElement("div");
    bubble.className = `turn ${turn.speaker}`;
    const text = document.createElement("div");
    text.className = "text";
    text.textContent = turn.text;
    bubble.appendChild(text);
    if (turn.speaker === "system" && (turn.slotsRendered || turn.trace)) {
      bubble.appendChild(this.inspectorFor(turn));
    }
    this.transcriptEl.appendChild(bubble);
  }

  private inspectorFor(turn: TurnView): HTMLElement {
    const wrapper = document.createElement("div");
    const toggle = document.createElement("button");
    toggle.type = "button";
    toggle.className = "inspector-toggle";
    toggle.textContent = "details";
    const pane = document.createElement("pre");
    pane.className = "inspector";
    pane.hidden = true;
    const parts = [];
    if (turn.slotsRendered) parts.push(`slots: ${turn.slotsRendered}`);
    if (turn.trace && turn.trace.length) parts.push(turn.trace.join("\n"));
    pane.textContent = parts.join("\n");
    toggle.addEventListener("click", () => {
      pane.hidden = !pane.hidden;
    });
    wrapper.appendChild(toggle);
    wrapper.appendChild(pane);
    return wrapper;
  }

  async refreshCalendar(): Promise<void> {
    if (!this.sessionId) return;
    const events = await this.client.calendar(this.sessionId);
    this.calendarEl.innerHTML = "";
    for (const event of events) {
      const item = document.createElement("li");
      item.textContent = formatEvent(event);
      this.calendarEl.appendChild(item);
    }
  }

  transcriptLines(): string[] {
    return this.turns.map(
      (turn) => `${turn.speaker === "user" ? "U" : "S"}: ${turn.text}`,
    );
  }

  private showError(err: unknown): void {
    const message =
      err instanceof ApiError ? err.message : `unexpected error: ${String(err)}`;
    this.errorEl.textContent = message;
    this.errorEl.hidden = false;
  }

  private hideError(): void {
    this.errorEl.hidden = true;
    this.errorEl.textContent = "";
  }
}

export function formatEvent(event: CalendarEventJson): string {
  const start = new Date(event.start);
  const month = start.getMonth() + 1;
  const day = start.getDate();
  const hh = String(start.getHours()).padStart(2, "0");
  const mm = String(start.getMinutes()).padStart(2, "0");
  let line = `${month}/${day} ${hh}:${mm} ${event.name}`;
  if (event.partners.length) line += ` with ${event.partners.join(", ")}`;
  if (event.place) line += ` in ${event.place}`;
  return line;
}
