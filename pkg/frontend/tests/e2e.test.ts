// End to end: the chat UI drives the real dialog service over HTTP.
//
// The service is spawned as a child process (packaged grammar, fixed
// anchor date) and the scripted dialog is replayed through the DOM.

import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { CaltalkClient } from "../src/api.js";
import { ChatApp } from "../src/app.js";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

let service: ChildProcess;

async function waitForService(timeoutMs = 30000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/docs`);
      if (response.ok) return;
    } catch (err) {
      lastError = err;
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`service did not come up: ${String(lastError)}`);
}

beforeAll(async () => {
  service = spawn(
    "python3",
    ["-m", "caltalk.cli", "serve", "--addr", `127.0.0.1:${PORT}`, "--today", "1995-07-01"],
    { cwd: "..", stdio: "ignore" },
  );
  await waitForService();
});

afterAll(() => {
  service?.kill();
});

const DIALOG = [
  ["Schedule a meeting with Bob.", "At what time and date?"],
  ["On August 30th.", "At what time?"],
  ["8.", "Morning or afternoon?"],
  ["In the evening.", "OK. Scheduled meeting on 8/30 at 20:00 with bob."],
] as const;

describe("chat UI against the live service", () => {
  it("replays the scheduling dialog and stays consistent with the service", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const client = new CaltalkClient(BASE);
    const app = new ChatApp(document.getElementById("app")!, client);
    await app.init();
    expect(app.sessionId).not.toBeNull();

    const input = document.querySelector("input") as HTMLInputElement;
    for (const [utterance, expected] of DIALOG) {
      input.value = utterance;
      await app.send();
      const bubbles = document.querySelectorAll(".turn.system .text");
      expect(bubbles[bubbles.length - 1].textContent).toBe(expected);
    }

    // rendered transcript equals the service's transcript endpoint
    const serverTranscript = await client.transcript(app.sessionId!);
    expect(app.transcriptLines()).toEqual(serverTranscript.lines);

    // the calendar panel shows the Aug 30, 20:00 meeting
    const items = document.querySelectorAll(".calendar-panel li");
    expect(items).toHaveLength(1);
    expect(items[0].textContent).toBe("8/30 20:00 meeting with bob");
  });

  it("keeps independent sessions apart", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const client = new CaltalkClient(BASE);
    const app = new ChatApp(document.getElementById("app")!, client);
    await app.init();
    const transcript = await client.transcript(app.sessionId!);
    expect(transcript.lines).toEqual([]);
  });

  it("surfaces service errors in the banner", async () => {
    document.body.innerHTML = '<div id="app"></div>';
    const client = new CaltalkClient(`http://127.0.0.1:1`); // nothing listens here
    const app = new ChatApp(document.getElementById("app")!, client);
    await app.init();
    const banner = document.querySelector(".error-banner") as HTMLElement;
    expect(banner.hidden).toBe(false);
  });
});
