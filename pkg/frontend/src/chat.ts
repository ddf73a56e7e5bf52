// Chat transcript state. Verdicts and numbers rendered into the
// transcript come straight from server payloads; a 409 (turn in flight)
// disables input instead of queueing optimistically.

import { ApiClient, HttpError } from "./api.js";
import type { ChatResponse } from "./types.js";

export interface ChatEntry {
  role: "user" | "assistant" | "system";
  text: string;
  verdicts?: Record<string, string>;
  effect?: number | null;
}

export class ChatModel {
  transcript: ChatEntry[] = [];
  inputDisabled = false;
  notice: string | null = null;
  analysisRunning = false;

  constructor(
    private api: ApiClient,
    private sessionId: string,
  ) {}

  async send(utterance: string): Promise<ChatResponse | null> {
    this.transcript.push({ role: "user", text: utterance });
    try {
      const res = await this.api.sendMessage(this.sessionId, utterance);
      this.notice = null;
      if (res.status === "accepted") {
        this.analysisRunning = true;
        this.transcript.push({ role: "assistant", text: res.text });
      } else {
        const entry: ChatEntry = { role: "assistant", text: res.text };
        if (res.intervention) {
          entry.verdicts = res.intervention.verdicts;
          entry.effect = res.intervention.effect_estimate;
        }
        this.transcript.push(entry);
      }
      return res;
    } catch (err) {
      if (err instanceof HttpError && err.status === 409) {
        this.inputDisabled = true;
        this.notice =
          "A turn is already running; wait for the checklist to finish.";
        this.transcript.pop(); // the utterance was not accepted
        return null;
      }
      const detail = err instanceof Error ? err.message : String(err);
      this.transcript.push({ role: "system", text: `Request failed: ${detail}` });
      return null;
    }
  }

  analysisFinished(): void {
    this.analysisRunning = false;
    this.inputDisabled = false;
    this.notice = null;
  }
}

export function verdictLabel(verdict: string): string {
  switch (verdict) {
    case "affected":
      return "affected";
    case "unaffected":
      return "unaffected";
    case "ambiguous_orientation":
      return "direction ambiguous";
    default:
      return verdict;
  }
}
