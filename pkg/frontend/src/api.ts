/** Typed client for the session service. */

import type {
  FeedbackPayload,
  StepOutcomePayload,
  TheoremInfo,
  TranscriptPayload,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly retriable: boolean
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(url, init);
  } catch (err) {
    throw new ServiceError(`network failure: ${String(err)}`, 0, true);
  }
  if (!response.ok) {
    const retriable = response.status === 502;
    let detail = response.statusText;
    try {
      const body = await response.json();
      detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    } catch {
      // keep the status text
    }
    throw new ServiceError(detail, response.status, retriable);
  }
  return (await response.json()) as T;
}

export class TutorClient {
  constructor(private readonly baseUrl: string = "") {}

  listTheorems(): Promise<TheoremInfo[]> {
    return request(`${this.baseUrl}/theorems`);
  }

  async createSession(theorem: string): Promise<string> {
    const body = await request<{ session_id: string }>(`${this.baseUrl}/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ theorem }),
    });
    return body.session_id;
  }

  submitStep(sessionId: string, nl: string): Promise<StepOutcomePayload> {
    return request(`${this.baseUrl}/sessions/${sessionId}/steps`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ nl }),
    });
  }

  requestHint(sessionId: string): Promise<FeedbackPayload> {
    return request(`${this.baseUrl}/sessions/${sessionId}/hint`, { method: "POST" });
  }

  transcript(sessionId: string, instructor = false): Promise<TranscriptPayload> {
    const suffix = instructor ? "?instructor=true" : "";
    return request(`${this.baseUrl}/sessions/${sessionId}${suffix}`);
  }
}
