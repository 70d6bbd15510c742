// Typed client for the session service. All engine state changes go through
// these documented endpoints and nothing else.

import type { MirrorFrame, PerformancePayload, SessionForm } from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`HTTP ${status}: ${JSON.stringify(detail)}`);
  }
}

async function expectJson(response: Response): Promise<any> {
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    // non-JSON error body; keep null
  }
  if (!response.ok) {
    throw new ApiError(response.status, (body as any)?.detail ?? body);
  }
  return body;
}

export class SessionApi {
  constructor(
    public baseUrl: string,
    private fetchImpl: typeof fetch = fetch,
  ) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async health(): Promise<boolean> {
    try {
      const response = await this.fetchImpl(this.url("/api/health"));
      return response.ok;
    } catch {
      return false;
    }
  }

  async createSession(form: SessionForm, sessionId?: string): Promise<string> {
    const body = {
      session_id: sessionId,
      config: {
        eye_contact_dwell_ms: form.eye_contact_dwell_ms,
        response_dwell_ms: form.response_dwell_ms,
        cue_duration_ms: form.cue_duration_ms,
        trials_per_session: form.trials_per_session,
        rng_seed: form.rng_seed,
        timing_mode: form.timing_mode,
      },
      profile: form.profile,
    };
    const data = await expectJson(
      await this.fetchImpl(this.url("/api/session"), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      }),
    );
    return data.session_id as string;
  }

  async start(sessionId: string): Promise<void> {
    await expectJson(
      await this.fetchImpl(this.url(`/api/session/${sessionId}/start`), { method: "POST" }),
    );
  }

  async stop(sessionId: string): Promise<void> {
    await expectJson(
      await this.fetchImpl(this.url(`/api/session/${sessionId}/stop`), { method: "POST" }),
    );
  }

  async performance(sessionId: string): Promise<PerformancePayload> {
    return expectJson(
      await this.fetchImpl(this.url(`/api/session/${sessionId}/performance`)),
    );
  }

  async submitFeedback(sessionId: string, note: string): Promise<void> {
    await expectJson(
      await this.fetchImpl(this.url(`/api/session/${sessionId}/feedback`), {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ note }),
      }),
    );
  }

  async downloadLog(sessionId: string): Promise<unknown> {
    return expectJson(await this.fetchImpl(this.url(`/api/session/${sessionId}/log`)));
  }

  /** Subscribe to the mirror stream; resolves when the stream ends. */
  async streamFrames(
    sessionId: string,
    onFrame: (frame: MirrorFrame) => void,
    signal?: AbortSignal,
  ): Promise<void> {
    const response = await this.fetchImpl(this.url(`/api/session/${sessionId}/stream`), {
      signal,
    });
    if (!response.ok || response.body === null) {
      throw new ApiError(response.status, "stream unavailable");
    }
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    let buffer = "";
    for (;;) {
      const { done, value } = await reader.read();
      if (done) {
        return;
      }
      buffer += decoder.decode(value, { stream: true });
      for (;;) {
        const boundary = buffer.indexOf("\n\n");
        if (boundary < 0) {
          break;
        }
        const chunk = buffer.slice(0, boundary);
        buffer = buffer.slice(boundary + 2);
        for (const line of chunk.split("\n")) {
          if (line.startsWith("data: ")) {
            onFrame(JSON.parse(line.slice("data: ".length)) as MirrorFrame);
          }
        }
      }
    }
  }
}
