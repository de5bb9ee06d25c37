/** Typed client for the scoring service. */

export interface WordInfo {
  word_id: string;
  gloss: string;
  model_version: string;
}

export type Verdict = "correct" | "mispronounced";

export interface ScoreResponse {
  word_id: string;
  probability: number;
  verdict: Verdict;
  model_version: string;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function readError(resp: Response): Promise<string> {
  try {
    const body = await resp.json();
    if (body && typeof body.error === "string") return body.error;
  } catch {
    // fall through to the raw status text
  }
  return `HTTP ${resp.status}`;
}

export class TutorApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  async health(): Promise<boolean> {
    try {
      const resp = await this.fetchFn(`${this.baseUrl}/v1/health`);
      return resp.ok;
    } catch {
      return false;
    }
  }

  async words(): Promise<WordInfo[]> {
    const resp = await this.fetchFn(`${this.baseUrl}/v1/words`);
    if (!resp.ok) throw new ApiError(resp.status, await readError(resp));
    const payload = await resp.json();
    if (!Array.isArray(payload)) throw new ApiError(resp.status, "malformed word list");
    return payload as WordInfo[];
  }

  /** Submit one WAV attempt; the audio is sent as-is (no client resampling). */
  async score(wordId: string, audio: Blob): Promise<ScoreResponse> {
    const resp = await this.fetchFn(
      `${this.baseUrl}/v1/score?word_id=${encodeURIComponent(wordId)}`,
      { method: "POST", headers: { "Content-Type": "audio/wav" }, body: audio },
    );
    if (!resp.ok) throw new ApiError(resp.status, await readError(resp));
    return (await resp.json()) as ScoreResponse;
  }
}
