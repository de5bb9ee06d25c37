/** Session-local attempt history: append-only, newest last. */

import type { ScoreResponse, Verdict } from "./api.js";

export interface AttemptRecord {
  wordId: string;
  timestamp: number;
  probability: number;
  verdict: Verdict;
  modelVersion: string;
  /** object URL of the recorded audio so the learner can replay it */
  audioUrl: string;
}

export function makeAttempt(
  response: ScoreResponse,
  audioUrl: string,
  now: number = Date.now(),
): AttemptRecord {
  return {
    wordId: response.word_id,
    timestamp: now,
    probability: response.probability,
    // the service's verdict is authoritative: never re-threshold client-side
    verdict: response.verdict,
    modelVersion: response.model_version,
    audioUrl,
  };
}

export function appendAttempt(
  history: readonly AttemptRecord[],
  record: AttemptRecord,
): AttemptRecord[] {
  return [...history, record];
}

/** Attempts for one word, oldest first, for the improvement trace. */
export function attemptsForWord(
  history: readonly AttemptRecord[],
  wordId: string,
): AttemptRecord[] {
  return history.filter((a) => a.wordId === wordId);
}
