/** Pure view-model helpers, kept DOM-free so they can be unit tested. */

import type { ScoreResponse, WordInfo } from "./api.js";
import type { AttemptRecord } from "./history.js";

export interface VerdictView {
  label: string;
  cssClass: string;
  probabilityText: string;
  modelVersion: string;
}

/** The badge mirrors the service verdict verbatim; no client thresholding. */
export function verdictView(response: ScoreResponse): VerdictView {
  return {
    label: response.verdict,
    cssClass: response.verdict === "correct" ? "verdict-correct" : "verdict-wrong",
    probabilityText: response.probability.toFixed(2),
    modelVersion: response.model_version,
  };
}

export function wordOptionLabel(word: WordInfo): string {
  return word.gloss && word.gloss !== word.word_id
    ? `${word.word_id} — ${word.gloss}`
    : word.word_id;
}

export function historyLine(attempt: AttemptRecord): string {
  const time = new Date(attempt.timestamp).toLocaleTimeString();
  return `${time}  ${attempt.wordId}: ${attempt.verdict} (p=${attempt.probability.toFixed(2)})`;
}
