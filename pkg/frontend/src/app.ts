/** Practice loop wiring: pick a word, record, submit, read the verdict. */

import { ApiError, TutorApi, WordInfo } from "./api.js";
import { appendAttempt, attemptsForWord, makeAttempt, AttemptRecord } from "./history.js";
import { MicRecorder } from "./recorder.js";
import { historyLine, verdictView, wordOptionLabel } from "./view.js";
import { downmixToMono, validateDuration, wavBlob } from "./wav.js";

const SERVICE_URL = (window as unknown as { CAPT_SERVICE_URL?: string })
  .CAPT_SERVICE_URL ?? "http://127.0.0.1:8000";

const api = new TutorApi(SERVICE_URL);
const recorder = new MicRecorder();

let words: WordInfo[] = [];
let history: readonly AttemptRecord[] = [];
let submitting = false;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setStatus(text: string, isError = false): void {
  const status = el<HTMLDivElement>("status");
  status.textContent = text;
  status.className = isError ? "status error" : "status";
}

function renderWords(): void {
  const select = el<HTMLSelectElement>("word-select");
  select.innerHTML = "";
  if (words.length === 0) {
    const opt = document.createElement("option");
    opt.textContent = "no words available";
    opt.disabled = true;
    select.appendChild(opt);
    return;
  }
  for (const word of words) {
    const opt = document.createElement("option");
    opt.value = word.word_id;
    opt.textContent = wordOptionLabel(word);
    select.appendChild(opt);
  }
}

function renderHistory(): void {
  const list = el<HTMLUListElement>("history");
  list.innerHTML = "";
  const wordId = el<HTMLSelectElement>("word-select").value;
  for (const attempt of attemptsForWord(history, wordId)) {
    const item = document.createElement("li");
    item.textContent = historyLine(attempt);
    const audio = document.createElement("audio");
    audio.controls = true;
    audio.src = attempt.audioUrl;
    item.appendChild(audio);
    list.appendChild(item);
  }
}

function renderVerdict(view: ReturnType<typeof verdictView> | null): void {
  const badge = el<HTMLDivElement>("verdict");
  if (!view) {
    badge.textContent = "";
    badge.className = "verdict";
    return;
  }
  badge.textContent = `${view.label}  (p=${view.probabilityText}, model ${view.modelVersion})`;
  badge.className = `verdict ${view.cssClass}`;
}

async function loadWords(): Promise<void> {
  try {
    words = await api.words();
    renderWords();
    setStatus(words.length ? "pick a word and record your attempt" : "no words available");
  } catch (err) {
    setStatus(`cannot reach the tutoring service: ${String(err)} — retry below`, true);
    el<HTMLButtonElement>("retry").hidden = false;
  }
}

async function onRecordToggle(): Promise<void> {
  const button = el<HTMLButtonElement>("record");
  if (!recorder.isRecording) {
    try {
      await recorder.start();
      button.textContent = "stop";
      setStatus("recording… click stop when done");
    } catch {
      setStatus("microphone permission is required to practice", true);
    }
    return;
  }
  button.textContent = "record";
  const capture = await recorder.stop();
  const mono = downmixToMono([capture.samples]);
  const problem = validateDuration(mono.length, capture.sampleRate);
  if (problem) {
    setStatus(problem, true);
    return;
  }
  await submit(wavBlob(mono, capture.sampleRate));
}

async function submit(audio: Blob): Promise<void> {
  if (submitting) return;
  submitting = true;
  el<HTMLButtonElement>("record").disabled = true;
  const wordId = el<HTMLSelectElement>("word-select").value;
  try {
    const response = await api.score(wordId, audio);
    const url = URL.createObjectURL(audio);
    history = appendAttempt(history, makeAttempt(response, url));
    renderVerdict(verdictView(response));
    renderHistory();
    setStatus("scored — try again to improve");
  } catch (err) {
    // failed submissions leave the history untouched
    const reason = err instanceof ApiError ? `${err.status}: ${err.message}` : String(err);
    setStatus(`submission failed — ${reason}`, true);
  } finally {
    submitting = false;
    el<HTMLButtonElement>("record").disabled = false;
  }
}

export function initApp(): void {
  el<HTMLButtonElement>("record").addEventListener("click", () => void onRecordToggle());
  el<HTMLButtonElement>("retry").addEventListener("click", () => void loadWords());
  el<HTMLSelectElement>("word-select").addEventListener("change", () => {
    renderVerdict(null);
    renderHistory();
  });
  void loadWords();
}

initApp();
