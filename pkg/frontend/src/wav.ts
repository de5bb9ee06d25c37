/** Client-side PCM WAV encoding; the service accepts only WAV uploads. */

export const MIN_ATTEMPT_SECONDS = 0.3;
export const MAX_ATTEMPT_SECONDS = 10;

/** Average multi-channel capture buffers down to one channel. */
export function downmixToMono(channels: Float32Array[]): Float32Array {
  if (channels.length === 0) return new Float32Array(0);
  const first = channels[0]!;
  if (channels.length === 1) return first;
  const out = new Float32Array(first.length);
  for (let i = 0; i < out.length; i++) {
    let acc = 0;
    for (const ch of channels) acc += ch[i] ?? 0;
    out[i] = acc / channels.length;
  }
  return out;
}

/** null when the duration is submittable, else a user-facing reason. */
export function validateDuration(nSamples: number, sampleRate: number): string | null {
  const seconds = nSamples / sampleRate;
  if (seconds < MIN_ATTEMPT_SECONDS) {
    return `recording too short (${seconds.toFixed(2)}s, need at least ${MIN_ATTEMPT_SECONDS}s)`;
  }
  if (seconds > MAX_ATTEMPT_SECONDS) {
    return `recording too long (${seconds.toFixed(1)}s, at most ${MAX_ATTEMPT_SECONDS}s)`;
  }
  return null;
}

/** Mono 16-bit little-endian PCM WAV bytes. */
export function encodeWavPcm16(
  samples: Float32Array,
  sampleRate: number,
): Uint8Array<ArrayBuffer> {
  const dataLen = samples.length * 2;
  const buffer = new ArrayBuffer(44 + dataLen);
  const view = new DataView(buffer);
  const writeStr = (off: number, s: string) => {
    for (let i = 0; i < s.length; i++) view.setUint8(off + i, s.charCodeAt(i));
  };
  writeStr(0, "RIFF");
  view.setUint32(4, 36 + dataLen, true);
  writeStr(8, "WAVEfmt ");
  view.setUint32(16, 16, true);
  view.setUint16(20, 1, true); // PCM
  view.setUint16(22, 1, true); // mono
  view.setUint32(24, sampleRate, true);
  view.setUint32(28, sampleRate * 2, true);
  view.setUint16(32, 2, true);
  view.setUint16(34, 16, true);
  writeStr(36, "data");
  view.setUint32(40, dataLen, true);
  for (let i = 0; i < samples.length; i++) {
    const clamped = Math.max(-1, Math.min(1, samples[i] ?? 0));
    view.setInt16(44 + i * 2, Math.round(clamped * 32767), true);
  }
  return new Uint8Array(buffer);
}

export function wavBlob(samples: Float32Array, sampleRate: number): Blob {
  return new Blob([encodeWavPcm16(samples, sampleRate)], { type: "audio/wav" });
}
