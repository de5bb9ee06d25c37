/** Microphone capture to raw PCM via the Web Audio API.

The capture keeps the context's native sample rate; the service owns
resampling. Stopping returns the mono samples and that rate.
*/

export interface Capture {
  samples: Float32Array;
  sampleRate: number;
}

export class MicRecorder {
  private context: AudioContext | null = null;
  private stream: MediaStream | null = null;
  private processor: ScriptProcessorNode | null = null;
  private chunks: Float32Array[] = [];

  get isRecording(): boolean {
    return this.context !== null;
  }

  async start(): Promise<void> {
    if (this.context) throw new Error("already recording");
    this.stream = await navigator.mediaDevices.getUserMedia({
      audio: { channelCount: 1, echoCancellation: true, noiseSuppression: true },
    });
    this.context = new AudioContext();
    const source = this.context.createMediaStreamSource(this.stream);
    this.processor = this.context.createScriptProcessor(4096, 1, 1);
    this.chunks = [];
    this.processor.onaudioprocess = (event) => {
      this.chunks.push(new Float32Array(event.inputBuffer.getChannelData(0)));
    };
    source.connect(this.processor);
    this.processor.connect(this.context.destination);
  }

  async stop(): Promise<Capture> {
    if (!this.context) throw new Error("not recording");
    const sampleRate = this.context.sampleRate;
    this.processor?.disconnect();
    this.stream?.getTracks().forEach((t) => t.stop());
    await this.context.close();
    this.context = null;
    this.processor = null;
    this.stream = null;

    const total = this.chunks.reduce((n, c) => n + c.length, 0);
    const samples = new Float32Array(total);
    let offset = 0;
    for (const chunk of this.chunks) {
      samples.set(chunk, offset);
      offset += chunk.length;
    }
    this.chunks = [];
    return { samples, sampleRate };
  }
}
