/**
 * Encoder-decoder LSTM with scaled Luong (general) attention, sized for
 * sentence-level translation of renamed API streams.
 *
 * The encoder runs a stacked LSTM over source symbols; the decoder is
 * initialized from the final encoder state and attends over the top-layer
 * encoder outputs each step: score_i = g * h_t' (Wa h_i), softmax over i,
 * context = sum of weighted encoder states, combined through a tanh layer
 * before the output projection. The combined vector is fed back into the
 * next decoder input (input feeding) so the decoder can track which source
 * positions it has already covered. Greedy decoding; teacher forcing in
 * training.
 *
 * Training runs a whole batch through one graph with the examples laid out
 * as matrix columns: sources are left-padded (not-yet-started columns held
 * at the zero state), targets right-padded (finished columns masked out of
 * the loss), so each column computes exactly what it would alone while the
 * per-op bookkeeping is shared across the batch.
 *
 * Dropout sits between stacked layers only. Embeddings stay intact: corpus
 * sentences often differ in a single symbol, and masking that symbol at the
 * input makes the pair unlearnable, putting a floor under the loss.
 */
import { Graph, Mat, Rng, randMat, softmaxCrossEntropyCols, softmaxProbs } from './matrix.js';
import { Vocab } from './vocab.js';

export interface NmtConfig {
  batchSize: number;
  rnnCell: 'lstm';
  learningRate: number;
  dropout: number;
  attention: 'scaled-luong';
  numLayers: number;
  embeddingDim: number;
  hiddenDim: number;
  maxSentenceLength: number;
  reverseSource: boolean;
}

export const defaultConfig: NmtConfig = {
  batchSize: 128,
  rnnCell: 'lstm',
  learningRate: 0.005,
  dropout: 0.2,
  attention: 'scaled-luong',
  numLayers: 2,
  embeddingDim: 32,
  hiddenDim: 64,
  maxSentenceLength: 64,
  reverseSource: false,
};

export function validateConfig(config: NmtConfig): void {
  const positive: Array<keyof NmtConfig> = [
    'batchSize',
    'learningRate',
    'numLayers',
    'embeddingDim',
    'hiddenDim',
    'maxSentenceLength',
  ];
  for (const key of positive) {
    const value = config[key] as number;
    if (!(value > 0)) throw new RangeError(`${key} must be positive, got ${value}`);
  }
  if (!(config.dropout >= 0 && config.dropout < 1)) {
    throw new RangeError(`dropout must be in [0, 1), got ${config.dropout}`);
  }
  if (config.rnnCell !== 'lstm') throw new RangeError(`unsupported rnnCell ${config.rnnCell}`);
  if (config.attention !== 'scaled-luong') {
    throw new RangeError(`unsupported attention ${config.attention}`);
  }
}

/** One training example after vocabulary encoding. */
export interface EncodedPair {
  source: number[];
  target: number[];
}

interface LstmState {
  h: Mat[];
  c: Mat[];
}

const INIT_SCALE = 0.08;
const GATES = ['Wix', 'Wih', 'bi', 'Wfx', 'Wfh', 'bf', 'Wox', 'Woh', 'bo', 'Wcx', 'Wch', 'bc'];

export class Seq2seqModel {
  readonly config: NmtConfig;
  readonly sourceVocab: Vocab;
  readonly targetVocab: Vocab;
  readonly params = new Map<string, Mat>();

  constructor(config: NmtConfig, sourceVocab: Vocab, targetVocab: Vocab, rng = new Rng(1)) {
    validateConfig(config);
    this.config = config;
    this.sourceVocab = sourceVocab;
    this.targetVocab = targetVocab;

    const { embeddingDim: E, hiddenDim: H, numLayers } = config;
    this.params.set('srcEmbed', randMat(sourceVocab.size, E, INIT_SCALE, rng));
    this.params.set('tgtEmbed', randMat(targetVocab.size, E, INIT_SCALE, rng));
    for (const side of ['enc', 'dec']) {
      for (let d = 0; d < numLayers; d++) {
        // the decoder's first layer also takes the fed-back attention vector
        const inputDim = d === 0 ? (side === 'dec' ? E + H : E) : H;
        for (const gate of GATES) {
          const name = `${side}_${gate}${d}`;
          if (gate.startsWith('b')) {
            const bias = new Mat(H, 1);
            // forget-gate bias starts open so early gradients reach the cell
            if (gate === 'bf') bias.w.fill(1);
            this.params.set(name, bias);
          } else {
            const cols = gate.endsWith('x') ? inputDim : H;
            this.params.set(name, randMat(H, cols, INIT_SCALE, rng));
          }
        }
      }
    }
    this.params.set('attW', randMat(H, H, INIT_SCALE, rng));
    const attScale = new Mat(1, 1);
    attScale.w[0] = 1;
    this.params.set('attScale', attScale);
    this.params.set('combW', randMat(H, 2 * H, INIT_SCALE, rng));
    this.params.set('outW', randMat(targetVocab.size, H, INIT_SCALE, rng));
    this.params.set('outB', new Mat(targetVocab.size, 1));
  }

  private param(name: string): Mat {
    const mat = this.params.get(name);
    if (!mat) throw new Error(`missing parameter ${name}`);
    return mat;
  }

  private zeroState(batch: number): LstmState {
    const { hiddenDim: H, numLayers } = this.config;
    return {
      h: Array.from({ length: numLayers }, () => new Mat(H, batch)),
      c: Array.from({ length: numLayers }, () => new Mat(H, batch)),
    };
  }

  private lstmStack(g: Graph, side: 'enc' | 'dec', x: Mat, prev: LstmState, rng: Rng): LstmState {
    const { numLayers, dropout } = this.config;
    const h: Mat[] = [];
    const c: Mat[] = [];
    for (let d = 0; d < numLayers; d++) {
      const input = d === 0 ? x : g.dropout(h[d - 1], dropout, rng);
      const p = (gate: string) => this.param(`${side}_${gate}${d}`);
      const gateIn = (wx: string, wh: string, b: string) =>
        g.addCol(g.add(g.mul(p(wx), input), g.mul(p(wh), prev.h[d])), p(b));
      const inputGate = g.sigmoid(gateIn('Wix', 'Wih', 'bi'));
      const forgetGate = g.sigmoid(gateIn('Wfx', 'Wfh', 'bf'));
      const outputGate = g.sigmoid(gateIn('Wox', 'Woh', 'bo'));
      const cellWrite = g.tanh(gateIn('Wcx', 'Wch', 'bc'));
      const cell = g.add(g.eltmul(forgetGate, prev.c[d]), g.eltmul(inputGate, cellWrite));
      h.push(g.eltmul(outputGate, g.tanh(cell)));
      c.push(cell);
    }
    return { h, c };
  }

  /**
   * Run the encoder over a batch of sources, one per column; returns the
   * final state, per-step top-layer outputs, and the step x batch validity
   * mask for attention. reverseSource picks the read order: right to left
   * makes the final state lean on the head of the sentence (what the first
   * decoder steps need most), while left to right carries the head symbol
   * into every later annotation, which is what attention needs when
   * sentences differ only in that symbol. Shorter sources are left-padded:
   * until a column's sentence starts, its state is masked back to zero, so
   * it enters its first real step exactly as if it ran alone.
   */
  private encode(
    g: Graph,
    sources: number[][],
    rng: Rng,
  ): { state: LstmState; top: Mat[]; srcMask: Uint8Array } {
    const B = sources.length;
    const T = Math.max(...sources.map(s => s.length));
    const embed = this.param('srcEmbed');
    const { padId } = this.sourceVocab;
    const srcMask = new Uint8Array(T * B);
    const reverse = this.config.reverseSource;
    let state = this.zeroState(B);
    const top: Mat[] = [];
    for (let t = 0; t < T; t++) {
      const ids = new Array<number>(B);
      const started = new Uint8Array(B);
      for (let b = 0; b < B; b++) {
        const src = sources[b];
        if (t >= T - src.length) {
          ids[b] = reverse ? src[T - 1 - t] : src[t - (T - src.length)];
          started[b] = 1;
        } else {
          ids[b] = padId;
        }
        srcMask[t * B + b] = started[b];
      }
      const x = g.gatherCols(embed, ids);
      state = this.lstmStack(g, 'enc', x, state, rng);
      if (started.includes(0)) {
        state = {
          h: state.h.map(m => g.maskCols(m, started)),
          c: state.c.map(m => g.maskCols(m, started)),
        };
      }
      top.push(state.h[state.h.length - 1]);
    }
    return { state, top, srcMask };
  }

  private decodeStep(
    g: Graph,
    prevIds: number[],
    feed: Mat,
    state: LstmState,
    encTop: Mat[],
    projEnc: Mat[],
    srcMask: Uint8Array,
    rng: Rng,
  ): { state: LstmState; logits: Mat; combined: Mat } {
    const embedded = g.gatherCols(this.param('tgtEmbed'), prevIds);
    const x = g.concat(embedded, feed);
    const next = this.lstmStack(g, 'dec', x, state, rng);
    const hTop = next.h[next.h.length - 1];

    const scale = this.param('attScale');
    const scores = encTop.map((_, i) => g.scale(g.dot(hTop, projEnc[i]), scale));
    const alpha = g.softmaxCols(g.stack(scores), srcMask);
    const context = g.weightedSum(alpha, encTop);
    const combined = g.tanh(g.mul(this.param('combW'), g.concat(context, hTop)));
    const logits = g.addCol(g.mul(this.param('outW'), combined), this.param('outB'));
    return { state: next, logits, combined };
  }

  private truncate(ids: number[]): number[] {
    return ids.slice(0, this.config.maxSentenceLength);
  }

  /**
   * Teacher-forced loss for one pair; gradients land in param.dw once the
   * caller runs g.backward(). Returns the summed token loss and token count.
   */
  lossOnPair(g: Graph, source: number[], target: number[], rng: Rng): { loss: number; tokens: number } {
    return this.lossOnBatch(g, [{ source, target }], rng);
  }

  /**
   * Teacher-forced loss for a batch run as one graph, examples as columns.
   * Finished columns keep stepping (their states are bounded, so the values
   * stay finite) but are masked out of the loss, which also keeps gradients
   * from ever reaching them. Returns summed token loss and token count.
   */
  lossOnBatch(g: Graph, batch: EncodedPair[], rng: Rng): { loss: number; tokens: number } {
    const pairs = batch
      .map(pair => ({ source: this.truncate(pair.source), target: this.truncate(pair.target) }))
      .filter(pair => pair.source.length > 0);
    if (pairs.length === 0) return { loss: 0, tokens: 0 };
    const B = pairs.length;

    const { state: encState, top, srcMask } = this.encode(g, pairs.map(p => p.source), rng);
    const projEnc = top.map(h => g.mul(this.param('attW'), h));

    const { sosId, eosId, padId } = this.targetVocab;
    const inputs = pairs.map(p => [sosId, ...p.target]);
    const golds = pairs.map(p => [...p.target, eosId]);
    const steps = Math.max(...golds.map(gold => gold.length));

    let state = encState;
    let feed = new Mat(this.config.hiddenDim, B);
    let loss = 0;
    let tokens = 0;
    for (let t = 0; t < steps; t++) {
      const ids = new Array<number>(B);
      const targets = new Array<number>(B);
      const active = new Uint8Array(B);
      for (let b = 0; b < B; b++) {
        if (t < golds[b].length) {
          ids[b] = inputs[b][t];
          targets[b] = golds[b][t];
          active[b] = 1;
          tokens++;
        } else {
          ids[b] = padId;
          targets[b] = padId;
        }
      }
      const step = this.decodeStep(g, ids, feed, state, top, projEnc, srcMask, rng);
      state = step.state;
      feed = step.combined;
      loss += softmaxCrossEntropyCols(g, step.logits, targets, active);
    }
    return { loss, tokens };
  }

  /** Greedy translation of one tokenized sentence. Unknown symbols become `_unk`. */
  translate(tokens: string[]): string[] {
    if (tokens.length === 0) return [];
    const g = new Graph(false);
    const rng = new Rng(0); // dropout is off outside training; never consulted
    const sourceIds = this.truncate(this.sourceVocab.encode(tokens));

    const { state: encState, top, srcMask } = this.encode(g, [sourceIds], rng);
    const projEnc = top.map(h => g.mul(this.param('attW'), h));

    const { sosId, eosId, padId } = this.targetVocab;
    const out: number[] = [];
    let state = encState;
    let feed = new Mat(this.config.hiddenDim, 1);
    let prev = sosId;
    for (let t = 0; t < this.config.maxSentenceLength; t++) {
      const step = this.decodeStep(g, [prev], feed, state, top, projEnc, srcMask, rng);
      state = step.state;
      feed = step.combined;
      const probs = softmaxProbs(step.logits);
      probs[padId] = 0;
      probs[sosId] = 0;
      let best = eosId;
      for (let i = 0; i < probs.length; i++) {
        if (probs[i] > probs[best]) best = i;
      }
      if (best === eosId) break;
      out.push(best);
      prev = best;
    }
    return this.targetVocab.decode(out);
  }

  serialize(): object {
    const params: Record<string, { n: number; d: number; w: number[] }> = {};
    for (const [name, mat] of this.params) {
      params[name] = { n: mat.n, d: mat.d, w: [...mat.w] };
    }
    return {
      config: this.config,
      sourceSymbols: this.sourceVocab.symbols,
      targetSymbols: this.targetVocab.symbols,
      params,
    };
  }

  static deserialize(raw: any): Seq2seqModel {
    const sourceVocab = Vocab.fromSerialized(raw.sourceSymbols);
    const targetVocab = Vocab.fromSerialized(raw.targetSymbols);
    // models saved before the read-order knob existed were trained reversed
    const config = { ...raw.config };
    if (config.reverseSource === undefined) config.reverseSource = true;
    const model = new Seq2seqModel(config, sourceVocab, targetVocab);
    for (const [name, packed] of Object.entries<any>(raw.params)) {
      model.params.set(name, Mat.from(packed.n, packed.d, packed.w));
    }
    return model;
  }
}
