/**
 * Small dense-matrix autograd used by the seq2seq model.
 *
 * A Mat carries values and a gradient buffer; a Graph records every forward
 * op as a closure so backward() can replay them in reverse. This keeps the
 * whole model in plain typed arrays with no framework dependency, which in
 * turn makes seeded runs bit-for-bit reproducible.
 */

export class Mat {
  readonly n: number;
  readonly d: number;
  readonly w: Float64Array;
  readonly dw: Float64Array;

  constructor(n: number, d: number) {
    this.n = n;
    this.d = d;
    this.w = new Float64Array(n * d);
    this.dw = new Float64Array(n * d);
  }

  static from(n: number, d: number, values: ArrayLike<number>): Mat {
    const m = new Mat(n, d);
    if (values.length !== n * d) {
      throw new Error(`expected ${n * d} values, got ${values.length}`);
    }
    m.w.set(values);
    return m;
  }

  get(row: number, col: number): number {
    return this.w[row * this.d + col];
  }
}

/** mulberry32: tiny deterministic PRNG, good enough for init and dropout. */
export class Rng {
  private state: number;

  constructor(seed: number) {
    this.state = seed >>> 0;
  }

  next(): number {
    this.state = (this.state + 0x6d2b79f5) >>> 0;
    let t = this.state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  }

  uniform(lo: number, hi: number): number {
    return lo + (hi - lo) * this.next();
  }

  int(n: number): number {
    return Math.floor(this.next() * n);
  }

  shuffle<T>(items: T[]): void {
    for (let i = items.length - 1; i > 0; i--) {
      const j = this.int(i + 1);
      [items[i], items[j]] = [items[j], items[i]];
    }
  }
}

export function randMat(n: number, d: number, scale: number, rng: Rng): Mat {
  const m = new Mat(n, d);
  for (let i = 0; i < m.w.length; i++) m.w[i] = rng.uniform(-scale, scale);
  return m;
}

function sameShape(a: Mat, b: Mat, op: string): void {
  if (a.n !== b.n || a.d !== b.d) {
    throw new Error(`${op}: shape mismatch ${a.n}x${a.d} vs ${b.n}x${b.d}`);
  }
}

/**
 * c (n x d) += a (n x m) * b (m x d), all row-major. Eight-row blocks over
 * the inner dimension keep the scalar floating-point pipeline busy; this
 * kernel is where training spends nearly all its time.
 */
function gemmAcc(
  c: Float64Array,
  a: Float64Array,
  b: Float64Array,
  n: number,
  m: number,
  d: number,
): void {
  for (let i = 0; i < n; i++) {
    const ar = i * m;
    const cr = i * d;
    let k = 0;
    for (; k + 7 < m; k += 8) {
      const a0 = a[ar + k];
      const a1 = a[ar + k + 1];
      const a2 = a[ar + k + 2];
      const a3 = a[ar + k + 3];
      const a4 = a[ar + k + 4];
      const a5 = a[ar + k + 5];
      const a6 = a[ar + k + 6];
      const a7 = a[ar + k + 7];
      const b0 = k * d;
      const b1 = b0 + d;
      const b2 = b1 + d;
      const b3 = b2 + d;
      const b4 = b3 + d;
      const b5 = b4 + d;
      const b6 = b5 + d;
      const b7 = b6 + d;
      for (let j = 0; j < d; j++) {
        c[cr + j] +=
          (a0 * b[b0 + j] + a1 * b[b1 + j] + (a2 * b[b2 + j] + a3 * b[b3 + j])) +
          (a4 * b[b4 + j] + a5 * b[b5 + j] + (a6 * b[b6 + j] + a7 * b[b7 + j]));
      }
    }
    for (; k < m; k++) {
      const av = a[ar + k];
      if (av === 0) continue;
      const br = k * d;
      for (let j = 0; j < d; j++) c[cr + j] += av * b[br + j];
    }
  }
}

// scratch for the transposes in mul's backward pass; grown on demand and
// only ever used within a single backward closure, so sharing is safe
let scratch = new Float64Array(0);
function transposed(src: Float64Array, n: number, d: number): Float64Array {
  if (scratch.length < n * d) scratch = new Float64Array(n * d);
  const dst = scratch;
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < d; j++) dst[j * n + i] = src[i * d + j];
  }
  return dst;
}

function columnVector(m: Mat, op: string): void {
  if (m.d !== 1) throw new Error(`${op}: expected a column vector, got ${m.n}x${m.d}`);
}

export class Graph {
  readonly training: boolean;
  private backprop: Array<() => void> = [];

  constructor(training = true) {
    this.training = training;
  }

  private record(fn: () => void): void {
    if (this.training) this.backprop.push(fn);
  }

  backward(): void {
    for (let i = this.backprop.length - 1; i >= 0; i--) this.backprop[i]();
    this.backprop = [];
  }

  /** Row ix of m as a column vector; the embedding lookup. */
  rowPluck(m: Mat, ix: number): Mat {
    const out = new Mat(m.d, 1);
    for (let i = 0; i < m.d; i++) out.w[i] = m.w[ix * m.d + i];
    this.record(() => {
      for (let i = 0; i < m.d; i++) m.dw[ix * m.d + i] += out.dw[i];
    });
    return out;
  }

  mul(a: Mat, b: Mat): Mat {
    if (a.d !== b.n) throw new Error(`mul: inner dims differ, ${a.n}x${a.d} * ${b.n}x${b.d}`);
    const n = a.n;
    const m = a.d;
    const d = b.d;
    const out = new Mat(n, d);
    gemmAcc(out.w, a.w, b.w, n, m, d);
    this.record(() => {
      // dA += dOut * B^T and dB += A^T * dOut, via the same kernel
      gemmAcc(a.dw, out.dw, transposed(b.w, m, d), n, d, m);
      gemmAcc(b.dw, transposed(a.w, n, m), out.dw, m, n, d);
    });
    return out;
  }

  add(a: Mat, b: Mat): Mat {
    sameShape(a, b, 'add');
    const out = new Mat(a.n, a.d);
    for (let i = 0; i < a.w.length; i++) out.w[i] = a.w[i] + b.w[i];
    this.record(() => {
      for (let i = 0; i < a.w.length; i++) {
        a.dw[i] += out.dw[i];
        b.dw[i] += out.dw[i];
      }
    });
    return out;
  }

  eltmul(a: Mat, b: Mat): Mat {
    sameShape(a, b, 'eltmul');
    const out = new Mat(a.n, a.d);
    for (let i = 0; i < a.w.length; i++) out.w[i] = a.w[i] * b.w[i];
    this.record(() => {
      for (let i = 0; i < a.w.length; i++) {
        a.dw[i] += b.w[i] * out.dw[i];
        b.dw[i] += a.w[i] * out.dw[i];
      }
    });
    return out;
  }

  sigmoid(a: Mat): Mat {
    const out = new Mat(a.n, a.d);
    for (let i = 0; i < a.w.length; i++) out.w[i] = 1 / (1 + Math.exp(-a.w[i]));
    this.record(() => {
      for (let i = 0; i < a.w.length; i++) {
        a.dw[i] += out.w[i] * (1 - out.w[i]) * out.dw[i];
      }
    });
    return out;
  }

  tanh(a: Mat): Mat {
    const out = new Mat(a.n, a.d);
    for (let i = 0; i < a.w.length; i++) out.w[i] = Math.tanh(a.w[i]);
    this.record(() => {
      for (let i = 0; i < a.w.length; i++) {
        a.dw[i] += (1 - out.w[i] * out.w[i]) * out.dw[i];
      }
    });
    return out;
  }

  /** Stack a on top of b; column counts must match. */
  concat(a: Mat, b: Mat): Mat {
    if (a.d !== b.d) throw new Error(`concat: column counts differ, ${a.d} vs ${b.d}`);
    const out = new Mat(a.n + b.n, a.d);
    out.w.set(a.w, 0);
    out.w.set(b.w, a.n * a.d);
    this.record(() => {
      const split = a.n * a.d;
      for (let i = 0; i < a.w.length; i++) a.dw[i] += out.dw[i];
      for (let i = 0; i < b.w.length; i++) b.dw[i] += out.dw[split + i];
    });
    return out;
  }

  /** Stack k single-row mats into a k x d matrix. */
  stack(rows: Mat[]): Mat {
    const d = rows[0].d;
    const out = new Mat(rows.length, d);
    rows.forEach((r, i) => {
      if (r.n !== 1 || r.d !== d) {
        throw new Error(`stack: expected 1x${d} rows, got ${r.n}x${r.d}`);
      }
      out.w.set(r.w, i * d);
    });
    this.record(() => {
      rows.forEach((r, i) => {
        for (let j = 0; j < d; j++) r.dw[j] += out.dw[i * d + j];
      });
    });
    return out;
  }

  /** Columnwise inner product, as a 1 x d mat (1x1 for column vectors). */
  dot(a: Mat, b: Mat): Mat {
    sameShape(a, b, 'dot');
    const out = new Mat(1, a.d);
    for (let i = 0; i < a.n; i++) {
      for (let j = 0; j < a.d; j++) out.w[j] += a.w[i * a.d + j] * b.w[i * a.d + j];
    }
    this.record(() => {
      for (let i = 0; i < a.n; i++) {
        for (let j = 0; j < a.d; j++) {
          const grad = out.dw[j];
          a.dw[i * a.d + j] += b.w[i * a.d + j] * grad;
          b.dw[i * a.d + j] += a.w[i * a.d + j] * grad;
        }
      }
    });
    return out;
  }

  /** Multiply every entry of a by the 1x1 scalar s. */
  scale(a: Mat, s: Mat): Mat {
    if (s.n !== 1 || s.d !== 1) throw new Error('scale: scalar must be 1x1');
    const out = new Mat(a.n, a.d);
    for (let i = 0; i < a.w.length; i++) out.w[i] = a.w[i] * s.w[0];
    this.record(() => {
      for (let i = 0; i < a.w.length; i++) {
        a.dw[i] += s.w[0] * out.dw[i];
        s.dw[0] += a.w[i] * out.dw[i];
      }
    });
    return out;
  }

  /**
   * Columnwise weighted sum: out[:,b] = sum_k alpha[k,b] * vs[k][:,b].
   * alpha is k x d; each vs[k] is n x d.
   */
  weightedSum(alpha: Mat, vs: Mat[]): Mat {
    if (alpha.n !== vs.length) {
      throw new Error(`weightedSum: ${alpha.n} weights for ${vs.length} vectors`);
    }
    const d = alpha.d;
    const out = new Mat(vs[0].n, d);
    vs.forEach((v, k) => {
      if (v.n !== out.n || v.d !== d) {
        throw new Error(`weightedSum: expected ${out.n}x${d} states, got ${v.n}x${v.d}`);
      }
      for (let i = 0; i < v.n; i++) {
        for (let b = 0; b < d; b++) out.w[i * d + b] += alpha.w[k * d + b] * v.w[i * d + b];
      }
    });
    this.record(() => {
      vs.forEach((v, k) => {
        for (let b = 0; b < d; b++) {
          let acc = 0;
          for (let i = 0; i < v.n; i++) {
            acc += v.w[i * d + b] * out.dw[i * d + b];
            v.dw[i * d + b] += alpha.w[k * d + b] * out.dw[i * d + b];
          }
          alpha.dw[k * d + b] += acc;
        }
      });
    });
    return out;
  }

  softmax(a: Mat): Mat {
    columnVector(a, 'softmax');
    const out = new Mat(a.n, 1);
    softmaxInto(a.w, out.w);
    this.record(() => {
      // dL/dx_i = y_i * (dL/dy_i - sum_j dL/dy_j * y_j)
      let inner = 0;
      for (let j = 0; j < a.n; j++) inner += out.dw[j] * out.w[j];
      for (let i = 0; i < a.n; i++) a.dw[i] += out.w[i] * (out.dw[i] - inner);
    });
    return out;
  }

  /** Inverted dropout; the identity outside training. */
  dropout(a: Mat, rate: number, rng: Rng): Mat {
    if (!this.training || rate === 0) return a;
    const keep = 1 - rate;
    const mask = new Float64Array(a.w.length);
    const out = new Mat(a.n, a.d);
    for (let i = 0; i < a.w.length; i++) {
      mask[i] = rng.next() < rate ? 0 : 1 / keep;
      out.w[i] = a.w[i] * mask[i];
    }
    this.record(() => {
      for (let i = 0; i < a.w.length; i++) a.dw[i] += mask[i] * out.dw[i];
    });
    return out;
  }

  /** Batched embedding lookup: column b of the result is row ids[b] of m. */
  gatherCols(m: Mat, ids: ArrayLike<number>): Mat {
    const B = ids.length;
    const out = new Mat(m.d, B);
    for (let b = 0; b < B; b++) {
      const row = ids[b] * m.d;
      for (let i = 0; i < m.d; i++) out.w[i * B + b] = m.w[row + i];
    }
    this.record(() => {
      for (let b = 0; b < B; b++) {
        const row = ids[b] * m.d;
        for (let i = 0; i < m.d; i++) m.dw[row + i] += out.dw[i * B + b];
      }
    });
    return out;
  }

  /** Add the column vector v to every column of a. */
  addCol(a: Mat, v: Mat): Mat {
    if (v.d !== 1 || v.n !== a.n) {
      throw new Error(`addCol: expected ${a.n}x1 bias, got ${v.n}x${v.d}`);
    }
    const out = new Mat(a.n, a.d);
    for (let i = 0; i < a.n; i++) {
      const vi = v.w[i];
      for (let b = 0; b < a.d; b++) out.w[i * a.d + b] = a.w[i * a.d + b] + vi;
    }
    this.record(() => {
      for (let i = 0; i < a.n; i++) {
        let acc = 0;
        for (let b = 0; b < a.d; b++) {
          const grad = out.dw[i * a.d + b];
          a.dw[i * a.d + b] += grad;
          acc += grad;
        }
        v.dw[i] += acc;
      }
    });
    return out;
  }

  /** Zero out the columns whose mask entry is 0; gradients follow the mask. */
  maskCols(a: Mat, mask: Uint8Array): Mat {
    if (mask.length !== a.d) {
      throw new Error(`maskCols: ${mask.length} mask entries for ${a.d} columns`);
    }
    const out = new Mat(a.n, a.d);
    for (let i = 0; i < a.n; i++) {
      for (let b = 0; b < a.d; b++) {
        if (mask[b]) out.w[i * a.d + b] = a.w[i * a.d + b];
      }
    }
    this.record(() => {
      for (let i = 0; i < a.n; i++) {
        for (let b = 0; b < a.d; b++) {
          if (mask[b]) a.dw[i * a.d + b] += out.dw[i * a.d + b];
        }
      }
    });
    return out;
  }

  /**
   * Columnwise softmax with an optional validity mask laid out like the
   * matrix (1 = valid). Masked entries score 0; every column needs at least
   * one valid entry.
   */
  softmaxCols(a: Mat, mask: Uint8Array | null = null): Mat {
    if (mask !== null && mask.length !== a.w.length) {
      throw new Error(`softmaxCols: mask length ${mask.length} != ${a.w.length}`);
    }
    const { n, d } = a;
    const out = new Mat(n, d);
    for (let b = 0; b < d; b++) {
      let max = -Infinity;
      for (let i = 0; i < n; i++) {
        if ((mask === null || mask[i * d + b]) && a.w[i * d + b] > max) max = a.w[i * d + b];
      }
      if (max === -Infinity) throw new Error(`softmaxCols: column ${b} fully masked`);
      let sum = 0;
      for (let i = 0; i < n; i++) {
        if (mask === null || mask[i * d + b]) {
          const e = Math.exp(a.w[i * d + b] - max);
          out.w[i * d + b] = e;
          sum += e;
        }
      }
      for (let i = 0; i < n; i++) out.w[i * d + b] /= sum;
    }
    this.record(() => {
      for (let b = 0; b < d; b++) {
        let inner = 0;
        for (let j = 0; j < n; j++) inner += out.dw[j * d + b] * out.w[j * d + b];
        for (let i = 0; i < n; i++) {
          if (mask === null || mask[i * d + b]) {
            a.dw[i * d + b] += out.w[i * d + b] * (out.dw[i * d + b] - inner);
          }
        }
      }
    });
    return out;
  }
}

function softmaxInto(src: Float64Array, dst: Float64Array): void {
  let max = -Infinity;
  for (let i = 0; i < src.length; i++) if (src[i] > max) max = src[i];
  let sum = 0;
  for (let i = 0; i < src.length; i++) {
    dst[i] = Math.exp(src[i] - max);
    sum += dst[i];
  }
  for (let i = 0; i < src.length; i++) dst[i] /= sum;
}

/** Softmax probabilities without touching the graph; used by greedy decode. */
export function softmaxProbs(m: Mat): Float64Array {
  const probs = new Float64Array(m.w.length);
  softmaxInto(m.w, probs);
  return probs;
}

/**
 * Cross-entropy against one target class. Returns the loss and seeds the
 * logits gradient with the usual fused softmax shortcut, so callers skip a
 * separate softmax node.
 */
export function softmaxCrossEntropy(g: Graph, logits: Mat, target: number): number {
  columnVector(logits, 'softmaxCrossEntropy');
  const probs = softmaxProbs(logits);
  const loss = -Math.log(Math.max(probs[target], 1e-12));
  if (g.training) {
    for (let i = 0; i < logits.dw.length; i++) logits.dw[i] += probs[i];
    logits.dw[target] -= 1;
  }
  return loss;
}

/**
 * Columnwise fused cross-entropy over a V x B logits matrix. Column b is
 * scored against targets[b]; columns with mask 0 contribute no loss and no
 * gradient. Returns the summed loss over the unmasked columns.
 */
export function softmaxCrossEntropyCols(
  g: Graph,
  logits: Mat,
  targets: ArrayLike<number>,
  mask: ArrayLike<number> | null = null,
): number {
  const { n, d } = logits;
  if (targets.length !== d) {
    throw new Error(`softmaxCrossEntropyCols: ${targets.length} targets for ${d} columns`);
  }
  let loss = 0;
  const col = new Float64Array(n);
  for (let b = 0; b < d; b++) {
    if (mask !== null && !mask[b]) continue;
    let max = -Infinity;
    for (let i = 0; i < n; i++) if (logits.w[i * d + b] > max) max = logits.w[i * d + b];
    let sum = 0;
    for (let i = 0; i < n; i++) {
      col[i] = Math.exp(logits.w[i * d + b] - max);
      sum += col[i];
    }
    loss -= Math.log(Math.max(col[targets[b]] / sum, 1e-12));
    if (g.training) {
      for (let i = 0; i < n; i++) logits.dw[i * d + b] += col[i] / sum;
      logits.dw[targets[b] * d + b] -= 1;
    }
  }
  return loss;
}
