/**
 * Adam over a named parameter set, with elementwise gradient clipping.
 * Gradients are accumulated into Mat.dw by Graph.backward(); step() consumes
 * and clears them.
 */
import { Mat } from './matrix.js';

export class Adam {
  private readonly m = new Map<string, Float64Array>();
  private readonly v = new Map<string, Float64Array>();
  private t = 0;
  private learningRate: number;

  constructor(
    private readonly params: Map<string, Mat>,
    learningRate: number,
    private readonly beta1 = 0.9,
    private readonly beta2 = 0.999,
    private readonly eps = 1e-8,
    private readonly clip = 5,
  ) {
    this.learningRate = learningRate;
    for (const [name, mat] of params) {
      this.m.set(name, new Float64Array(mat.w.length));
      this.v.set(name, new Float64Array(mat.w.length));
    }
  }

  /** Used by learning-rate schedules; takes effect from the next step. */
  setLearningRate(lr: number): void {
    this.learningRate = lr;
  }

  /** One update from the accumulated gradients, averaged over batchSize. */
  step(batchSize: number): void {
    this.t++;
    const bias1 = 1 - this.beta1 ** this.t;
    const bias2 = 1 - this.beta2 ** this.t;
    for (const [name, mat] of this.params) {
      const m = this.m.get(name)!;
      const v = this.v.get(name)!;
      for (let i = 0; i < mat.w.length; i++) {
        let grad = mat.dw[i] / batchSize;
        if (grad > this.clip) grad = this.clip;
        else if (grad < -this.clip) grad = -this.clip;
        m[i] = this.beta1 * m[i] + (1 - this.beta1) * grad;
        v[i] = this.beta2 * v[i] + (1 - this.beta2) * grad * grad;
        mat.w[i] -= (this.learningRate * (m[i] / bias1)) / (Math.sqrt(v[i] / bias2) + this.eps);
        mat.dw[i] = 0;
      }
    }
  }
}
