import { describe, expect, it } from 'vitest';
import { corpusBleu } from '../src/bleu.js';
import { Dataset, ParallelPair } from '../src/data.js';
import { Graph, Rng } from '../src/matrix.js';
import { NmtConfig, Seq2seqModel, defaultConfig, validateConfig } from '../src/model.js';
import { trainModel } from '../src/train.js';
import { UNK, Vocab } from '../src/vocab.js';

function copyDataset(lines: string[]): Dataset {
  const pairs: ParallelPair[] = lines.map(l => ({ source: l.split(' '), target: l.split(' ') }));
  const vocab = Vocab.fromSymbols([...new Set(lines.flatMap(l => l.split(' ')))].sort());
  return { train: pairs, dev: pairs, test: pairs, sourceVocab: vocab, targetVocab: vocab };
}

const COPY_LINES = [
  'alpha ( x ) ;',
  'beta ( x , y ) ;',
  'gamma = x + y ;',
  'delta ( ) ;',
  'x = alpha ;',
  'y = beta ( x ) ;',
  'omega ( y , x ) ;',
  'x + + ;',
  'return x ;',
  'kappa ( x , x , y ) ;',
];

// small and dropout-free so the overfit finishes in seconds
const copyConfig: NmtConfig = {
  ...defaultConfig,
  dropout: 0,
  learningRate: 0.02,
  hiddenDim: 32,
  embeddingDim: 16,
  batchSize: 2,
  numLayers: 1,
};

describe('validateConfig', () => {
  it('accepts the defaults', () => {
    expect(() => validateConfig(defaultConfig)).not.toThrow();
  });

  it('rejects out-of-range values', () => {
    expect(() => validateConfig({ ...defaultConfig, batchSize: 0 })).toThrow(RangeError);
    expect(() => validateConfig({ ...defaultConfig, learningRate: -1 })).toThrow(RangeError);
    expect(() => validateConfig({ ...defaultConfig, dropout: 1 })).toThrow(RangeError);
    expect(() => validateConfig({ ...defaultConfig, dropout: -0.1 })).toThrow(RangeError);
    expect(() => validateConfig({ ...defaultConfig, numLayers: 0 })).toThrow(RangeError);
    expect(() => validateConfig({ ...defaultConfig, rnnCell: 'gru' as 'lstm' })).toThrow(RangeError);
  });
});

describe('training', () => {
  it('overfits a 10-pair copy task to BLEU 100', { timeout: 60_000 }, () => {
    const dataset = copyDataset(COPY_LINES);
    const { model, devBleu } = trainModel(dataset, copyConfig, {
      seed: 1,
      epochs: 200,
      evalEvery: 10,
      patience: 15,
      quiet: true,
    });
    expect(devBleu).toBe(100);
    const hyps = dataset.train.map(p => model.translate(p.source));
    expect(corpusBleu(hyps, dataset.train.map(p => p.target))).toBe(100);
    // replayed training sentences come back exactly
    hyps.forEach((hyp, i) => expect(hyp.join(' ')).toBe(COPY_LINES[i]));
  });

  it('is deterministic for a fixed seed', { timeout: 60_000 }, () => {
    const run = () =>
      trainModel(copyDataset(COPY_LINES.slice(0, 4)), copyConfig, {
        seed: 77,
        epochs: 20,
        evalEvery: 20,
        quiet: true,
      });
    const a = JSON.stringify(run().model.serialize());
    const b = JSON.stringify(run().model.serialize());
    expect(a).toBe(b);
  });

  it('differs across seeds', { timeout: 60_000 }, () => {
    const run = (seed: number) =>
      trainModel(copyDataset(COPY_LINES.slice(0, 4)), copyConfig, {
        seed,
        epochs: 5,
        evalEvery: 5,
        quiet: true,
      });
    expect(JSON.stringify(run(1).model.serialize())).not.toBe(
      JSON.stringify(run(2).model.serialize()),
    );
  });
});

describe('lossOnBatch', () => {
  // Padding must be invisible: one batched graph over sentences of mixed
  // lengths (3 to 9 tokens here) has to produce the same loss and the same
  // parameter gradients as running each pair alone and summing.
  it('matches per-pair losses and gradients up to float addition order', () => {
    const dataset = copyDataset(COPY_LINES);
    const config: NmtConfig = { ...copyConfig, numLayers: 2 };
    const batchedModel = new Seq2seqModel(config, dataset.sourceVocab, dataset.targetVocab, new Rng(9));
    const pairModel = Seq2seqModel.deserialize(batchedModel.serialize());

    const pairs = dataset.train.map(p => ({
      source: dataset.sourceVocab.encode(p.source),
      target: dataset.targetVocab.encode(p.target),
    }));

    const gBatch = new Graph(true);
    const batched = batchedModel.lossOnBatch(gBatch, pairs, new Rng(1));
    gBatch.backward();

    const rng = new Rng(1);
    let pairLoss = 0;
    let pairTokens = 0;
    for (const pair of pairs) {
      const g = new Graph(true);
      const { loss, tokens } = pairModel.lossOnPair(g, pair.source, pair.target, rng);
      g.backward();
      pairLoss += loss;
      pairTokens += tokens;
    }

    expect(batched.tokens).toBe(pairTokens);
    expect(Math.abs(batched.loss - pairLoss) / pairLoss).toBeLessThan(1e-9);

    let worst = 0;
    let where = '';
    for (const [name, mat] of batchedModel.params) {
      const other = pairModel.params.get(name)!;
      for (let i = 0; i < mat.dw.length; i++) {
        const diff =
          Math.abs(mat.dw[i] - other.dw[i]) /
          Math.max(1, Math.abs(mat.dw[i]), Math.abs(other.dw[i]));
        if (diff > worst) {
          worst = diff;
          where = `${name}[${i}]`;
        }
      }
    }
    expect(worst, where).toBeLessThan(1e-9);
  });

  it('skips empty sources and reports zero loss for an empty batch', () => {
    const dataset = copyDataset(COPY_LINES.slice(0, 2));
    const model = new Seq2seqModel(copyConfig, dataset.sourceVocab, dataset.targetVocab, new Rng(2));
    const empty = model.lossOnBatch(new Graph(true), [], new Rng(1));
    expect(empty).toEqual({ loss: 0, tokens: 0 });
    const blank = model.lossOnBatch(new Graph(true), [{ source: [], target: [1] }], new Rng(1));
    expect(blank).toEqual({ loss: 0, tokens: 0 });
  });
});

describe('Seq2seqModel.translate', () => {
  function freshModel(): Seq2seqModel {
    const vocab = Vocab.fromSymbols(['a', 'b', 'c', ';']);
    return new Seq2seqModel({ ...copyConfig, maxSentenceLength: 8 }, vocab, vocab, new Rng(5));
  }

  it('maps out-of-vocabulary input to the unknown symbol instead of dropping it', () => {
    const model = freshModel();
    // an untrained model still produces a (possibly empty) token list
    expect(() => model.translate(['zzz', 'a', 'qqq'])).not.toThrow();
    const vocab = model.sourceVocab;
    expect(vocab.encode(['zzz', 'a'])).toEqual([vocab.unkId, vocab.idOf('a')]);
    expect(vocab.decode([vocab.unkId])).toEqual([UNK]);
  });

  it('returns an empty sentence for empty input', () => {
    expect(freshModel().translate([])).toEqual([]);
  });

  it('caps output length at maxSentenceLength even on long input', () => {
    const model = freshModel();
    const long = Array.from({ length: 60 }, (_, i) => (i % 2 ? 'a' : 'b'));
    const out = model.translate(long);
    expect(out.length).toBeLessThanOrEqual(8);
  });

  it('round-trips through serialize/deserialize with identical outputs', () => {
    const model = freshModel();
    const again = Seq2seqModel.deserialize(model.serialize());
    expect(again.translate(['a', 'b', ';'])).toEqual(model.translate(['a', 'b', ';']));
    expect(JSON.stringify(again.serialize())).toBe(JSON.stringify(model.serialize()));
  });
});
