/**
 * Corpus-level BLEU-4.
 *
 * Standard recipe: clipped n-gram precision pooled over the whole corpus
 * for n = 1..4, geometric mean, multiplied by the brevity penalty
 * exp(1 - r/c) when the hypothesis corpus is shorter than the reference.
 * Scores are on the 0..100 scale.
 *
 * Orders with no hypothesis n-grams at all (every sentence shorter than n)
 * are dropped from the mean instead of zeroing the score, so two identical
 * corpora score 100 regardless of sentence length. An order that has
 * hypothesis n-grams but no matches still zeroes the score, as usual.
 */
import { readLines, splitTokens } from './data.js';

function ngramCounts(tokens: string[], n: number): Map<string, number> {
  const counts = new Map<string, number>();
  for (let i = 0; i + n <= tokens.length; i++) {
    const gram = tokens.slice(i, i + n).join(' ');
    counts.set(gram, (counts.get(gram) ?? 0) + 1);
  }
  return counts;
}

/**
 * BLEU over tokenized sentence pairs. `hyps[i]` is scored against `refs[i]`.
 * Throws if the two lists differ in length. An empty corpus scores 0.
 */
export function corpusBleu(hyps: string[][], refs: string[][], maxN = 4): number {
  if (hyps.length !== refs.length) {
    throw new Error(`hypothesis/reference count mismatch: ${hyps.length} vs ${refs.length}`);
  }
  if (hyps.length === 0) return 0;

  const clipped = new Array<number>(maxN).fill(0);
  const total = new Array<number>(maxN).fill(0);
  let hypLength = 0;
  let refLength = 0;

  for (let i = 0; i < hyps.length; i++) {
    const hyp = hyps[i];
    const ref = refs[i];
    hypLength += hyp.length;
    refLength += ref.length;
    for (let n = 1; n <= maxN; n++) {
      const hypGrams = ngramCounts(hyp, n);
      const refGrams = ngramCounts(ref, n);
      for (const [gram, count] of hypGrams) {
        clipped[n - 1] += Math.min(count, refGrams.get(gram) ?? 0);
        total[n - 1] += count;
      }
    }
  }

  if (hypLength === 0) return 0;

  let logSum = 0;
  let orders = 0;
  for (let n = 0; n < maxN; n++) {
    if (total[n] === 0) continue; // corpus too short for this order
    if (clipped[n] === 0) return 0;
    logSum += Math.log(clipped[n] / total[n]);
    orders++;
  }
  if (orders === 0) return 0;

  const brevity = hypLength >= refLength ? 1 : Math.exp(1 - refLength / hypLength);
  return 100 * brevity * Math.exp(logSum / orders);
}

/** BLEU between two line-aligned files of space-separated symbols. */
export function bleuFiles(hypPath: string, refPath: string): number {
  const hyps = readLines(hypPath).map(splitTokens);
  const refs = readLines(refPath).map(splitTokens);
  return corpusBleu(hyps, refs);
}

