/**
 * Corpus BLEU between two line-aligned files:
 *   node dist/evaluate.js <hypothesis-file> <reference-file>
 */
import { bleuFiles } from './bleu.js';

const [hypFile, refFile] = process.argv.slice(2);
if (!hypFile || !refFile) {
  console.error('usage: node evaluate.js <hypothesis-file> <reference-file>');
  process.exit(1);
}

try {
  console.log(`BLEU = ${bleuFiles(hypFile, refFile).toFixed(2)}`);
} catch (err) {
  console.error(err instanceof Error ? err.message : err);
  process.exit(1);
}
