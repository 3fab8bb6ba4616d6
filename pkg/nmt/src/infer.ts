/**
 * File-based inference: node dist/infer.js <model-dir> <in-file> <out-file>
 *
 * Reads one renamed sentence per line and writes exactly one translated line
 * per input line, which is the contract the translator's extern backend
 * checks. Symbols outside the model vocabulary become `_unk`; blank lines
 * stay blank.
 */
import fs from 'fs';
import { readLines, splitTokens } from './data.js';
import { loadModel } from './train.js';

function main(): void {
  const [modelDir, inFile, outFile] = process.argv.slice(2);
  if (!modelDir || !inFile || !outFile) {
    console.error('usage: node infer.js <model-dir> <in-file> <out-file>');
    process.exit(1);
  }

  const model = loadModel(modelDir);
  const lines = readLines(inFile);
  const translated = lines.map(line => model.translate(splitTokens(line)).join(' '));
  fs.writeFileSync(outFile, translated.length > 0 ? translated.join('\n') + '\n' : '');
}

try {
  main();
} catch (err) {
  console.error(err instanceof Error ? err.message : err);
  process.exit(1);
}
