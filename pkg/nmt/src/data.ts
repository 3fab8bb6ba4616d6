/**
 * Readers for the generator's dataset directory:
 *   train.cuda / train.opencl, dev.*, test.*, vocab.cuda / vocab.opencl.
 * Source and target files are line-aligned, one sentence of space-separated
 * symbols per line.
 */
import fs from 'fs';
import path from 'path';
import { Vocab } from './vocab.js';

export function splitTokens(line: string): string[] {
  return line.split(/\s+/).filter(Boolean);
}

export interface ParallelPair {
  source: string[];
  target: string[];
}

export interface Dataset {
  train: ParallelPair[];
  dev: ParallelPair[];
  test: ParallelPair[];
  sourceVocab: Vocab;
  targetVocab: Vocab;
}

export function readLines(filePath: string): string[] {
  const text = fs.readFileSync(filePath, 'utf-8');
  if (text === '') return [];
  return (text.endsWith('\n') ? text.slice(0, -1) : text).split('\n');
}

export function readParallel(sourcePath: string, targetPath: string): ParallelPair[] {
  const sources = readLines(sourcePath);
  const targets = readLines(targetPath);
  if (sources.length !== targets.length) {
    throw new Error(
      `line count mismatch: ${sourcePath} has ${sources.length}, ${targetPath} has ${targets.length}`,
    );
  }
  return sources.map((line, i) => ({
    source: splitTokens(line),
    target: splitTokens(targets[i]),
  }));
}

export function readDataset(dir: string): Dataset {
  const file = (name: string) => path.join(dir, name);
  const train = readParallel(file('train.cuda'), file('train.opencl'));
  if (train.length === 0) {
    throw new Error(`empty dataset: ${file('train.cuda')} has no sentence pairs`);
  }
  return {
    train,
    dev: readParallel(file('dev.cuda'), file('dev.opencl')),
    test: readParallel(file('test.cuda'), file('test.opencl')),
    sourceVocab: Vocab.fromFile(file('vocab.cuda')),
    targetVocab: Vocab.fromFile(file('vocab.opencl')),
  };
}
