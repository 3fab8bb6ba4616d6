/**
 * Symbol table shared by training and inference.
 *
 * Data symbols come from the generator's vocab files (one symbol per line,
 * already sorted and de-duplicated). Four specials are prepended; `_unk`
 * absorbs symbols outside the table so a line never loses tokens, and none
 * of the specials collide with the renamer's `_id`/`_op`/`_tp` classes.
 */
import fs from 'fs';

export const PAD = '_pad';
export const SOS = '_sos';
export const EOS = '_eos';
export const UNK = '_unk';

const SPECIALS = [PAD, SOS, EOS, UNK];

export class Vocab {
  readonly symbols: string[];
  private readonly index: Map<string, number>;

  private constructor(symbols: string[]) {
    this.symbols = symbols;
    this.index = new Map(symbols.map((s, i) => [s, i]));
  }

  static fromSymbols(dataSymbols: Iterable<string>): Vocab {
    const symbols = [...SPECIALS];
    const seen = new Set(SPECIALS);
    for (const sym of dataSymbols) {
      if (sym === '' || seen.has(sym)) continue;
      seen.add(sym);
      symbols.push(sym);
    }
    return new Vocab(symbols);
  }

  static fromFile(path: string): Vocab {
    const text = fs.readFileSync(path, 'utf-8');
    return Vocab.fromSymbols(text.split('\n').map(line => line.trim()));
  }

  /** Rebuild from a serialized symbol list that already includes the specials. */
  static fromSerialized(symbols: string[]): Vocab {
    for (let i = 0; i < SPECIALS.length; i++) {
      if (symbols[i] !== SPECIALS[i]) {
        throw new Error(`corrupt vocabulary: expected ${SPECIALS[i]} at index ${i}`);
      }
    }
    return new Vocab([...symbols]);
  }

  get size(): number {
    return this.symbols.length;
  }

  get padId(): number {
    return 0;
  }
  get sosId(): number {
    return 1;
  }
  get eosId(): number {
    return 2;
  }
  get unkId(): number {
    return 3;
  }

  idOf(symbol: string): number {
    return this.index.get(symbol) ?? this.unkId;
  }

  encode(tokens: string[]): number[] {
    return tokens.map(t => this.idOf(t));
  }

  decode(ids: number[]): string[] {
    return ids.map(id => this.symbols[id] ?? UNK);
  }
}
