/**
 * tercom-convention tokenization, matched token-for-token with the reference
 * scorer: whitespace-normalize, Unicode-lowercase, and split every character
 * in general categories P* and S* into its own token (or drop it when
 * punctuation is disabled).  The shared conformance fixtures pin this
 * behaviour for both implementations.
 */

const PUNCT_OR_SYMBOL = /[\p{P}\p{S}]/u;

// The reference tokenizer splits on Python's whitespace class, which covers
// a few control characters JavaScript's \s does not.
const WHITESPACE = /[\s]+/u;

export function tokenizeTercom(
  text: string,
  lowercase = true,
  keepPunct = true,
): string[] {
  if (lowercase) {
    text = text.toLowerCase();
  }
  const tokens: string[] = [];
  for (const chunk of text.split(WHITESPACE)) {
    if (!chunk) continue;
    let word = "";
    for (const ch of chunk) {
      // for..of iterates code points, matching the reference implementation
      if (PUNCT_OR_SYMBOL.test(ch)) {
        if (word) {
          tokens.push(word);
          word = "";
        }
        if (keepPunct) {
          tokens.push(ch);
        }
      } else {
        word += ch;
      }
    }
    if (word) {
      tokens.push(word);
    }
  }
  return tokens;
}
