import assert from "node:assert/strict";
import * as fs from "node:fs";
import * as path from "node:path";
import { test } from "node:test";

import { tokenizeTercom } from "../src/tokenizer";

interface TokenizerCase {
  text: string;
  lowercase: boolean;
  keep_punct: boolean;
  tokens: string[];
}

const fixturePath = path.join(__dirname, "..", "..", "..", "conformance", "tokenizer_cases.json");
const cases: TokenizerCase[] = JSON.parse(fs.readFileSync(fixturePath, "utf-8"));

test("conformance fixture has enough coverage", () => {
  assert.ok(cases.length >= 200, `only ${cases.length} cases`);
});

test("every shared tokenizer case matches", () => {
  for (const [i, c] of cases.entries()) {
    const got = tokenizeTercom(c.text, c.lowercase, c.keep_punct);
    assert.deepEqual(got, c.tokens, `case ${i}: ${JSON.stringify(c.text)}`);
  }
});

test("basic behaviour", () => {
  assert.deepEqual(tokenizeTercom("Hello, world!"), ["hello", ",", "world", "!"]);
  assert.deepEqual(tokenizeTercom("  a   b "), ["a", "b"]);
  assert.deepEqual(tokenizeTercom(""), []);
  assert.deepEqual(tokenizeTercom("Hello, world!", true, false), ["hello", "world"]);
  assert.deepEqual(tokenizeTercom("ABC", false, true), ["ABC"]);
});
