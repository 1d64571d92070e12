import assert from "node:assert/strict";
import * as fs from "node:fs";
import * as path from "node:path";
import { test } from "node:test";

import { format6 } from "../src/format";
import { numEdits, ter } from "../src/ter";
import { tokenizeTercom } from "../src/tokenizer";

interface TerCase {
  hyp: string;
  ref: string;
  lowercase: boolean;
  keep_punct: boolean;
  tuple: [number, number, number, number, number];
  score6: string;
}

const fixturePath = path.join(__dirname, "..", "..", "..", "conformance", "ter_cases.json");
const cases: TerCase[] = JSON.parse(fs.readFileSync(fixturePath, "utf-8"));

test("every shared scoring case matches integer-exactly", () => {
  for (const [i, c] of cases.entries()) {
    const hyp = tokenizeTercom(c.hyp, c.lowercase, c.keep_punct);
    const ref = tokenizeTercom(c.ref, c.lowercase, c.keep_punct);
    const got = ter(hyp, ref);
    const tuple = [got.insertions, got.deletions, got.substitutions, got.shifts, got.refLen];
    assert.deepEqual(tuple, c.tuple, `case ${i}: ${JSON.stringify([c.hyp, c.ref])}`);
    assert.equal(format6(numEdits(got) / got.refLen), c.score6, `case ${i} score`);
  }
});

test("fixed cases", () => {
  assert.equal(numEdits(ter(["a", "b", "c"], ["a", "b", "c"])), 0);
  const empty = ter([], ["a", "b"]);
  assert.equal(empty.insertions, 2);
  assert.equal(numEdits(empty), 2);
  const swap = ter(["c", "d", "a", "b"], ["a", "b", "c", "d"]);
  assert.equal(swap.shifts, 1);
  assert.equal(numEdits(swap), 1);
  const chained = ter(["d", "d", "a", "b"], ["b", "a", "d", "d"]);
  assert.equal(numEdits(chained), 2);
  assert.equal(chained.shifts, 2);
});

test("empty reference throws", () => {
  assert.throws(() => ter(["a"], []), /empty reference/);
});

test("format6 matches fixed-point expectations", () => {
  assert.equal(format6(0), "0.000000");
  assert.equal(format6(0.25), "0.250000");
  assert.equal(format6(1), "1.000000");
  assert.equal(format6(1 / 3), "0.333333");
  assert.equal(format6(2 / 3), "0.666667");
  // exact binary tie at the seventh digit: round half to even
  assert.equal(format6(1 / 128), "0.007812");
  assert.equal(format6(3 / 128), "0.023438");
});
