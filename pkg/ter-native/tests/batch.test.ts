import assert from "node:assert/strict";
import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { test } from "node:test";

import { runBatch } from "../src/batch";

interface TerCase {
  hyp: string;
  ref: string;
  lowercase: boolean;
  keep_punct: boolean;
  tuple: [number, number, number, number, number];
  score6: string;
}

const fixturePath = path.join(__dirname, "..", "..", "..", "conformance", "ter_cases.json");
const allCases: TerCase[] = JSON.parse(fs.readFileSync(fixturePath, "utf-8"));
// the pair-file contract scores with one flag setting per file
const cases = allCases.filter((c) => c.lowercase && c.keep_punct);

function tmpDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "ter-native-test-"));
}

function writePairs(dir: string, pairs: [string, string][]): string {
  const input = path.join(dir, "pairs.tsv");
  fs.writeFileSync(input, pairs.map(([h, r]) => `${h}\t${r}`).join("\n") + "\n");
  return input;
}

test("batch output matches fixture tuples and scores", async () => {
  const dir = tmpDir();
  const input = writePairs(dir, cases.map((c) => [c.hyp, c.ref]));
  const output = path.join(dir, "scores.tsv");
  const summary = await runBatch({
    input, output, workers: 1, lowercase: true, keepPunct: true,
  });
  assert.equal(summary.pairs, cases.length);
  const lines = fs.readFileSync(output, "utf-8").trimEnd().split("\n");
  assert.equal(lines.length, cases.length);
  lines.forEach((line, i) => {
    const want = [...cases[i].tuple, cases[i].score6].join("\t");
    assert.equal(line, want, `line ${i + 1}`);
  });
});

test("output independent of worker count", async () => {
  const dir = tmpDir();
  // enough lines to span several chunks
  const pairs: [string, string][] = [];
  for (let k = 0; k < 5; k++) {
    for (const c of cases) pairs.push([c.hyp, c.ref]);
  }
  const input = writePairs(dir, pairs);
  const outputs: string[] = [];
  for (const workers of [1, 4, 8]) {
    const output = path.join(dir, `scores-${workers}.tsv`);
    await runBatch({ input, output, workers, lowercase: true, keepPunct: true });
    outputs.push(fs.readFileSync(output, "utf-8"));
  }
  assert.equal(outputs[0], outputs[1]);
  assert.equal(outputs[0], outputs[2]);
});

test("identity pair formats per the contract", async () => {
  const dir = tmpDir();
  const input = writePairs(dir, [["a b", "a b"]]);
  const output = path.join(dir, "scores.tsv");
  await runBatch({ input, output, workers: 1, lowercase: true, keepPunct: true });
  assert.equal(fs.readFileSync(output, "utf-8"), "0\t0\t0\t0\t2\t0.000000\n");
});

test("empty input gives empty output and zero pairs", async () => {
  const dir = tmpDir();
  const input = path.join(dir, "pairs.tsv");
  fs.writeFileSync(input, "");
  const output = path.join(dir, "scores.tsv");
  const summary = await runBatch({
    input, output, workers: 1, lowercase: true, keepPunct: true,
  });
  assert.equal(summary.pairs, 0);
  assert.equal(fs.readFileSync(output, "utf-8"), "");
});

test("malformed line reports its number and leaves no output", async () => {
  const dir = tmpDir();
  const input = path.join(dir, "pairs.tsv");
  fs.writeFileSync(input, "good\tpair\nbroken line\n");
  const output = path.join(dir, "scores.tsv");
  await assert.rejects(
    runBatch({ input, output, workers: 1, lowercase: true, keepPunct: true }),
    /malformed line 2/,
  );
  assert.ok(!fs.existsSync(output));
  assert.ok(!fs.existsSync(`${output}.tmp`));
});

test("malformed line under parallel workers also cleans up", async () => {
  const dir = tmpDir();
  const pairs: [string, string][] = [];
  for (let k = 0; k < 4; k++) {
    for (const c of cases) pairs.push([c.hyp, c.ref]);
  }
  const input = path.join(dir, "pairs.tsv");
  const body = pairs.map(([h, r]) => `${h}\t${r}`).join("\n");
  fs.writeFileSync(input, body + "\nno tab here\n");
  const output = path.join(dir, "scores.tsv");
  await assert.rejects(
    runBatch({ input, output, workers: 4, lowercase: true, keepPunct: true }),
    /malformed line/,
  );
  assert.ok(!fs.existsSync(output));
  assert.ok(!fs.existsSync(`${output}.tmp`));
});

test("cli end to end", () => {
  const dir = tmpDir();
  const input = writePairs(dir, [
    ["day good", "good day"],
    ["a b c", "a b c"],
  ]);
  const output = path.join(dir, "scores.tsv");
  const cliPath = path.join(__dirname, "..", "src", "cli.js");
  const proc = spawnSync("node", [cliPath, "--input", input, "--output", output,
                                  "--workers", "2"], { encoding: "utf-8" });
  assert.equal(proc.status, 0, proc.stderr);
  assert.match(proc.stdout, /scored 2 pairs/);
  const lines = fs.readFileSync(output, "utf-8").trimEnd().split("\n");
  assert.equal(lines[0], "0\t0\t0\t1\t2\t0.500000");
  assert.equal(lines[1], "0\t0\t0\t0\t3\t0.000000");
});

test("cli rejects unknown flags with exit 1", () => {
  const cliPath = path.join(__dirname, "..", "src", "cli.js");
  const proc = spawnSync("node", [cliPath, "--bogus"], { encoding: "utf-8" });
  assert.equal(proc.status, 1);
  assert.match(proc.stderr, /unknown argument/);
});

test("cli reports malformed input with exit 1", () => {
  const dir = tmpDir();
  const input = path.join(dir, "pairs.tsv");
  fs.writeFileSync(input, "no tab\n");
  const cliPath = path.join(__dirname, "..", "src", "cli.js");
  const proc = spawnSync(
    "node",
    [cliPath, "--input", input, "--output", path.join(dir, "o.tsv")],
    { encoding: "utf-8" },
  );
  assert.equal(proc.status, 1);
  assert.match(proc.stderr, /malformed line 1/);
});
