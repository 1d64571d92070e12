/**
 * Batch scoring over the shared pair-file contract.
 *
 * Input: one hyp<TAB>ref pair per line.  Output line i scores input line i:
 * ins<TAB>del<TAB>sub<TAB>shft<TAB>ref_len<TAB>score with six decimals.
 *
 * Lines are scored in fixed-size chunks, in parallel on worker threads when
 * workers > 1; a reorder buffer keyed by chunk index restores input order,
 * so the output is byte-identical for any worker count.  The output file is
 * written to a temp path and renamed on success; any failure (including a
 * malformed line, reported with its line number) leaves no partial output.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { Worker } from "node:worker_threads";

import { format6 } from "./format";
import { numEdits, ter, TerCounts } from "./ter";
import { tokenizeTercom } from "./tokenizer";

export const CHUNK_LINES = 256;

export interface BatchJob {
  input: string;
  output: string;
  workers: number;
  lowercase: boolean;
  keepPunct: boolean;
}

export interface BatchSummary {
  pairs: number;
  totalEdits: number;
  totalRefLen: number;
  seconds: number;
  corpusTer: number;
}

export function scoreLine(
  line: string,
  lineno: number,
  lowercase: boolean,
  keepPunct: boolean,
): TerCounts {
  const fields = line.split("\t");
  if (fields.length !== 2) {
    throw new Error(
      `malformed line ${lineno}: expected hyp<TAB>ref, got ${fields.length} fields`,
    );
  }
  const hyp = tokenizeTercom(fields[0], lowercase, keepPunct);
  const ref = tokenizeTercom(fields[1], lowercase, keepPunct);
  if (ref.length === 0) {
    throw new Error(`malformed line ${lineno}: reference tokenizes to nothing`);
  }
  return ter(hyp, ref);
}

export function formatCounts(c: TerCounts): string {
  const edits = numEdits(c);
  return [
    c.insertions,
    c.deletions,
    c.substitutions,
    c.shifts,
    c.refLen,
    format6(edits / c.refLen),
  ].join("\t");
}

export function scoreChunk(
  lines: string[],
  startLineno: number,
  lowercase: boolean,
  keepPunct: boolean,
): { out: string[]; edits: number; refLen: number } {
  const out: string[] = [];
  let edits = 0;
  let refLen = 0;
  lines.forEach((line, k) => {
    const counts = scoreLine(line, startLineno + k, lowercase, keepPunct);
    out.push(formatCounts(counts));
    edits += numEdits(counts);
    refLen += counts.refLen;
  });
  return { out, edits, refLen };
}

function readLines(inputPath: string): string[] {
  const raw = fs.readFileSync(inputPath, "utf-8");
  if (raw === "") return [];
  const lines = raw.split("\n");
  if (lines[lines.length - 1] === "") lines.pop();
  return lines;
}

interface ChunkResult {
  out: string[];
  edits: number;
  refLen: number;
}

async function scoreParallel(
  lines: string[],
  job: BatchJob,
): Promise<ChunkResult[]> {
  const chunks: { index: number; start: number; lines: string[] }[] = [];
  for (let start = 0; start < lines.length; start += CHUNK_LINES) {
    chunks.push({
      index: chunks.length,
      start,
      lines: lines.slice(start, start + CHUNK_LINES),
    });
  }
  if (chunks.length === 0) return [];

  const results: ChunkResult[] = new Array(chunks.length);
  const workerPath = path.join(__dirname, "worker.js");
  const poolSize = Math.min(job.workers, chunks.length);
  const pool = Array.from({ length: poolSize }, () => new Worker(workerPath));
  let nextChunk = 0;
  let pending = 0;
  let failure: Error | null = null;

  try {
    await new Promise<void>((resolve) => {
      const feed = (worker: Worker) => {
        if (failure !== null || nextChunk >= chunks.length) {
          if (pending === 0) resolve();
          return;
        }
        const chunk = chunks[nextChunk++];
        pending += 1;
        worker.postMessage({
          index: chunk.index,
          lines: chunk.lines,
          startLineno: chunk.start + 1,
          lowercase: job.lowercase,
          keepPunct: job.keepPunct,
        });
      };
      for (const worker of pool) {
        worker.on(
          "message",
          (msg: { index: number; result?: ChunkResult; error?: string }) => {
            pending -= 1;
            if (msg.error) {
              failure = failure ?? new Error(msg.error);
            } else if (msg.result) {
              results[msg.index] = msg.result;
            }
            feed(worker);
          },
        );
        worker.on("error", (err) => {
          pending -= 1;
          failure = failure ?? err;
          if (pending === 0) resolve();
        });
        feed(worker);
      }
    });
  } finally {
    await Promise.all(pool.map((w) => w.terminate()));
  }

  if (failure !== null) throw failure;
  return results;
}

export async function runBatch(job: BatchJob): Promise<BatchSummary> {
  if (job.workers < 1) {
    throw new Error(`worker count must be >= 1, got ${job.workers}`);
  }
  if (!fs.existsSync(job.input)) {
    throw new Error(`input file not found: ${job.input}`);
  }
  const started = process.hrtime.bigint();
  const lines = readLines(job.input);
  const tmpPath = `${job.output}.tmp`;
  let summaryEdits = 0;
  let summaryRefLen = 0;
  try {
    let parts: ChunkResult[];
    if (job.workers === 1 || lines.length <= CHUNK_LINES) {
      parts = [];
      for (let start = 0; start < lines.length; start += CHUNK_LINES) {
        parts.push(
          scoreChunk(
            lines.slice(start, start + CHUNK_LINES),
            start + 1,
            job.lowercase,
            job.keepPunct,
          ),
        );
      }
    } else {
      parts = await scoreParallel(lines, job);
    }
    const pieces: string[] = [];
    for (const part of parts) {
      pieces.push(...part.out);
      summaryEdits += part.edits;
      summaryRefLen += part.refLen;
    }
    fs.writeFileSync(tmpPath, pieces.length ? pieces.join("\n") + "\n" : "");
    fs.renameSync(tmpPath, job.output);
  } catch (err) {
    fs.rmSync(tmpPath, { force: true });
    throw err;
  }
  const seconds = Number(process.hrtime.bigint() - started) / 1e9;
  return {
    pairs: lines.length,
    totalEdits: summaryEdits,
    totalRefLen: summaryRefLen,
    seconds,
    corpusTer: summaryRefLen > 0 ? summaryEdits / summaryRefLen : 0,
  };
}
