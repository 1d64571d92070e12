#!/usr/bin/env node
/**
 * Standalone batch TER scorer.
 *
 * Usage:
 *   ter-native --input pairs.tsv --output scores.tsv [--workers N]
 *              [--no-lowercase] [--no-punct]
 *
 * Exit codes: 0 success, 1 usage or input validation error, 2 unexpected
 * failure.
 */

import { runBatch } from "./batch";

interface CliArgs {
  input: string;
  output: string;
  workers: number;
  lowercase: boolean;
  keepPunct: boolean;
}

function parseArgs(argv: string[]): CliArgs {
  let input: string | null = null;
  let output: string | null = null;
  let workers = 1;
  let lowercase = true;
  let keepPunct = true;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    switch (arg) {
      case "--input":
        input = argv[++i];
        break;
      case "--output":
        output = argv[++i];
        break;
      case "--workers": {
        const raw = argv[++i];
        workers = Number.parseInt(raw ?? "", 10);
        if (!Number.isInteger(workers) || workers < 1) {
          throw new UsageError(`--workers expects a positive integer, got ${raw}`);
        }
        break;
      }
      case "--no-lowercase":
        lowercase = false;
        break;
      case "--no-punct":
        keepPunct = false;
        break;
      case "--help":
      case "-h":
        process.stdout.write(
          "usage: ter-native --input FILE --output FILE [--workers N] " +
            "[--no-lowercase] [--no-punct]\n",
        );
        process.exit(0);
        break;
      default:
        throw new UsageError(`unknown argument ${arg}`);
    }
  }
  if (!input || !output) {
    throw new UsageError("--input and --output are required");
  }
  return { input, output, workers, lowercase, keepPunct };
}

class UsageError extends Error {}

async function main(): Promise<number> {
  let args: CliArgs;
  try {
    args = parseArgs(process.argv.slice(2));
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
  try {
    const summary = await runBatch({
      input: args.input,
      output: args.output,
      workers: args.workers,
      lowercase: args.lowercase,
      keepPunct: args.keepPunct,
    });
    const rate = summary.seconds > 0 ? summary.pairs / summary.seconds : 0;
    process.stdout.write(
      `scored ${summary.pairs} pairs, corpus TER ${summary.corpusTer.toFixed(6)} ` +
        `(${summary.seconds.toFixed(2)}s, ${rate.toFixed(0)} pairs/s, ` +
        `${args.workers} workers)\n`,
    );
    return 0;
  } catch (err) {
    const message = (err as Error).message;
    process.stderr.write(`error: ${message}\n`);
    return message.startsWith("malformed line") ||
      message.includes("not found") ||
      message.includes("tokenizes to nothing")
      ? 1
      : 2;
  }
}

main().then((code) => {
  process.exitCode = code;
});
