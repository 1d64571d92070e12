/** Worker-thread entry: scores chunks of lines sent by the pool until the
 * parent terminates it. */

import { parentPort } from "node:worker_threads";

import { scoreChunk } from "./batch";

interface ChunkTask {
  index: number;
  lines: string[];
  startLineno: number;
  lowercase: boolean;
  keepPunct: boolean;
}

parentPort!.on("message", (task: ChunkTask) => {
  try {
    const result = scoreChunk(
      task.lines,
      task.startLineno,
      task.lowercase,
      task.keepPunct,
    );
    parentPort!.postMessage({ index: task.index, result });
  } catch (err) {
    parentPort!.postMessage({ index: task.index, error: (err as Error).message });
  }
});
