// Shared access to the committed 50-work corpus document.

import { readFileSync } from "node:fs";

import type { GraphDocument } from "../src/types.js";

const GOLDEN = new URL("../../tests/data/golden.document.json", import.meta.url);

export function goldenDocument(): GraphDocument {
  return JSON.parse(readFileSync(GOLDEN, "utf-8")) as GraphDocument;
}
