import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { validateDocument } from "../src/schema.js";
import { CurveDocument } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

export function readFixture(name: string): string {
  return readFileSync(join(here, "..", "testdata", name), "utf-8");
}

export function goldenDocument(name: string): CurveDocument {
  const result = validateDocument(JSON.parse(readFixture(name)));
  if (!result.ok) {
    throw new Error(`golden fixture ${name} invalid: ${result.errors.join("; ")}`);
  }
  return result.doc;
}
