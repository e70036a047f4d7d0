import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

const here = dirname(fileURLToPath(import.meta.url));

/** The golden artifact committed with the pipeline's test suite. */
export function goldenText(): string {
  return readFileSync(
    join(here, "..", "..", "tests", "fixtures", "golden_expected.gist.json"),
    "utf-8",
  );
}
