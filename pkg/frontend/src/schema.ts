/**
 * Artifact schema: types and strict validation for `.gist.json` documents.
 *
 * The viewer refuses anything it does not understand. Every violation is
 * reported with a JSONPath-style location (e.g. `$.paragraphs[0][1].bogus`)
 * so malformed files are debuggable from the error banner alone.
 */

export const SCHEMA_VERSION = "1";

export type InsightType =
  | "value"
  | "trend"
  | "comparison"
  | "proportion"
  | "extreme"
  | "rank"
  | "none";

export type SemanticAttribute =
  | "increasing"
  | "decreasing"
  | "maximum"
  | "minimum";

export type BreakdownKind = "categorical" | "temporal";

export interface DataRow {
  space: string;
  breakdown: string;
  breakdownKind: BreakdownKind;
  feature: string;
  value: number; // NaN stands in for semantic-only insights
}

export interface Mark {
  label: string;
  value: number;
  colorIndex: number;
}

export interface HighlightSpan {
  start: number;
  end: number;
  colorIndex: number;
}

export interface Visualization {
  variant: string;
  marks: Mark[];
  tooltipLines: string[];
  highlightSpans: HighlightSpan[];
  height: number;
  maxWidth: number;
  iconHint?: string;
  svg?: string;
}

export interface Fact {
  insightType: InsightType;
  context: string;
  attribute?: SemanticAttribute;
  position?: string[];
  dataSpec?: DataRow[];
  flags?: string[];
  visualization?: Visualization;
}

export interface Artifact {
  schemaVersion: string;
  title?: string;
  paragraphs: Fact[][];
}

export class ArtifactError extends Error {
  readonly path: string;

  constructor(path: string, message: string) {
    super(`${path}: ${message}`);
    this.name = "ArtifactError";
    this.path = path;
  }
}

const INSIGHT_TYPES = new Set<string>([
  "value", "trend", "comparison", "proportion", "extreme", "rank", "none",
]);
const ATTRIBUTES = new Set<string>([
  "increasing", "decreasing", "maximum", "minimum",
]);
const BREAKDOWN_KINDS = new Set<string>(["categorical", "temporal"]);

type Json = Record<string, unknown>;

function asObject(value: unknown, path: string): Json {
  if (typeof value !== "object" || value === null || Array.isArray(value)) {
    throw new ArtifactError(path, "must be an object");
  }
  return value as Json;
}

function checkKeys(obj: Json, path: string, allowed: string[], required: string[]): void {
  for (const key of Object.keys(obj)) {
    if (!allowed.includes(key)) {
      throw new ArtifactError(`${path}.${key}`, "unknown field");
    }
  }
  for (const key of required) {
    if (!(key in obj)) {
      throw new ArtifactError(`${path}.${key}`, "missing required field");
    }
  }
}

function str(obj: Json, path: string, key: string): string {
  const v = obj[key];
  if (typeof v !== "string") {
    throw new ArtifactError(`${path}.${key}`, "must be a string");
  }
  return v;
}

function int(obj: Json, path: string, key: string): number {
  const v = obj[key];
  if (typeof v !== "number" || !Number.isInteger(v)) {
    throw new ArtifactError(`${path}.${key}`, "must be an integer");
  }
  return v;
}

function stringList(value: unknown, path: string): string[] {
  if (!Array.isArray(value) || value.some((x) => typeof x !== "string")) {
    throw new ArtifactError(path, "must be a list of strings");
  }
  return value as string[];
}

/** Numbers are plain JSON numbers; NaN travels as the string "NaN". */
function numericValue(value: unknown, path: string): number {
  if (value === "NaN") return NaN;
  if (typeof value === "number" && Number.isFinite(value)) return value;
  throw new ArtifactError(path, 'must be a finite number or "NaN"');
}

function parseVisualization(value: unknown, path: string): Visualization {
  const obj = asObject(value, path);
  checkKeys(
    obj, path,
    ["variant", "marks", "tooltipLines", "highlightSpans", "height", "maxWidth", "iconHint", "svg"],
    ["variant", "marks", "tooltipLines", "highlightSpans", "height", "maxWidth"],
  );
  if (!Array.isArray(obj.marks)) {
    throw new ArtifactError(`${path}.marks`, "must be a list");
  }
  const marks = obj.marks.map((raw, i) => {
    const mpath = `${path}.marks[${i}]`;
    const m = asObject(raw, mpath);
    checkKeys(m, mpath, ["label", "value", "colorIndex"], ["label", "value", "colorIndex"]);
    return {
      label: str(m, mpath, "label"),
      value: numericValue(m.value, `${mpath}.value`),
      colorIndex: int(m, mpath, "colorIndex"),
    };
  });
  if (!Array.isArray(obj.highlightSpans)) {
    throw new ArtifactError(`${path}.highlightSpans`, "must be a list");
  }
  const highlightSpans = obj.highlightSpans.map((raw, i) => {
    const spath = `${path}.highlightSpans[${i}]`;
    const s = asObject(raw, spath);
    checkKeys(s, spath, ["start", "end", "colorIndex"], ["start", "end", "colorIndex"]);
    const span = {
      start: int(s, spath, "start"),
      end: int(s, spath, "end"),
      colorIndex: int(s, spath, "colorIndex"),
    };
    if (span.start < 0 || span.end <= span.start) {
      throw new ArtifactError(spath, "span must satisfy 0 <= start < end");
    }
    return span;
  });
  return {
    variant: str(obj, path, "variant"),
    marks,
    tooltipLines: stringList(obj.tooltipLines, `${path}.tooltipLines`),
    highlightSpans,
    height: int(obj, path, "height"),
    maxWidth: int(obj, path, "maxWidth"),
    iconHint: "iconHint" in obj ? str(obj, path, "iconHint") : undefined,
    svg: "svg" in obj ? str(obj, path, "svg") : undefined,
  };
}

function parseRow(value: unknown, path: string): DataRow {
  const obj = asObject(value, path);
  checkKeys(
    obj, path,
    ["space", "breakdown", "breakdownKind", "feature", "value"],
    ["space", "breakdown", "breakdownKind", "feature", "value"],
  );
  const kind = str(obj, path, "breakdownKind");
  if (!BREAKDOWN_KINDS.has(kind)) {
    throw new ArtifactError(`${path}.breakdownKind`, `unknown breakdown kind "${kind}"`);
  }
  return {
    space: str(obj, path, "space"),
    breakdown: str(obj, path, "breakdown"),
    breakdownKind: kind as BreakdownKind,
    feature: str(obj, path, "feature"),
    value: numericValue(obj.value, `${path}.value`),
  };
}

function parseFact(value: unknown, path: string): Fact {
  const obj = asObject(value, path);
  checkKeys(
    obj, path,
    ["insightType", "context", "attribute", "position", "dataSpec", "flags", "visualization"],
    ["insightType", "context"],
  );
  const typeText = str(obj, path, "insightType");
  if (!INSIGHT_TYPES.has(typeText)) {
    throw new ArtifactError(`${path}.insightType`, `unknown insight type "${typeText}"`);
  }
  const context = str(obj, path, "context");
  if (!context) {
    throw new ArtifactError(`${path}.context`, "must be non-empty");
  }
  const fact: Fact = { insightType: typeText as InsightType, context };

  if ("attribute" in obj) {
    const attr = str(obj, path, "attribute");
    if (!ATTRIBUTES.has(attr)) {
      throw new ArtifactError(`${path}.attribute`, `unknown attribute "${attr}"`);
    }
    fact.attribute = attr as SemanticAttribute;
  }
  if ("position" in obj) {
    fact.position = stringList(obj.position, `${path}.position`);
  }
  if ("dataSpec" in obj) {
    if (!Array.isArray(obj.dataSpec)) {
      throw new ArtifactError(`${path}.dataSpec`, "must be a list");
    }
    fact.dataSpec = obj.dataSpec.map((r, i) => parseRow(r, `${path}.dataSpec[${i}]`));
  }
  if ("flags" in obj) {
    fact.flags = stringList(obj.flags, `${path}.flags`);
  }
  if ("visualization" in obj) {
    fact.visualization = parseVisualization(obj.visualization, `${path}.visualization`);
  }
  return fact;
}

/** Parse and validate artifact text; throws ArtifactError with a path. */
export function parseArtifact(text: string): Artifact {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch (err) {
    throw new ArtifactError("$", `not valid JSON (${(err as Error).message})`);
  }
  const root = asObject(data, "$");
  checkKeys(root, "$", ["schema_version", "title", "paragraphs"], ["schema_version", "paragraphs"]);
  const version = str(root, "$", "schema_version");
  if (version !== SCHEMA_VERSION) {
    throw new ArtifactError("$.schema_version", `unsupported version "${version}"`);
  }
  if (!Array.isArray(root.paragraphs)) {
    throw new ArtifactError("$.paragraphs", "must be a list");
  }
  const paragraphs = root.paragraphs.map((para, p) => {
    if (!Array.isArray(para)) {
      throw new ArtifactError(`$.paragraphs[${p}]`, "must be a list of facts");
    }
    return para.map((f, i) => parseFact(f, `$.paragraphs[${p}][${i}]`));
  });
  return {
    schemaVersion: version,
    title: "title" in root ? str(root, "$", "title") : undefined,
    paragraphs,
  };
}
