// Client-side mirror of the ccrs-doc/1 document shape.

export type PortPair = [string, number];

export interface Stn {
  id: string;
  kind: "DataOp" | "Branch" | "CaseSelect" | "Timing" | "Constant" | "Port" | "Instance";
  label: string;
  opcode: string | null;
  inputs: PortPair[];
  outputs: PortPair[];
  children: Stn[];
  attrs: Record<string, unknown>;
}

export interface Lwc {
  id: string;
  width: number;
  source: [string, number];
  sinks: [string, number][];
}

export interface DocPort {
  name: string;
  dir: "in" | "out";
  width: number;
}

export interface ClockDomain {
  id: string;
  clock: string;
}

export interface CcrsDocument {
  version: string;
  module: string;
  ports: DocPort[];
  stns: Stn[];
  lwcs: Lwc[];
  clockDomains: ClockDomain[];
  metadata: Record<string, unknown>;
  geometry?: Record<string, unknown>;
}

export interface Diagnostic {
  severity: string;
  code: string;
  message: string;
  line?: number;
  col?: number;
}

export function emptyDocument(name: string): CcrsDocument {
  return {
    version: "ccrs-doc/1",
    module: name,
    ports: [],
    stns: [],
    lwcs: [],
    clockDomains: [],
    metadata: {},
  };
}

export function cloneDocument(doc: CcrsDocument): CcrsDocument {
  return JSON.parse(JSON.stringify(doc)) as CcrsDocument;
}

/** Deterministic byte form: keys sorted, compact separators. Undo/redo
 * equality is defined over this string. */
export function stableStringify(value: unknown): string {
  if (value === null || typeof value !== "object") {
    return JSON.stringify(value);
  }
  if (Array.isArray(value)) {
    return "[" + value.map(stableStringify).join(",") + "]";
  }
  const entries = Object.entries(value as Record<string, unknown>)
    .filter(([, v]) => v !== undefined)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([k, v]) => JSON.stringify(k) + ":" + stableStringify(v));
  return "{" + entries.join(",") + "}";
}

export function* walkStns(doc: CcrsDocument): Generator<Stn> {
  const stack = [...doc.stns];
  while (stack.length) {
    const stn = stack.shift()!;
    yield stn;
    stack.unshift(...stn.children);
  }
}

export function findStn(doc: CcrsDocument, id: string): Stn | undefined {
  for (const stn of walkStns(doc)) {
    if (stn.id === id) return stn;
  }
  return undefined;
}
