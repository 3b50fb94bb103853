// Editor state: the current document, selection, undo/redo stacks, and the
// structural mutations. All semantic work (validate/emit/render/layout)
// happens on the server; this module only edits the graph.

import {
  CcrsDocument, Diagnostic, Stn, cloneDocument, emptyDocument, findStn,
  stableStringify, walkStns,
} from "./document.js";

export interface PortRef {
  stn: string;
  side: "in" | "out";
  index: number;
}

export type TemplateKind =
  "DataOp" | "Branch" | "CaseSelect" | "Timing" | "Constant" | "Port" | "Instance";

export interface PlaceOptions {
  opcode?: string;
  label?: string;
  arity?: number;
  width?: number;
  value?: number;
  name?: string;
  direction?: "in" | "out";
  module?: string;
  clock?: string;
}

export interface ConnectResult {
  ok: boolean;
  message?: string;
}

export class Editor {
  doc: CcrsDocument;
  selection = new Set<string>();
  dirty = false;
  diagnostics: Diagnostic[] = [];
  /** Sketch positions for nodes placed before the next server relayout. */
  positions = new Map<string, { x: number; y: number }>();

  private undoStack: string[] = [];
  private redoStack: string[] = [];

  constructor(doc?: CcrsDocument) {
    this.doc = doc ?? emptyDocument("design");
  }

  snapshot(): string {
    return stableStringify(this.doc);
  }

  private checkpoint(): void {
    this.undoStack.push(this.snapshot());
    this.redoStack.length = 0;
    this.dirty = true;
  }

  canUndo(): boolean { return this.undoStack.length > 0; }
  canRedo(): boolean { return this.redoStack.length > 0; }

  undo(): boolean {
    const prev = this.undoStack.pop();
    if (prev === undefined) return false;
    this.redoStack.push(this.snapshot());
    this.doc = JSON.parse(prev) as CcrsDocument;
    return true;
  }

  redo(): boolean {
    const next = this.redoStack.pop();
    if (next === undefined) return false;
    this.undoStack.push(this.snapshot());
    this.doc = JSON.parse(next) as CcrsDocument;
    return true;
  }

  loadDocument(doc: CcrsDocument): void {
    this.checkpoint();
    this.doc = cloneDocument(doc);
    this.selection.clear();
    this.positions.clear();
  }

  freshId(prefix = "n"): string {
    const used = new Set<string>();
    for (const stn of walkStns(this.doc)) used.add(stn.id);
    for (const lwc of this.doc.lwcs) used.add(lwc.id);
    let k = 0;
    while (used.has(`${prefix}${k}`)) k += 1;
    return `${prefix}${k}`;
  }

  // --- mutations -----------------------------------------------------------

  placeTemplate(kind: TemplateKind, position: { x: number; y: number },
                opts: PlaceOptions = {}): Stn {
    this.checkpoint();
    const stn = this.buildTemplate(kind, opts);
    this.doc.stns.push(stn);
    this.positions.set(stn.id, position);
    return stn;
  }

  private buildTemplate(kind: TemplateKind, opts: PlaceOptions): Stn {
    const id = this.freshId();
    const width = opts.width ?? 1;
    const base: Stn = {
      id, kind, label: opts.label ?? "", opcode: null,
      inputs: [], outputs: [], children: [], attrs: {},
    };
    switch (kind) {
      case "DataOp": {
        const arity = opts.arity ?? 2;
        base.opcode = opts.opcode ?? "bit_and";
        for (let i = 0; i < arity; i += 1) base.inputs.push([`in${i}`, width]);
        base.outputs.push(["out", width]);
        break;
      }
      case "Branch": {
        base.inputs = [["c0", 1], ["v0", width], ["vd", width]];
        base.outputs = [["out", width]];
        base.attrs = { rows: [{ cond: "c0", value: "v0" },
                              { cond: null, value: "vd" }] };
        break;
      }
      case "CaseSelect": {
        base.inputs = [["sel", 1], ["v0", width], ["vd", width]];
        base.outputs = [["out", width]];
        base.attrs = { rows: [{ match: 0, value: "v0" },
                              { match: null, value: "vd" }] };
        break;
      }
      case "Timing": {
        const clock = opts.clock ?? "clk";
        base.inputs = [["d", width]];
        base.outputs = [["q", width]];
        base.attrs = { clockDomain: clock };
        this.ensureClock(clock);
        break;
      }
      case "Constant": {
        base.outputs = [["out", width]];
        base.attrs = { value: opts.value ?? 0 };
        break;
      }
      case "Port": {
        const name = opts.name ?? this.freshPortName(opts.direction ?? "in");
        base.label = name;
        base.attrs = { port: name };
        if ((opts.direction ?? "in") === "in") {
          base.outputs = [[name, width]];
        } else {
          base.inputs = [[name, width]];
        }
        this.doc.ports.push({ name, dir: opts.direction ?? "in", width });
        break;
      }
      case "Instance": {
        base.attrs = { module: opts.module ?? "child", instance: id, clocks: {} };
        break;
      }
    }
    return base;
  }

  private freshPortName(direction: "in" | "out"): string {
    const used = new Set(this.doc.ports.map((p) => p.name));
    const prefix = direction === "in" ? "i" : "o";
    let k = 0;
    while (used.has(`${prefix}${k}`)) k += 1;
    return `${prefix}${k}`;
  }

  private ensureClock(clock: string): void {
    if (!this.doc.clockDomains.some((d) => d.id === clock)) {
      this.doc.clockDomains.push({ id: clock, clock });
    }
    if (!this.doc.ports.some((p) => p.name === clock)) {
      this.doc.ports.push({ name: clock, dir: "in", width: 1 });
      this.doc.stns.push({
        id: this.freshId(), kind: "Port", label: clock, opcode: null,
        inputs: [], outputs: [[clock, 1]], children: [], attrs: { port: clock },
      });
    }
  }

  /** Wire an output port to an input port. Joins the existing net when the
   * source already drives one (single source, many sinks). Width mismatches
   * are allowed here and surface as validation diagnostics. */
  connect(a: PortRef, b: PortRef): ConnectResult {
    const [src, dst] = a.side === "out" ? [a, b] : [b, a];
    if (src.side !== "out" || dst.side !== "in") {
      return { ok: false, message: "connect one output to one input" };
    }
    const srcStn = findStn(this.doc, src.stn);
    const dstStn = findStn(this.doc, dst.stn);
    if (!srcStn || src.index >= srcStn.outputs.length) {
      return { ok: false, message: "no such output port" };
    }
    if (!dstStn || dst.index >= dstStn.inputs.length) {
      return { ok: false, message: "no such input port" };
    }
    for (const lwc of this.doc.lwcs) {
      if (lwc.sinks.some(([s, i]) => s === dst.stn && i === dst.index)) {
        return { ok: false, message: "input is already connected" };
      }
    }
    this.checkpoint();
    const existing = this.doc.lwcs.find(
      (w) => w.source[0] === src.stn && w.source[1] === src.index);
    if (existing) {
      existing.sinks.push([dst.stn, dst.index]);
    } else {
      this.doc.lwcs.push({
        id: this.freshId("w"),
        width: srcStn.outputs[src.index][1],
        source: [src.stn, src.index],
        sinks: [[dst.stn, dst.index]],
      });
    }
    return { ok: true };
  }

  /** Insert a condition row before the trailing default row. */
  addBranchRow(stnId: string): ConnectResult {
    const stn = findStn(this.doc, stnId);
    if (!stn || (stn.kind !== "Branch" && stn.kind !== "CaseSelect")) {
      return { ok: false, message: "not a branch or case node" };
    }
    this.checkpoint();
    const rows = stn.attrs.rows as Record<string, unknown>[];
    const n = rows.length - 1;
    const width = stn.outputs[0][1];
    if (stn.kind === "Branch") {
      stn.inputs.splice(stn.inputs.length - 1, 0, [`c${n}`, 1], [`v${n}`, width]);
      rows.splice(rows.length - 1, 0, { cond: `c${n}`, value: `v${n}` });
    } else {
      stn.inputs.splice(stn.inputs.length - 1, 0, [`v${n}`, width]);
      rows.splice(rows.length - 1, 0, { match: n, value: `v${n}` });
    }
    this.rewireAfterInputShift(stnId, stn.inputs.length - 1, stn.kind === "Branch" ? 2 : 1);
    return { ok: true };
  }

  /** Inserting ports before the default slot shifts the last input index. */
  private rewireAfterInputShift(stnId: string, defaultIndex: number,
                                inserted: number): void {
    for (const lwc of this.doc.lwcs) {
      lwc.sinks = lwc.sinks.map(([s, i]) =>
        s === stnId && i === defaultIndex - inserted ? [s, defaultIndex] : [s, i]);
    }
  }

  removeStn(stnId: string): ConnectResult {
    const index = this.doc.stns.findIndex((s) => s.id === stnId);
    if (index < 0) return { ok: false, message: "not a top-level node" };
    this.checkpoint();
    const stn = this.doc.stns[index];
    this.doc.stns.splice(index, 1);
    const gone = new Set<string>();
    const stack = [stn];
    while (stack.length) {
      const node = stack.pop()!;
      gone.add(node.id);
      stack.push(...node.children);
    }
    this.doc.lwcs = this.doc.lwcs
      .filter((w) => !gone.has(w.source[0]))
      .map((w) => ({ ...w, sinks: w.sinks.filter(([s]) => !gone.has(s)) }))
      .filter((w) => w.sinks.length > 0);
    if (stn.kind === "Port") {
      const name = stn.attrs.port as string;
      this.doc.ports = this.doc.ports.filter((p) => p.name !== name);
    }
    this.selection.delete(stnId);
    return { ok: true };
  }

  setModuleName(name: string): void {
    this.checkpoint();
    this.doc.module = name;
  }
}
