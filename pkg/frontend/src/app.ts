// DOM wiring for the studio: palette on the left, canvas in the middle,
// diagnostics and live HDL preview on the right. All conversions go
// through the service so the canvas can never disagree with the CLI.

import { ApiError, Client, OfflineError, SymbolTable } from "./api.js";
import { cloneDocument } from "./document.js";
import { Editor, PortRef, TemplateKind } from "./editor.js";

const client = new Client();
const editor = new Editor();

const el = (id: string) => document.getElementById(id)!;

let palette: SymbolTable | null = null;

async function start(): Promise<void> {
  try {
    palette = await client.symbols();
    el("banner").hidden = true;
  } catch {
    showBanner("service unreachable; palette unavailable");
  }
  buildPalette();
  bindToolbar();
  await refresh();
}

function showBanner(message: string): void {
  const banner = el("banner");
  banner.textContent = message;
  banner.hidden = false;
}

function buildPalette(): void {
  const host = el("palette");
  host.textContent = "";
  const add = (label: string, kind: TemplateKind, opts: Record<string, unknown>) => {
    const button = document.createElement("button");
    button.textContent = label;
    button.className = "palette-item";
    button.addEventListener("click", () => {
      editor.placeTemplate(kind, { x: 40, y: 40 }, opts);
      void refresh();
    });
    host.appendChild(button);
  };
  add("入 input", "Port", { direction: "in" });
  add("出 output", "Port", { direction: "out" });
  for (const entry of palette?.operations ?? []) {
    if (entry.code === "select" || entry.code === "concat") continue;
    const arity = entry.code.startsWith("red_") || entry.code.endsWith("_not") ? 1 : 2;
    add(entry.glyph, "DataOp", { opcode: entry.code, label: entry.glyph, arity });
  }
  const kw = palette?.keywords ?? {};
  add(kw["condition"] ?? "branch", "Branch", { label: kw["condition"] ?? "条件" });
  add(kw["case"] ?? "case", "CaseSelect", { label: kw["case"] ?? "选择" });
  add(kw["register"] ?? "reg", "Timing", { label: kw["register"] ?? "寄存" });
  add(kw["constant"] ?? "const", "Constant", {});
}

function bindToolbar(): void {
  el("undo").addEventListener("click", () => { editor.undo(); void refresh(); });
  el("redo").addEventListener("click", () => { editor.redo(); void refresh(); });
  el("relayout").addEventListener("click", () => void refresh(true));
  el("module-name").addEventListener("change", (ev) => {
    editor.setModuleName((ev.target as HTMLInputElement).value || "design");
    void refresh();
  });
  el("import").addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    const text = await file.text();
    try {
      const doc = file.name.endsWith(".v")
        ? await client.convert(text)
        : JSON.parse(text);
      editor.loadDocument(doc);
      (el("module-name") as HTMLInputElement).value = editor.doc.module;
      await refresh();
    } catch (err) {
      reportError(err);
    }
    input.value = "";
  });
  el("export-json").addEventListener("click", async () => {
    try {
      const canonical = await client.canonical(editor.doc);
      download(`${editor.doc.module}.ccrs.json`, canonical, "application/json");
    } catch (err) {
      reportError(err);
    }
  });
  el("export-svg").addEventListener("click", async () => {
    try {
      const svg = await client.render(stripGeometry(), { clockRegions: true });
      download(`${editor.doc.module}.svg`, svg, "image/svg+xml");
    } catch (err) {
      reportError(err);
    }
  });
}

function download(name: string, text: string, mime: string): void {
  const url = URL.createObjectURL(new Blob([text], { type: mime }));
  const link = document.createElement("a");
  link.href = url;
  link.download = name;
  link.click();
  URL.revokeObjectURL(url);
}

function stripGeometry() {
  const doc = cloneDocument(editor.doc);
  delete doc.geometry;
  return doc;
}

function reportError(err: unknown): void {
  if (err instanceof OfflineError) {
    showBanner("service unreachable; showing the last good state");
  } else if (err instanceof ApiError) {
    renderDiagnostics(err.diagnostics);
  } else {
    showBanner(String(err));
  }
}

/** Re-validate, re-render, and refresh the HDL preview after a mutation. */
async function refresh(forceLayout = false): Promise<void> {
  renderSelectors();
  try {
    editor.diagnostics = await client.validate(editor.doc);
    el("banner").hidden = true;
  } catch (err) {
    reportError(err);
    return;
  }
  renderDiagnostics(editor.diagnostics);
  const clean = editor.diagnostics.every((d) => d.severity !== "error");
  if (!clean) {
    el("preview").textContent = "// fix the diagnostics to see generated HDL";
    renderSketch();
    return;
  }
  try {
    if (forceLayout || !editor.doc.geometry) {
      editor.doc = await client.layoutDocument(stripGeometry());
      editor.positions.clear();
    }
    el("canvas").innerHTML = await client.render(editor.doc, { clockRegions: true });
    el("preview").textContent = await client.emit(editor.doc);
  } catch (err) {
    reportError(err);
  }
}

/** Placeholder boxes while the document is mid-edit and not yet valid. */
function renderSketch(): void {
  const canvas = el("canvas");
  canvas.textContent = "";
  let y = 16;
  for (const stn of editor.doc.stns) {
    const box = document.createElement("div");
    box.className = "sketch-node";
    box.style.top = `${editor.positions.get(stn.id)?.y ?? y}px`;
    box.style.left = `${editor.positions.get(stn.id)?.x ?? 16}px`;
    box.textContent = `${stn.label || stn.kind} (${stn.id})`;
    canvas.appendChild(box);
    y += 44;
  }
}

function renderDiagnostics(diags: { severity: string; code: string; message: string }[]): void {
  const host = el("diagnostics");
  host.textContent = "";
  if (!diags.length) {
    host.textContent = "no diagnostics";
    return;
  }
  for (const d of diags) {
    const row = document.createElement("div");
    row.className = `diag diag-${d.severity}`;
    row.textContent = `[${d.code}] ${d.message}`;
    host.appendChild(row);
  }
}

/** Dropdown-driven wiring: pick an output, pick an input, connect. */
function renderSelectors(): void {
  const srcSel = el("connect-src") as HTMLSelectElement;
  const dstSel = el("connect-dst") as HTMLSelectElement;
  srcSel.textContent = "";
  dstSel.textContent = "";
  for (const stn of editor.doc.stns) {
    stn.outputs.forEach(([name, width], i) => {
      const opt = document.createElement("option");
      opt.value = `${stn.id}:out:${i}`;
      opt.textContent = `${stn.label || stn.id}.${name} [${width}]`;
      srcSel.appendChild(opt);
    });
    stn.inputs.forEach(([name, width], i) => {
      const opt = document.createElement("option");
      opt.value = `${stn.id}:in:${i}`;
      opt.textContent = `${stn.label || stn.id}.${name} [${width}]`;
      dstSel.appendChild(opt);
    });
  }
  el("connect").onclick = () => {
    const parse = (v: string): PortRef => {
      const [stn, side, index] = v.split(":");
      return { stn, side: side as "in" | "out", index: Number(index) };
    };
    if (!srcSel.value || !dstSel.value) return;
    const result = editor.connect(parse(srcSel.value), parse(dstSel.value));
    if (!result.ok) showBanner(result.message ?? "cannot connect");
    void refresh();
  };
}

void start();
