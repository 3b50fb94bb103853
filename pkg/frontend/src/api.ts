// Thin client for the /api/v1 service. Every call is stateless; one
// in-flight request per category, newer calls supersede older ones.

import { CcrsDocument, Diagnostic } from "./document.js";

export interface SymbolEntry {
  opcode: string;
  class: string;
  code: string;
  glyph: string;
}

export interface SymbolTable {
  operations: SymbolEntry[];
  keywords: Record<string, string>;
}

export class ApiError extends Error {
  constructor(public diagnostics: Diagnostic[]) {
    super(diagnostics.map((d) => `${d.code}: ${d.message}`).join("; "));
  }
}

export class OfflineError extends Error {}

export class Client {
  private sequence = new Map<string, number>();

  constructor(public base: string = "") {}

  private async post<T>(category: string, path: string, body: unknown): Promise<T> {
    const ticket = (this.sequence.get(category) ?? 0) + 1;
    this.sequence.set(category, ticket);
    let resp: Response;
    try {
      resp = await fetch(this.base + path, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch {
      throw new OfflineError("service unreachable");
    }
    if (this.sequence.get(category) !== ticket) {
      throw new OfflineError("superseded by a newer request");
    }
    const payload = await resp.json();
    if (!resp.ok) {
      throw new ApiError((payload.diagnostics ?? []) as Diagnostic[]);
    }
    return payload as T;
  }

  async symbols(): Promise<SymbolTable> {
    let resp: Response;
    try {
      resp = await fetch(this.base + "/api/v1/symbols");
    } catch {
      throw new OfflineError("service unreachable");
    }
    return (await resp.json()) as SymbolTable;
  }

  async convert(source: string, top?: string): Promise<CcrsDocument> {
    const body: Record<string, unknown> = { source };
    if (top) body.top = top;
    const out = await this.post<{ document: CcrsDocument }>(
      "convert", "/api/v1/convert", body);
    return out.document;
  }

  async emit(document: CcrsDocument): Promise<string> {
    const out = await this.post<{ source: string }>("emit", "/api/v1/emit",
                                                    { document });
    return out.source;
  }

  async layoutDocument(document: CcrsDocument): Promise<CcrsDocument> {
    const out = await this.post<{ document: CcrsDocument }>(
      "layout", "/api/v1/layout", { document });
    return out.document;
  }

  async render(document: CcrsDocument,
               options: Record<string, unknown> = {}): Promise<string> {
    const out = await this.post<{ svg: string }>("render", "/api/v1/render",
                                                 { document, options });
    return out.svg;
  }

  async validate(document: CcrsDocument): Promise<Diagnostic[]> {
    const out = await this.post<{ diagnostics: Diagnostic[] }>(
      "validate", "/api/v1/validate", { document });
    return out.diagnostics;
  }

  async canonical(document: CcrsDocument): Promise<string> {
    const out = await this.post<{ canonical: string }>(
      "canonical", "/api/v1/canonical", { document });
    return out.canonical;
  }
}
