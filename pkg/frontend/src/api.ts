/** Thin fetch wrappers over the workbench service API. */

import type { AnnotationDraft, AnnotationRecord, QuerySession, Stats } from "./types.js";

async function expectOk(response: Response): Promise<Response> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && body.detail) detail = String(body.detail);
    } catch {
      // non-JSON error body: keep the status text
    }
    throw new Error(`${response.status}: ${detail}`);
  }
  return response;
}

export async function postQuery(file: File | Blob, k: number, n: number): Promise<QuerySession> {
  const form = new FormData();
  form.append("image", file);
  const response = await expectOk(
    await fetch(`/api/query?k=${k}&n=${n}`, { method: "POST", body: form }),
  );
  return response.json();
}

export async function getSession(queryId: string): Promise<QuerySession> {
  const response = await expectOk(await fetch(`/api/sessions/${queryId}`));
  return response.json();
}

export async function postAnnotation(draft: AnnotationDraft): Promise<AnnotationRecord> {
  const response = await expectOk(
    await fetch("/api/annotations", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(draft),
    }),
  );
  return response.json();
}

export async function getStats(): Promise<Stats> {
  const response = await expectOk(await fetch("/api/stats"));
  return response.json();
}
