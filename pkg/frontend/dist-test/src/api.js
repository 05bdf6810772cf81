"use strict";
/** Thin fetch wrappers over the workbench service API. */
Object.defineProperty(exports, "__esModule", { value: true });
exports.postQuery = postQuery;
exports.getSession = getSession;
exports.postAnnotation = postAnnotation;
exports.getStats = getStats;
async function expectOk(response) {
    if (!response.ok) {
        let detail = response.statusText;
        try {
            const body = await response.json();
            if (body && body.detail)
                detail = String(body.detail);
        }
        catch {
            // non-JSON error body: keep the status text
        }
        throw new Error(`${response.status}: ${detail}`);
    }
    return response;
}
async function postQuery(file, k, n) {
    const form = new FormData();
    form.append("image", file);
    const response = await expectOk(await fetch(`/api/query?k=${k}&n=${n}`, { method: "POST", body: form }));
    return response.json();
}
async function getSession(queryId) {
    const response = await expectOk(await fetch(`/api/sessions/${queryId}`));
    return response.json();
}
async function postAnnotation(draft) {
    const response = await expectOk(await fetch("/api/annotations", {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(draft),
    }));
    return response.json();
}
async function getStats() {
    const response = await expectOk(await fetch("/api/stats"));
    return response.json();
}
