"use strict";
/**
 * Pure view-model functions. The gallery must show exactly what the service
 * ranked: cards are a 1:1 ordered projection of the session's candidate
 * list, never reordered, filtered or re-scored on the client.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.buildCandidateCards = buildCandidateCards;
exports.validateAnnotation = validateAnnotation;
exports.responseSeconds = responseSeconds;
exports.timingNote = timingNote;
function buildCandidateCards(session, n) {
    return session.candidates.slice(0, n).map((c) => ({
        rankBadge: c.rank + 1,
        label: c.label,
        gloss: c.gloss,
        voteScore: c.vote_score.toFixed(4),
        bestSimilarity: c.best_similarity.toFixed(4),
        thumbnails: c.variants.slice(0, 3).map((id) => `/api/entries/${id}/image`),
    }));
}
function validateAnnotation(queryId, verdict, chosenLabel, confidence, note = "") {
    if (!queryId) {
        return { ok: false, error: "no active query session" };
    }
    if (verdict === "confirmed" && !chosenLabel) {
        return { ok: false, error: "confirming requires selecting a candidate" };
    }
    if (verdict !== "confirmed" && chosenLabel) {
        return { ok: false, error: "only a confirmation may carry a label" };
    }
    if (!Number.isInteger(confidence) || confidence < 1 || confidence > 5) {
        return { ok: false, error: "confidence must be an integer between 1 and 5" };
    }
    return {
        ok: true,
        payload: {
            query_id: queryId,
            verdict,
            chosen_label: verdict === "confirmed" ? chosenLabel : null,
            confidence,
            note,
        },
    };
}
/** Per-trial response time: candidate render to verdict submission. */
function responseSeconds(renderedAtMs, submittedAtMs) {
    return Math.max(0, (submittedAtMs - renderedAtMs) / 1000);
}
function timingNote(renderedAtMs, submittedAtMs) {
    return `response_time_s=${responseSeconds(renderedAtMs, submittedAtMs).toFixed(2)}`;
}
