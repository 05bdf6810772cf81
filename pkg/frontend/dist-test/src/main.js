"use strict";
/**
 * Workbench wiring: upload a glyph, inspect the ranked candidate gallery,
 * record a verdict. All state round-trips through the API; reloading the
 * page reconstructs the session from GET /api/sessions/{id}.
 */
Object.defineProperty(exports, "__esModule", { value: true });
exports.boot = boot;
const api_js_1 = require("./api.js");
const viewmodel_js_1 = require("./viewmodel.js");
const $ = (id) => {
    const el = document.getElementById(id);
    if (!el)
        throw new Error(`missing element #${id}`);
    return el;
};
let session = null;
let selectedLabel = null;
let renderedAt = 0;
function setStatus(text, isError = false) {
    const status = $("status");
    status.textContent = text;
    status.className = isError ? "status error" : "status";
}
function renderHeader() {
    (0, api_js_1.getStats)()
        .then((stats) => {
        $("stats").textContent =
            `${stats.label_count} labels / ${stats.entry_count} entries / ` +
                `index generation ${stats.index_generation} / ${stats.encoder_id}`;
    })
        .catch((err) => setStatus(String(err), true));
}
function renderSession() {
    const gallery = $("gallery");
    gallery.textContent = "";
    const logPanel = $("log");
    logPanel.textContent = "";
    if (!session)
        return;
    $("session-meta").textContent =
        `session ${session.query_id} / generation ${session.index_generation} / k=${session.k}`;
    const queryImage = $("query-image");
    queryImage.src = session.image_url;
    queryImage.hidden = false;
    const n = Number($("n-slider").value);
    const cards = (0, viewmodel_js_1.buildCandidateCards)(session, n);
    cards.forEach((card) => {
        const el = document.createElement("div");
        el.className = "card";
        el.dataset.label = card.label;
        const badge = document.createElement("span");
        badge.className = "badge";
        badge.textContent = String(card.rankBadge);
        el.appendChild(badge);
        const glyph = document.createElement("div");
        glyph.className = "glyph";
        glyph.textContent = card.label;
        el.appendChild(glyph);
        const gloss = document.createElement("div");
        gloss.className = "gloss";
        gloss.textContent = card.gloss || " ";
        el.appendChild(gloss);
        const scores = document.createElement("div");
        scores.className = "scores";
        scores.textContent = `vote ${card.voteScore} / best ${card.bestSimilarity}`;
        el.appendChild(scores);
        const thumbs = document.createElement("div");
        thumbs.className = "thumbs";
        card.thumbnails.forEach((url) => {
            const img = document.createElement("img");
            img.src = url;
            img.alt = `variant evidence for ${card.label}`;
            thumbs.appendChild(img);
        });
        el.appendChild(thumbs);
        el.addEventListener("click", () => {
            selectedLabel = card.label;
            document.querySelectorAll(".card.selected").forEach((c) => c.classList.remove("selected"));
            el.classList.add("selected");
            setStatus(`selected ${card.label}`);
        });
        gallery.appendChild(el);
    });
    (session.annotations ?? []).forEach((a) => {
        const row = document.createElement("li");
        row.textContent = `${a.created_at} ${a.verdict}` +
            (a.chosen_label ? ` ${a.chosen_label}` : "") + ` (confidence ${a.confidence})`;
        logPanel.appendChild(row);
    });
    renderedAt = Date.now();
}
async function onQuerySubmit(event) {
    event.preventDefault();
    const input = $("image-input");
    const file = input.files && input.files[0];
    if (!file) {
        setStatus("choose an image first", true);
        return;
    }
    const n = Number($("n-slider").value);
    setStatus("querying…");
    try {
        session = await (0, api_js_1.postQuery)(file, 50, n);
        selectedLabel = null;
        sessionStorage.setItem("glyphdict-session", session.query_id);
        renderSession();
        setStatus(`${session.candidates.length} candidates`);
    }
    catch (err) {
        setStatus(String(err), true);
    }
}
async function onAnnotate(verdict) {
    if (!session) {
        setStatus("no active session", true);
        return;
    }
    const confidence = Number(document.querySelector('input[name="confidence"]:checked')?.value);
    const label = verdict === "confirmed" ? selectedLabel : null;
    const result = (0, viewmodel_js_1.validateAnnotation)(session.query_id, verdict, label, confidence, (0, viewmodel_js_1.timingNote)(renderedAt, Date.now()));
    if (!result.ok) {
        setStatus(result.error, true);
        return;
    }
    try {
        await (0, api_js_1.postAnnotation)(result.payload);
        session = await (0, api_js_1.getSession)(session.query_id);
        renderSession();
        setStatus(`recorded: ${verdict}${label ? " " + label : ""}`);
    }
    catch (err) {
        setStatus(String(err), true);
    }
}
async function restoreSession() {
    const stored = sessionStorage.getItem("glyphdict-session");
    if (!stored)
        return;
    try {
        session = await (0, api_js_1.getSession)(stored);
        renderSession();
        setStatus("session restored");
    }
    catch {
        sessionStorage.removeItem("glyphdict-session");
    }
}
function boot() {
    renderHeader();
    $("query-form").addEventListener("submit", onQuerySubmit);
    $("n-slider").addEventListener("input", () => {
        $("n-value").textContent = $("n-slider").value;
        renderSession();
    });
    $("confirm-btn").addEventListener("click", () => void onAnnotate("confirmed"));
    $("reject-btn").addEventListener("click", () => void onAnnotate("rejected"));
    $("uncertain-btn").addEventListener("click", () => void onAnnotate("uncertain"));
    void restoreSession();
}
boot();
