/**
 * Workbench wiring: upload a glyph, inspect the ranked candidate gallery,
 * record a verdict. All state round-trips through the API; reloading the
 * page reconstructs the session from GET /api/sessions/{id}.
 */

import { getSession, getStats, postAnnotation, postQuery } from "./api.js";
import type { QuerySession, Verdict } from "./types.js";
import { buildCandidateCards, timingNote, validateAnnotation } from "./viewmodel.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let session: QuerySession | null = null;
let selectedLabel: string | null = null;
let renderedAt = 0;

function setStatus(text: string, isError = false): void {
  const status = $("status");
  status.textContent = text;
  status.className = isError ? "status error" : "status";
}

function renderHeader(): void {
  getStats()
    .then((stats) => {
      $("stats").textContent =
        `${stats.label_count} labels / ${stats.entry_count} entries / ` +
        `index generation ${stats.index_generation} / ${stats.encoder_id}`;
    })
    .catch((err) => setStatus(String(err), true));
}

function renderSession(): void {
  const gallery = $("gallery");
  gallery.textContent = "";
  const logPanel = $("log");
  logPanel.textContent = "";
  if (!session) return;

  $("session-meta").textContent =
    `session ${session.query_id} / generation ${session.index_generation} / k=${session.k}`;
  const queryImage = $<HTMLImageElement>("query-image");
  queryImage.src = session.image_url;
  queryImage.hidden = false;

  const n = Number(($("n-slider") as HTMLInputElement).value);
  const cards = buildCandidateCards(session, n);
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

async function onQuerySubmit(event: Event): Promise<void> {
  event.preventDefault();
  const input = $<HTMLInputElement>("image-input");
  const file = input.files && input.files[0];
  if (!file) {
    setStatus("choose an image first", true);
    return;
  }
  const n = Number(($("n-slider") as HTMLInputElement).value);
  setStatus("querying…");
  try {
    session = await postQuery(file, 50, n);
    selectedLabel = null;
    sessionStorage.setItem("glyphdict-session", session.query_id);
    renderSession();
    setStatus(`${session.candidates.length} candidates`);
  } catch (err) {
    setStatus(String(err), true);
  }
}

async function onAnnotate(verdict: Verdict): Promise<void> {
  if (!session) {
    setStatus("no active session", true);
    return;
  }
  const confidence = Number(
    (document.querySelector('input[name="confidence"]:checked') as HTMLInputElement | null)?.value,
  );
  const label = verdict === "confirmed" ? selectedLabel : null;
  const result = validateAnnotation(session.query_id, verdict, label, confidence,
    timingNote(renderedAt, Date.now()));
  if (!result.ok) {
    setStatus(result.error, true);
    return;
  }
  try {
    await postAnnotation(result.payload);
    session = await getSession(session.query_id);
    renderSession();
    setStatus(`recorded: ${verdict}${label ? " " + label : ""}`);
  } catch (err) {
    setStatus(String(err), true);
  }
}

async function restoreSession(): Promise<void> {
  const stored = sessionStorage.getItem("glyphdict-session");
  if (!stored) return;
  try {
    session = await getSession(stored);
    renderSession();
    setStatus("session restored");
  } catch {
    sessionStorage.removeItem("glyphdict-session");
  }
}

export function boot(): void {
  renderHeader();
  $("query-form").addEventListener("submit", onQuerySubmit);
  $("n-slider").addEventListener("input", () => {
    $("n-value").textContent = ($("n-slider") as HTMLInputElement).value;
    renderSession();
  });
  $("confirm-btn").addEventListener("click", () => void onAnnotate("confirmed"));
  $("reject-btn").addEventListener("click", () => void onAnnotate("rejected"));
  $("uncertain-btn").addEventListener("click", () => void onAnnotate("uncertain"));
  void restoreSession();
}

boot();
