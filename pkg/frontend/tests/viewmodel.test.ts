/**
 * Gallery fidelity (S1): cards are exactly the service's label ranking, in
 * order, deduplicated, at most n of them. The committed fixture sessions are
 * real service responses and double as the snapshot.
 */

import assert from "node:assert/strict";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { test } from "node:test";

import type { QuerySession } from "../src/types.js";
import { buildCandidateCards, responseSeconds, timingNote, validateAnnotation } from "../src/viewmodel.js";

// compiled tests run from dist-test/tests/, fixtures stay in tests/fixtures/
const sessions: QuerySession[] = JSON.parse(
  readFileSync(join(__dirname, "..", "..", "tests", "fixtures", "sessions.json"), "utf-8"),
);

test("fixtures: ten real sessions", () => {
  assert.equal(sessions.length, 10);
});

test("cards render the service ranking order exactly (snapshot)", () => {
  for (const session of sessions) {
    const cards = buildCandidateCards(session, 10);
    assert.deepEqual(
      cards.map((c) => c.label),
      session.candidates.slice(0, 10).map((c) => c.label),
      `order must match for ${session.query_id}`,
    );
    assert.deepEqual(
      cards.map((c) => c.rankBadge),
      session.candidates.slice(0, 10).map((c) => c.rank + 1),
    );
    // scores pass through unmodified (formatted, not recomputed)
    for (let i = 0; i < cards.length; i++) {
      assert.equal(cards[i].voteScore, session.candidates[i].vote_score.toFixed(4));
      assert.equal(cards[i].bestSimilarity, session.candidates[i].best_similarity.toFixed(4));
    }
  }
});

test("n=10 view shows at most 10 unique labels", () => {
  for (const session of sessions) {
    const cards = buildCandidateCards(session, 10);
    assert.ok(cards.length <= 10);
    const labels = cards.map((c) => c.label);
    assert.equal(new Set(labels).size, labels.length, "labels must be unique");
  }
});

test("n slider truncates without reordering", () => {
  const session = sessions[0];
  const five = buildCandidateCards(session, 5);
  const ten = buildCandidateCards(session, 10);
  assert.equal(five.length, 5);
  assert.deepEqual(five.map((c) => c.label), ten.slice(0, 5).map((c) => c.label));
});

test("thumbnails: up to three variant image urls per card", () => {
  for (const session of sessions) {
    for (const card of buildCandidateCards(session, 10)) {
      assert.ok(card.thumbnails.length >= 1 && card.thumbnails.length <= 3);
      for (const url of card.thumbnails) {
        assert.match(url, /^\/api\/entries\/[0-9a-f]{16}\/image$/);
      }
    }
  }
});

test("annotation validation: confirm requires a selection", () => {
  const bad = validateAnnotation("abc", "confirmed", null, 3);
  assert.equal(bad.ok, false);
  const good = validateAnnotation("abc", "confirmed", "木", 4);
  assert.ok(good.ok);
  if (good.ok) {
    assert.equal(good.payload.chosen_label, "木");
    assert.equal(good.payload.confidence, 4);
  }
});

test("annotation validation: none-fits maps to rejected with no label", () => {
  const result = validateAnnotation("abc", "rejected", null, 2);
  assert.ok(result.ok);
  if (result.ok) {
    assert.equal(result.payload.verdict, "rejected");
    assert.equal(result.payload.chosen_label, null);
  }
  const carrying = validateAnnotation("abc", "rejected", "木", 2);
  assert.equal(carrying.ok, false);
});

test("annotation validation: confidence limited to integers 1..5", () => {
  for (const value of [0, 6, 2.5, NaN]) {
    assert.equal(validateAnnotation("abc", "uncertain", null, value).ok, false);
  }
  for (const value of [1, 2, 3, 4, 5]) {
    assert.ok(validateAnnotation("abc", "uncertain", null, value).ok);
  }
});

test("response timing is captured in the note field", () => {
  assert.equal(responseSeconds(1000, 13500), 12.5);
  assert.equal(timingNote(1000, 13500), "response_time_s=12.50");
  assert.equal(responseSeconds(5000, 1000), 0);
});
