/** DOM wiring: a rating screen and a report screen, no router. */

import { ApiClient } from "./api";
import { formatCell, REPORT_COLUMNS, reportRows } from "./report";
import { RatingScreen } from "./state";
import { VERDICT_LABELS, VERDICTS, type Verdict } from "./types";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function verdictGroup(name: string, onPick: (v: Verdict) => void): HTMLElement {
  const group = document.createElement("div");
  group.className = "verdicts";
  for (const verdict of VERDICTS) {
    const label = document.createElement("label");
    const input = document.createElement("input");
    input.type = "radio";
    input.name = name;
    input.value = String(verdict);
    input.addEventListener("change", () => onPick(verdict));
    label.append(input, ` ${VERDICT_LABELS[String(verdict)]}`);
    group.append(label);
  }
  return group;
}

export function startApp(): void {
  const params = new URLSearchParams(window.location.search);
  const baseUrl = params.get("service") ?? "http://127.0.0.1:8010";
  const raterId = params.get("rater") ?? `rater-${Math.random().toString(36).slice(2, 8)}`;
  const api = new ApiClient(baseUrl);
  const screen = new RatingScreen(api, raterId);

  const banner = el<HTMLDivElement>("banner");
  const sentence = el<HTMLParagraphElement>("sentence");
  const question = el<HTMLParagraphElement>("question");
  const correction = el<HTMLInputElement>("correction");
  const submit = el<HTMLButtonElement>("submit");
  const skip = el<HTMLButtonElement>("skip");
  const ratingPane = el<HTMLElement>("rating-screen");
  const reportPane = el<HTMLElement>("report-screen");
  const reportTable = el<HTMLTableElement>("report-table");

  const syntaxGroup = verdictGroup("syntax", (v) => {
    screen.form.setSyntax(v);
    sync();
  });
  const semanticsGroup = verdictGroup("semantics", (v) => {
    screen.form.setSemantics(v);
    sync();
  });
  el<HTMLDivElement>("syntax-group").append(syntaxGroup);
  el<HTMLDivElement>("semantics-group").append(semanticsGroup);

  function sync(): void {
    const current = screen.queue.current();
    sentence.textContent = current ? current.sentence : "No more questions. Thank you!";
    question.textContent = current ? current.question : "";
    submit.disabled = !current || !screen.form.canSubmit();
    skip.disabled = !current;
    correction.disabled = !screen.form.correctionEnabled();
    banner.hidden = screen.online;
    banner.textContent = screen.online
      ? ""
      : `Service unreachable; ${screen.offline.length} rating(s) queued for retry.`;
    for (const input of document.querySelectorAll<HTMLInputElement>("input[type=radio]")) {
      const expected = input.name === "syntax" ? screen.form.syntax : screen.form.semantics;
      input.checked = expected !== null && String(expected) === input.value;
    }
  }

  async function advance(): Promise<void> {
    if (screen.queue.length === 0) {
      await screen.refill();
    }
    sync();
  }

  submit.addEventListener("click", () => {
    screen.form.correction = correction.value;
    void screen.submit().then(async (outcome) => {
      if (outcome.status === "rejected") {
        banner.hidden = false;
        banner.textContent = `Rating rejected: ${outcome.detail ?? "unknown error"}`;
        return;
      }
      correction.value = "";
      await advance();
    });
  });

  skip.addEventListener("click", () => {
    void screen.skip().then(async () => {
      correction.value = "";
      await advance();
    });
  });

  async function showReport(): Promise<void> {
    try {
      const report = await api.getReport();
      reportTable.innerHTML = "";
      const head = reportTable.insertRow();
      for (const column of REPORT_COLUMNS) {
        const th = document.createElement("th");
        th.textContent = column;
        head.append(th);
      }
      for (const row of reportRows(report)) {
        const tr = reportTable.insertRow();
        for (const column of REPORT_COLUMNS) {
          const value = formatCell(row, column);
          tr.insertCell().textContent = value === "NaN" ? "" : value;
        }
      }
      el<HTMLDivElement>("report-stale").hidden = true;
    } catch {
      el<HTMLDivElement>("report-stale").hidden = false;
    }
  }

  el<HTMLButtonElement>("nav-rate").addEventListener("click", () => {
    ratingPane.hidden = false;
    reportPane.hidden = true;
  });
  el<HTMLButtonElement>("nav-report").addEventListener("click", () => {
    ratingPane.hidden = true;
    reportPane.hidden = false;
    void showReport();
  });
  el<HTMLButtonElement>("report-refresh").addEventListener("click", () => void showReport());

  window.addEventListener("online", () => {
    void screen.flushOffline().then(sync);
  });

  void advance().then(() => screen.flushOffline().then(sync));
}

startApp();
