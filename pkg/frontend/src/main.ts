/** Browser wiring: document loading, controls, animation loop, hit testing. */

import { loadDocumentText } from "./controller.js";
import {
  pause, play, selectCheckpoint, setCursor, setSpeed,
  setTransform, switchAlpha, tick, toggleSeries, ViewState,
} from "./state.js";
import { buildCanvas, buildLegend, buildPanel, buildQuality } from "./scene.js";
import { mount } from "./vdom.js";

let state: ViewState | null = null;
let lastFrame = 0;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function showError(message: string) {
  const banner = el<HTMLDivElement>("error-banner");
  banner.textContent = message;
  banner.hidden = false;
}

function clearError() {
  el<HTMLDivElement>("error-banner").hidden = true;
}

function loadText(text: string) {
  const outcome = loadDocumentText(state, text);
  if (outcome.error !== null) {
    // state stays untouched on schema errors
    showError(`Cannot load document: ${outcome.error}`);
    return;
  }
  clearError();
  state = outcome.state;
  buildControls();
  render();
}

function buildControls() {
  if (!state) return;
  const alphaSelect = el<HTMLSelectElement>("alpha-select");
  alphaSelect.innerHTML = "";
  for (const emb of state.doc.embeddings) {
    const opt = document.createElement("option");
    opt.value = String(emb.alpha);
    opt.textContent = `alpha ${emb.alpha}`;
    alphaSelect.appendChild(opt);
  }
  alphaSelect.value = String(state.alpha);
  const scrub = el<HTMLInputElement>("scrub");
  scrub.max = String(state.doc.checkpoints.length);
  scrub.value = String(state.cursor);
}

function render() {
  if (!state) return;
  const host = el<HTMLDivElement>("canvas-host");
  host.innerHTML = "";
  host.appendChild(mount(buildCanvas(state), document));
  const legendHost = el<HTMLDivElement>("legend-host");
  legendHost.innerHTML = "";
  legendHost.appendChild(mount(buildLegend(state), document));
  const panelHost = el<HTMLDivElement>("panel-host");
  panelHost.innerHTML = "";
  panelHost.appendChild(mount(buildPanel(state), document));
  const qualityHost = el<HTMLSpanElement>("quality-host");
  qualityHost.innerHTML = "";
  qualityHost.appendChild(mount(buildQuality(state), document));
  el<HTMLInputElement>("scrub").value = String(Math.floor(state.cursor));
  el<HTMLButtonElement>("play-pause").textContent = state.playing ? "Pause" : "Play";
}

function update(next: ViewState) {
  state = next;
  render();
}

function frame(ts: number) {
  if (state && state.playing) {
    const dt = lastFrame ? (ts - lastFrame) / 1000 : 0;
    update(tick(state, dt));
  }
  lastFrame = ts;
  requestAnimationFrame(frame);
}

function wire() {
  el<HTMLInputElement>("file-input").addEventListener("change", async (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (file) loadText(await file.text());
  });

  el<HTMLSelectElement>("alpha-select").addEventListener("change", (ev) => {
    if (!state) return;
    update(switchAlpha(state, Number((ev.target as HTMLSelectElement).value)));
  });

  el<HTMLButtonElement>("play-pause").addEventListener("click", () => {
    if (!state) return;
    update(state.playing ? pause(state) : play(state));
  });

  el<HTMLInputElement>("scrub").addEventListener("input", (ev) => {
    if (!state) return;
    update(setCursor(pause(state), Number((ev.target as HTMLInputElement).value)));
  });

  el<HTMLSelectElement>("speed-select").addEventListener("change", (ev) => {
    if (!state) return;
    update(setSpeed(state, Number((ev.target as HTMLSelectElement).value)));
  });

  el<HTMLDivElement>("legend-host").addEventListener("click", (ev) => {
    if (!state) return;
    const entry = (ev.target as HTMLElement).closest("[data-series]");
    if (entry) update(toggleSeries(state, entry.getAttribute("data-series")!));
  });

  el<HTMLDivElement>("canvas-host").addEventListener("click", (ev) => {
    if (!state) return;
    const target = (ev.target as HTMLElement).closest("circle[data-index]");
    if (target) {
      update(selectCheckpoint(state, Number(target.getAttribute("data-index"))));
    }
  });

  el<HTMLDivElement>("canvas-host").addEventListener("wheel", (ev) => {
    if (!state) return;
    ev.preventDefault();
    const factor = ev.deltaY < 0 ? 1.15 : 1 / 1.15;
    const t = state.transform;
    const rect = (ev.currentTarget as HTMLElement).getBoundingClientRect();
    const mx = ev.clientX - rect.left;
    const my = ev.clientY - rect.top;
    update(setTransform(state, {
      k: t.k * factor,
      x: mx - (mx - t.x) * factor,
      y: my - (my - t.y) * factor,
    }));
  }, { passive: false });

  let dragging: { mx: number; my: number; x: number; y: number } | null = null;
  el<HTMLDivElement>("canvas-host").addEventListener("mousedown", (ev) => {
    if (!state) return;
    dragging = { mx: ev.clientX, my: ev.clientY, x: state.transform.x, y: state.transform.y };
  });
  window.addEventListener("mousemove", (ev) => {
    if (!state || !dragging) return;
    update(setTransform(state, {
      k: state.transform.k,
      x: dragging.x + ev.clientX - dragging.mx,
      y: dragging.y + ev.clientY - dragging.my,
    }));
  });
  window.addEventListener("mouseup", () => {
    dragging = null;
  });

  const params = new URLSearchParams(window.location.search);
  const docUrl = params.get("doc");
  if (docUrl) {
    fetch(docUrl)
      .then((r) => {
        if (!r.ok) throw new Error(`HTTP ${r.status}`);
        return r.text();
      })
      .then(loadText)
      .catch((exc) => showError(`Cannot fetch ${docUrl}: ${exc}`));
  }

  requestAnimationFrame(frame);
}

wire();
