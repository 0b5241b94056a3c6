// Page logic for the spintomo browser demo. Vanilla ES module, no
// dependencies: the wasm bindings return JSON strings, the page parses them
// and draws on two canvases.

import init, { analyze, scan, experiment } from "./pkg/spintomo_wasm.js";

const TSIRELSON = 2 * Math.SQRT2;
const $ = (id) => document.getElementById(id);

const state = {
  curves: null, // scan() result: analytic witness curves
  analysis: null, // analyze() result at the current slider angle
  runs: [], // experiment() results, newest last
};

// ---------------------------------------------------------------------------
// Small utilities
// ---------------------------------------------------------------------------

const fmt = (x, d = 4) => (Number.isFinite(x) ? x.toFixed(d) : "—");
const pm = (x, s, d = 4) => `${fmt(x, d)} ± ${fmt(s, d)}`;
const vec = (v, d = 3) => `(${fmt(v[0], d)}, ${fmt(v[1], d)}, ${fmt(v[2], d)})`;

function call(fn, ...args) {
  const doc = JSON.parse(fn(...args));
  if (doc.error) throw new Error(doc.error);
  return doc;
}

function showError(message) {
  const box = $("error-box");
  box.textContent = message;
  box.style.display = "block";
}

function clearError() {
  $("error-box").style.display = "none";
}

function numberInput(id) {
  const el = $(id);
  const min = Number(el.min);
  const max = Number(el.max);
  const v = Number(el.value);
  if (!Number.isFinite(v)) throw new Error(`${id} is not a number`);
  return Math.min(max, Math.max(min, v));
}

// ---------------------------------------------------------------------------
// Canvas plumbing: fixed logical size, scaled for high-dpi displays
// ---------------------------------------------------------------------------

function ctx2d(canvas) {
  const dpr = window.devicePixelRatio || 1;
  const w = Number(canvas.dataset.w);
  const h = Number(canvas.dataset.h);
  canvas.width = w * dpr;
  canvas.height = h * dpr;
  const ctx = canvas.getContext("2d");
  ctx.scale(dpr, dpr);
  return { ctx, w, h };
}

function prepareCanvases() {
  for (const id of ["curves", "scatter"]) {
    const c = $(id);
    c.dataset.w = c.width;
    c.dataset.h = c.height;
  }
}

const COLORS = {
  axis: "#5a6578",
  grid: "#222a38",
  text: "#8b96a8",
  conc: "#67d99b",
  m12: "#6fc3ff",
  chsh: "#f2a65a",
  marker: "#d8dee8",
  dots: "rgba(111, 195, 255, 0.30)",
};

// ---------------------------------------------------------------------------
// Witness-curve plot
// ---------------------------------------------------------------------------

const CURVE_Y_MAX = 3.0;

function drawCurves() {
  const { ctx, w, h } = ctx2d($("curves"));
  const L = 46;
  const R = 12;
  const T = 12;
  const B = 32;
  const x = (theta) => L + ((w - L - R) * theta) / Math.PI;
  const y = (v) => h - B - ((h - T - B) * v) / CURVE_Y_MAX;

  // Grid and axes.
  ctx.font = "11px system-ui, sans-serif";
  ctx.strokeStyle = COLORS.grid;
  ctx.fillStyle = COLORS.text;
  ctx.lineWidth = 1;
  for (let v = 0; v <= CURVE_Y_MAX + 1e-9; v += 0.5) {
    ctx.beginPath();
    ctx.moveTo(L, y(v));
    ctx.lineTo(w - R, y(v));
    ctx.stroke();
    if (Number.isInteger(v)) {
      ctx.textAlign = "right";
      ctx.fillText(v.toFixed(0), L - 8, y(v) + 4);
    }
  }
  const xticks = [
    [0, "0"],
    [Math.PI / 4, "π/4"],
    [Math.PI / 2, "π/2"],
    [(3 * Math.PI) / 4, "3π/4"],
    [Math.PI, "π"],
  ];
  ctx.textAlign = "center";
  for (const [t, label] of xticks) {
    ctx.beginPath();
    ctx.moveTo(x(t), T);
    ctx.lineTo(x(t), h - B);
    ctx.stroke();
    ctx.fillText(label, x(t), h - B + 16);
  }
  ctx.fillText("Θ", (L + w - R) / 2, h - 4);

  ctx.strokeStyle = COLORS.axis;
  ctx.strokeRect(L, T, w - L - R, h - T - B);

  // Reference levels: locality bound, classical CHSH, Tsirelson.
  ctx.setLineDash([5, 4]);
  for (const [v, color] of [
    [1, COLORS.m12],
    [2, COLORS.chsh],
    [TSIRELSON, COLORS.chsh],
  ]) {
    ctx.strokeStyle = color;
    ctx.globalAlpha = 0.45;
    ctx.beginPath();
    ctx.moveTo(L, y(v));
    ctx.lineTo(w - R, y(v));
    ctx.stroke();
  }
  ctx.globalAlpha = 1;
  ctx.setLineDash([]);

  // Analytic curves.
  const c = state.curves;
  const series = [
    [c.concurrence, COLORS.conc],
    [c.m12, COLORS.m12],
    [c.chsh_max, COLORS.chsh],
  ];
  ctx.lineWidth = 2;
  for (const [values, color] of series) {
    ctx.strokeStyle = color;
    ctx.beginPath();
    values.forEach((v, i) => {
      const px = x(c.theta[i]);
      const py = y(v);
      if (i === 0) ctx.moveTo(px, py);
      else ctx.lineTo(px, py);
    });
    ctx.stroke();
  }

  // Current slider angle.
  const theta = Number($("theta").value);
  ctx.strokeStyle = COLORS.marker;
  ctx.globalAlpha = 0.6;
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(x(theta), T);
  ctx.lineTo(x(theta), h - B);
  ctx.stroke();
  ctx.globalAlpha = 1;

  // Reconstructed witnesses from the pseudo-experiments, ±1σ bootstrap.
  for (const run of state.runs) {
    for (const [v, s, color] of [
      [run.m12_hat, run.m12_sigma, COLORS.m12],
      [run.concurrence_hat, run.concurrence_sigma, COLORS.conc],
    ]) {
      const px = x(run.theta);
      ctx.strokeStyle = color;
      ctx.fillStyle = color;
      ctx.lineWidth = 1.5;
      ctx.beginPath();
      ctx.moveTo(px, y(Math.min(CURVE_Y_MAX, v + s)));
      ctx.lineTo(px, y(Math.max(0, v - s)));
      ctx.stroke();
      ctx.beginPath();
      ctx.arc(px, y(v), 3.5, 0, 2 * Math.PI);
      ctx.fill();
      ctx.strokeStyle = "#10141a";
      ctx.stroke();
    }
  }
}

// ---------------------------------------------------------------------------
// Daughter-direction scatter
// ---------------------------------------------------------------------------

function drawScatter(run) {
  const { ctx, w, h } = ctx2d($("scatter"));
  const M = 34;
  const x = (u) => M + ((w - 2 * M) * (u + 1)) / 2;
  const y = (v) => h - M - ((h - 2 * M) * (v + 1)) / 2;

  ctx.font = "11px system-ui, sans-serif";
  ctx.strokeStyle = COLORS.grid;
  ctx.lineWidth = 1;
  for (const t of [-0.5, 0, 0.5]) {
    ctx.beginPath();
    ctx.moveTo(x(t), M);
    ctx.lineTo(x(t), h - M);
    ctx.stroke();
    ctx.beginPath();
    ctx.moveTo(M, y(t));
    ctx.lineTo(w - M, y(t));
    ctx.stroke();
  }
  ctx.strokeStyle = COLORS.axis;
  ctx.strokeRect(M, M, w - 2 * M, h - 2 * M);
  ctx.fillStyle = COLORS.text;
  ctx.textAlign = "center";
  for (const t of [-1, 0, 1]) {
    ctx.fillText(t.toFixed(0), x(t), h - M + 16);
  }
  ctx.fillText("n̂⁺ · ẑ", (x(-1) + x(1)) / 2, h - 6);
  ctx.save();
  ctx.translate(12, (y(-1) + y(1)) / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText("n̂⁻ · ẑ", 0, 0);
  ctx.restore();
  ctx.textAlign = "right";
  for (const t of [-1, 0, 1]) {
    ctx.fillText(t.toFixed(0), M - 5, y(t) + 4);
  }

  if (!run) {
    ctx.fillStyle = COLORS.text;
    ctx.textAlign = "center";
    ctx.fillText("run a pseudo-experiment to fill this plot", w / 2, h / 2);
    return;
  }

  ctx.fillStyle = COLORS.dots;
  for (const [u, v] of run.scatter) {
    ctx.beginPath();
    ctx.arc(x(u), y(v), 1.6, 0, 2 * Math.PI);
    ctx.fill();
  }
  ctx.fillStyle = COLORS.text;
  ctx.textAlign = "left";
  ctx.fillText(`${run.scatter.length} of ${run.n_events} events shown`, M, M - 8);
}

// ---------------------------------------------------------------------------
// Text panels
// ---------------------------------------------------------------------------

function yesNo(flag, yes = "yes", no = "no") {
  return flag
    ? `<span class="ok">${yes}</span>`
    : `<span class="bad">${no}</span>`;
}

function renderAnalysis() {
  const a = state.analysis;
  const deg = ((a.theta * 180) / Math.PI).toFixed(1);
  $("theta-readout").textContent = `${fmt(a.theta, 3)} rad (${deg}°)`;
  const amp = a.amplitudes;
  const rows = [
    ["state |Ψ⟩", `${fmt(amp[0], 4)}·|RR⟩ + ${fmt(amp[1], 4)}·|RL⟩ + ${fmt(amp[2], 4)}·|LR⟩ + ${fmt(amp[3], 4)}·|LL⟩`],
    ["B⁺, B⁻", `${vec(a.b_plus)}, ${vec(a.b_minus)}`],
    ["C", `diag(${fmt(a.c[0][0], 4)}, ${fmt(a.c[1][1], 4)}, ${fmt(a.c[2][2], 4)})`],
    ["concurrence", fmt(a.concurrence, 6)],
    ["m₁ + m₂", `${fmt(a.m12, 6)} — nonlocal iff > 1: ${yesNo(a.m12 > 1 + 1e-12)}`],
    ["CHSH max 2√(m₁+m₂)", fmt(a.chsh_max, 6)],
    ["at optimal directions", `${fmt(a.optimal_value, 6)}${a.degenerate ? " (degenerate C)" : ""}`],
    ["n₁ … n₄", `${vec(a.directions.n1)} ${vec(a.directions.n2)}<br>${vec(a.directions.n3)} ${vec(a.directions.n4)}`],
    ["probability form", `lhs ${fmt(a.probability_form.lhs, 6)} vs rhs ${fmt(a.probability_form.rhs, 6)} — violated: ${yesNo(a.probability_form.violated)}`],
  ];
  $("analysis-panel").innerHTML = `<table>${rows
    .map(([k, v]) => `<tr><th>${k}</th><td>${v}</td></tr>`)
    .join("")}</table>`;
}

function renderRun(run) {
  if (!run) {
    $("run-panel").textContent = "No runs yet.";
    return;
  }
  const cRow = (i) =>
    [0, 1, 2].map((j) => pm(run.c_hat[i][j], run.c_sigma[i][j], 3)).join("&nbsp;&nbsp;");
  const rows = [
    ["setup", `Θ = ${fmt(run.theta, 3)}, N = ${run.n_events}, seed = ${run.seed}, α = ${fmt(run.alpha, 2)}, ${run.resamples} resamples`],
    ["sampler efficiency", fmt(run.sampler_efficiency, 3)],
    ["B̂⁺, B̂⁻", `${vec(run.b_plus_hat)}, ${vec(run.b_minus_hat)}`],
    ["Ĉ (±1σ)", `${cRow(0)}<br>${cRow(1)}<br>${cRow(2)}`],
    ["projected to physical", run.projected ? "yes (estimate left the physical set)" : "no (already physical)"],
    ["m̂₁ + m̂₂", `${pm(run.m12_hat, run.m12_sigma)} (truth ${fmt(run.m12_true, 4)})`],
    ["68% interval", `[${fmt(run.m12_boot.p16, 4)}, ${fmt(run.m12_boot.p84, 4)}]`],
    ["nonlocality z", `${fmt(run.z_nonlocality, 2)} — certified (> 5): ${yesNo(run.z_nonlocality > 5)}`],
    ["concurrence", `${pm(run.concurrence_hat, run.concurrence_sigma)} (truth ${fmt(run.concurrence_true, 4)})`],
    ["entanglement z", `${fmt(run.z_entanglement, 2)} — certified (> 5): ${yesNo(run.z_entanglement > 5)}`],
    ["CHSH max", `${fmt(run.chsh_max_hat, 4)} — Tsirelson bound respected: ${yesNo(run.tsirelson_ok)}`],
  ];
  $("run-panel").innerHTML = `<table>${rows
    .map(([k, v]) => `<tr><th>${k}</th><td>${v}</td></tr>`)
    .join("")}</table>`;
}

// ---------------------------------------------------------------------------
// Event wiring
// ---------------------------------------------------------------------------

function refreshAnalysis() {
  try {
    state.analysis = call(analyze, Number($("theta").value));
    clearError();
  } catch (e) {
    showError(e.message);
    return;
  }
  renderAnalysis();
  drawCurves();
}

function runExperiment() {
  const btn = $("run");
  btn.disabled = true;
  btn.textContent = "running…";
  // Let the browser paint the disabled state before the synchronous wasm call.
  setTimeout(() => {
    try {
      const run = call(
        experiment,
        Number($("theta").value),
        numberInput("events"),
        numberInput("seed"),
        numberInput("alpha"),
        numberInput("resamples"),
      );
      state.runs.push(run);
      renderRun(run);
      drawScatter(run);
      drawCurves();
      clearError();
    } catch (e) {
      showError(e.message);
    } finally {
      btn.disabled = false;
      btn.textContent = "Run pseudo-experiment";
    }
  }, 30);
}

async function main() {
  await init();
  prepareCanvases();
  state.curves = call(scan, 361);
  $("theta").addEventListener("input", refreshAnalysis);
  $("run").addEventListener("click", runExperiment);
  $("clear").addEventListener("click", () => {
    state.runs = [];
    renderRun(null);
    drawScatter(null);
    drawCurves();
  });
  window.addEventListener("resize", () => {
    drawCurves();
    drawScatter(state.runs.at(-1) ?? null);
  });
  refreshAnalysis();
  drawScatter(null);
}

main().catch((e) => showError(`failed to start: ${e.message}`));
