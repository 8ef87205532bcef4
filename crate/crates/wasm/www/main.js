// Built by `wasm-pack build --target web --out-dir www/pkg` from crates/wasm.
import init, { groundStateProfile, classify, Evolution } from "./pkg/gnls_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => parseFloat($(id).value);

function plot(canvas, xs, ys, color) {
  const ctx = canvas.getContext("2d");
  const w = canvas.width, h = canvas.height, pad = 20;
  ctx.clearRect(0, 0, w, h);
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  const y1 = Math.max(1e-12, ...ys);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, h - pad);
  ctx.lineTo(w - pad, h - pad);
  ctx.stroke();
  ctx.strokeStyle = color;
  ctx.beginPath();
  xs.forEach((x, i) => {
    const px = pad + (x - x0) / (x1 - x0) * (w - 2 * pad);
    const py = h - pad - ys[i] / y1 * (h - 2 * pad);
    if (i === 0) ctx.moveTo(px, py); else ctx.lineTo(px, py);
  });
  ctx.stroke();
  ctx.fillStyle = "#444";
  ctx.fillText(`max ${y1.toPrecision(4)}`, pad, 12);
}

function groundState() {
  const dim = parseInt($("gs-dim").value, 10);
  try {
    const prof = groundStateProfile(dim, num("gs-p"), num("gs-omega"), 10 / Math.sqrt(num("gs-omega")), 400);
    plot($("gs-plot"), Array.from(prof.radii), Array.from(prof.values), "#1565c0");
    $("gs-out").textContent = `S_omega(Q) = ${prof.action.toFixed(10)}\nK(Q) = ${prof.virial.toExponential(3)}`;
  } catch (e) {
    $("gs-out").textContent = `error: ${e.message ?? e}`;
  }
}

function runClassify() {
  try {
    const c = classify(num("cl-p"), $("cl-shape").value, num("cl-a"), num("cl-sep"), $("cl-odd").checked);
    $("cl-out").textContent = [
      `prediction: ${c.prediction}`,
      `S_omega = ${c.action.toFixed(8)}`,
      `K = ${c.virial.toExponential(4)}`,
      `l_omega = ${c.groundLevel.toFixed(8)}`,
      `threshold = ${c.threshold.toFixed(8)}`,
    ].join("\n");
  } catch (e) {
    $("cl-out").textContent = `error: ${e.message ?? e}`;
  }
}

let run = null;
let frame = 0;

function tick() {
  if (!run) return;
  try {
    run.advance(20);
  } catch (e) {
    $("ev-out").textContent = `stopped: ${e.message ?? e}`;
    run = null;
    return;
  }
  plot($("ev-plot"), Array.from(run.positions()), Array.from(run.modulus()), "#c62828");
  $("ev-out").textContent =
    `t = ${run.time.toFixed(4)}   S_omega = ${run.action.toFixed(8)}   K = ${run.virial.toExponential(3)}   ` +
    `|grad u(t)| / |grad u(0)| = ${run.gradientRatio.toFixed(3)}`;
  if (run.gradientRatio > 10) {
    $("ev-out").textContent += "\ngradient grew tenfold: blow-up like";
    run = null;
    return;
  }
  frame = requestAnimationFrame(tick);
}

function startEvolution() {
  cancelAnimationFrame(frame);
  try {
    run = new Evolution(num("cl-p"), $("cl-shape").value, num("cl-a"), num("cl-sep"));
  } catch (e) {
    $("ev-out").textContent = `error: ${e.message ?? e}`;
    return;
  }
  frame = requestAnimationFrame(tick);
}

await init();
$("gs-run").onclick = groundState;
$("cl-run").onclick = runClassify;
$("ev-start").onclick = startEvolution;
$("ev-stop").onclick = () => { run = null; };
groundState();
