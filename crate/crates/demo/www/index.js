import init, { eh_curves, positivity_scan, solver_trace } from "../pkg/g2_demo.js";

const $ = (id) => document.getElementById(id);

function call(fn, ...args) {
  const out = JSON.parse(fn(...args));
  if (out.error) throw new Error(out.error);
  return out;
}

function plot(canvas, series, { logX = false, logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const tx = (x) => (logX ? Math.log10(x) : x);
  const ty = (y) => (logY ? Math.log10(y) : y);
  const pts = series.flatMap((s) => s.points).filter(([x, y]) => Number.isFinite(tx(x)) && Number.isFinite(ty(y)));
  if (!pts.length) return;
  const xs = pts.map(([x]) => tx(x));
  const ys = pts.map(([, y]) => ty(y));
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const px = (x) => 10 + ((tx(x) - x0) / (x1 - x0 || 1)) * (w - 20);
  const py = (y) => h - 10 - ((ty(y) - y0) / (y1 - y0 || 1)) * (h - 20);
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.fillStyle = s.color;
    ctx.beginPath();
    s.points.forEach(([x, y], i) => (i ? ctx.lineTo(px(x), py(y)) : ctx.moveTo(px(x), py(y))));
    if (s.dots) s.points.forEach(([x, y]) => ctx.fillRect(px(x) - 2, py(y) - 2, 4, 4));
    else ctx.stroke();
  }
}

function runEh() {
  const out = call(eh_curves, Number($("eh-s").value), Number($("eh-n").value));
  plot($("eh-plot"), [
    { color: "#1f77b4", points: out.rows.map((r) => [r.r, r.deviation]) },
    { color: "#ff7f0e", points: out.rows.map((r) => [r.r, r.gradient]) },
  ], { logX: true, logY: true });
}

function runPositivity() {
  const out = call(positivity_scan, $("pos-label").value, Number($("pos-min").value), Number($("pos-max").value), 121);
  plot($("pos-plot"), [
    { color: "#2ca02c", points: out.rows.filter((r) => r.positive).map((r) => [r.t, r.volume]) },
    { color: "#d62728", dots: true, points: out.rows.filter((r) => !r.positive).map((r) => [r.t, 0]) },
  ]);
}

function runSolver() {
  const out = call(solver_trace, Number($("ts-eps").value), $("ts-modes").value, Number($("ts-res").value));
  const rows = out.trace.filter((r) => r.residual > 0);
  plot($("ts-plot"), [{ color: "#9467bd", points: rows.map((r) => [r.iteration, r.residual]) }], { logY: true });
  $("ts-out").textContent = JSON.stringify({ converged: out.converged, final_residual: out.final_residual, trace: out.trace }, null, 1);
}

function guard(fn) {
  return () => {
    try {
      fn();
      $("status").textContent = "Ready.";
    } catch (e) {
      $("status").textContent = `Error: ${e.message}`;
    }
  };
}

await init();
$("eh-run").onclick = guard(runEh);
$("pos-run").onclick = guard(runPositivity);
$("ts-run").onclick = guard(runSolver);
guard(runEh)();
