import init, { point_cloud, search, tomography } from "./pkg/sympovm_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

function report(id, text, isError = false) {
  const el = $(id);
  el.textContent = text;
  el.classList.toggle("err", isError);
}

function clear(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  return ctx;
}

// Orthographic view of the first two (or, rotated, three) span coordinates.
function drawCloud(data, angle) {
  const canvas = $("c-canvas");
  const ctx = clear(canvas);
  const project = (p) => {
    const x = p[0] ?? 0, y = p[1] ?? 0, z = p[2] ?? 0;
    return [x * Math.cos(angle) + z * Math.sin(angle), y];
  };
  const all = data.vertices.map(project);
  const extent = Math.max(...all.flat().map(Math.abs), 1e-9) * 1.1;
  const s = (canvas.width / 2) / extent;
  const cx = canvas.width / 2, cy = canvas.height / 2;
  const at = ([x, y]) => [cx + x * s, cy - y * s];

  ctx.strokeStyle = "#999";
  for (let i = 0; i < all.length; i++) {
    for (let j = i + 1; j < all.length; j++) {
      const [x1, y1] = at(all[i]), [x2, y2] = at(all[j]);
      ctx.beginPath(); ctx.moveTo(x1, y1); ctx.lineTo(x2, y2); ctx.stroke();
    }
  }
  ctx.fillStyle = "rgba(31,119,180,0.35)";
  for (const p of data.points) {
    const [x, y] = at(project(p));
    ctx.fillRect(x - 1, y - 1, 2, 2);
  }
  ctx.fillStyle = "#000";
  all.forEach((v, i) => {
    const [x, y] = at(v);
    ctx.beginPath(); ctx.arc(x, y, 3.5, 0, 2 * Math.PI); ctx.fill();
    ctx.fillText(`${i + 1}`, x + 5, y - 5);
  });
}

let cloud = null;
let spin = null;

function runCloud() {
  try {
    cloud = JSON.parse(point_cloud(num("c-dim"), num("c-n"), num("c-kappa"), num("c-purity"), num("c-samples"), num("c-seed")));
    report("c-out", `${cloud.points.length} points in a ${cloud.count - 1}-dimensional span; max |v - kappa b_par| = ${cloud.residual.toExponential(2)}`);
    if (spin) cancelAnimationFrame(spin);
    const t0 = performance.now();
    const frame = (t) => {
      drawCloud(cloud, cloud.vertices[0].length > 2 ? (t - t0) / 4000 : 0);
      if (cloud.vertices[0].length > 2) spin = requestAnimationFrame(frame);
    };
    spin = requestAnimationFrame(frame);
  } catch (e) {
    report("c-out", String(e.message ?? e), true);
  }
}

function plotAxes(ctx, canvas, xmin, xmax, ymin, ymax, logx) {
  const pad = 40;
  const fx = (x) => pad + ((logx ? Math.log10(x) : x) - xmin) / (xmax - xmin) * (canvas.width - 2 * pad);
  const fy = (y) => canvas.height - pad - (y - ymin) / (ymax - ymin) * (canvas.height - 2 * pad);
  ctx.strokeStyle = "#888";
  ctx.strokeRect(pad, pad, canvas.width - 2 * pad, canvas.height - 2 * pad);
  ctx.fillStyle = "#444";
  ctx.fillText(ymax.toPrecision(3), 2, pad + 4);
  ctx.fillText(ymin.toPrecision(3), 2, canvas.height - pad);
  return [fx, fy];
}

function runSearch() {
  try {
    const res = JSON.parse(search(num("s-dim"), num("s-n"), num("s-restarts"), num("s-iters"), num("s-seed")));
    const canvas = $("s-canvas");
    const ctx = clear(canvas);
    const iters = Math.max(1, ...res.traces.flat().map((p) => p[0]));
    const ymin = Math.min(res.floor, ...res.traces.flat().map((p) => p[1]));
    const [fx, fy] = plotAxes(ctx, canvas, 0, iters, ymin, 1, false);
    res.traces.forEach((trace, r) => {
      ctx.strokeStyle = COLORS[r % COLORS.length];
      ctx.beginPath();
      trace.forEach(([it, k], i) => (i ? ctx.lineTo(fx(it), fy(k)) : ctx.moveTo(fx(it), fy(k))));
      ctx.lineTo(fx(iters), fy(trace[trace.length - 1][1]));
      ctx.stroke();
    });
    ctx.setLineDash([4, 4]);
    ctx.strokeStyle = "#000";
    ctx.beginPath(); ctx.moveTo(fx(0), fy(res.floor)); ctx.lineTo(fx(iters), fy(res.floor)); ctx.stroke();
    ctx.setLineDash([]);
    report("s-out", `best kappa ${res.best_kappa.toFixed(6)} (restart ${res.best_restart}), floor 1/(d-1) = ${res.floor.toFixed(4)}, certified: ${res.certified}`);
  } catch (e) {
    report("s-out", String(e.message ?? e), true);
  }
}

function runTomo() {
  try {
    const shots = new Uint32Array([100, 300, 1000, 3000, 10000, 30000, 100000]);
    const res = JSON.parse(tomography(num("t-kappa"), shots, num("t-trials"), num("t-seed")));
    const canvas = $("t-canvas");
    const ctx = clear(canvas);
    const pts = res.points;
    const ys = pts.map((p) => Math.log10(p.mean_error));
    const [fx, fy] = plotAxes(ctx, canvas, 2, 5, Math.min(...ys) - 0.1, Math.max(...ys) + 0.1, true);
    ctx.strokeStyle = COLORS[0];
    ctx.beginPath();
    pts.forEach((p, i) => (i ? ctx.lineTo(fx(p.shots), fy(ys[i])) : ctx.moveTo(fx(p.shots), fy(ys[i]))));
    ctx.stroke();
    ctx.fillStyle = COLORS[0];
    pts.forEach((p, i) => { ctx.beginPath(); ctx.arc(fx(p.shots), fy(ys[i]), 3, 0, 2 * Math.PI); ctx.fill(); });
    const slope = (ys[ys.length - 1] - ys[0]) / (Math.log10(pts[pts.length - 1].shots) - Math.log10(pts[0].shots));
    report("t-out", pts.map((p) => `${p.shots}\t${p.mean_error.toExponential(3)} ± ${p.std_error.toExponential(2)}`).join("\n")
      + `\nlog-log slope ${slope.toFixed(3)} (shot-noise limit -0.5)`);
  } catch (e) {
    report("t-out", String(e.message ?? e), true);
  }
}

await init();
$("c-run").addEventListener("click", runCloud);
$("s-run").addEventListener("click", runSearch);
$("t-run").addEventListener("click", runTomo);
runCloud();
