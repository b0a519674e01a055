import init, { doubleSlit, sternGerlach, spinField } from "./pkg/entraj_web.js";

const $ = (id) => document.getElementById(id);

function extent(values) {
  let lo = Infinity, hi = -Infinity;
  for (const v of values) if (Number.isFinite(v)) { lo = Math.min(lo, v); hi = Math.max(hi, v); }
  return hi > lo ? [lo, hi] : [lo - 1, lo + 1];
}

function clear(canvas) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  return ctx;
}

// Trajectories with x along the horizontal axis.
function drawPaths(canvas, view) {
  const ctx = clear(canvas);
  const [ylo, yhi] = extent(view.paths.flatMap((p) => p.transverse).concat(view.edges));
  const W = canvas.width, H = canvas.height;
  const px = (x) => (x / view.screen_x) * W;
  const py = (y) => H - ((y - ylo) / (yhi - ylo)) * H;
  ctx.strokeStyle = "rgba(30, 70, 160, 0.5)";
  for (const p of view.paths) {
    ctx.beginPath();
    p.x.forEach((x, i) => (i ? ctx.lineTo(px(x), py(p.transverse[i])) : ctx.moveTo(px(x), py(p.transverse[i]))));
    ctx.stroke();
  }
}

// Screen histogram as a density, with the theoretical density on top.
function drawHistogram(canvas, view) {
  const ctx = clear(canvas);
  const W = canvas.width, H = canvas.height;
  const total = view.counts.reduce((a, b) => a + b, 0) || 1;
  const dens = view.counts.map((c, i) => c / total / (view.edges[i + 1] - view.edges[i]));
  const ymax = Math.max(...dens, ...view.theory_density) || 1;
  const [lo, hi] = [view.edges[0], view.edges[view.edges.length - 1]];
  const py = (y) => H - ((y - lo) / (hi - lo)) * H;
  const px = (d) => (d / ymax) * (W - 10);
  ctx.fillStyle = "rgba(30, 70, 160, 0.45)";
  dens.forEach((d, i) => {
    const top = py(view.edges[i + 1]);
    ctx.fillRect(0, top, px(d), py(view.edges[i]) - top);
  });
  ctx.strokeStyle = "#c03020";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  view.theory_y.forEach((y, i) => (i ? ctx.lineTo(px(view.theory_density[i]), py(y)) : ctx.moveTo(px(view.theory_density[i]), py(y))));
  ctx.stroke();
}

const fmt = (v, d = 4) => (v == null ? "n/a" : v.toFixed(d));

function run(button, fn) {
  button.disabled = true;
  // Let the button repaint before the synchronous computation.
  setTimeout(() => {
    try { fn(); } catch (e) { alert(e); } finally { button.disabled = false; }
  }, 10);
}

function runDoubleSlit() {
  const view = JSON.parse(doubleSlit(+$("ds-n").value, +$("ds-eta").value, $("ds-osm").checked, +$("ds-seed").value));
  drawPaths($("ds-paths"), view);
  drawHistogram($("ds-hist"), view);
  $("ds-out").textContent = `hits ${view.hits.length}  failures ${view.failures}  KS ${fmt(view.ks)}  L1 ${fmt(view.l1)}`;
}

function runSternGerlach() {
  const view = JSON.parse(sternGerlach(+$("sg-n").value, +$("sg-theta").value, +$("sg-eta").value, +$("sg-seed").value));
  drawPaths($("sg-paths"), view);
  drawHistogram($("sg-hist"), view);
  $("sg-out").textContent =
    `hits ${view.hits.length}  up fraction ${fmt(view.up_fraction, 3)}  expected ${fmt(view.expected_up_fraction, 3)}  KS ${fmt(view.ks)}`;
}

function tiltColour(tilt) {
  if (tilt == null) return [255, 255, 255];
  const s = Math.abs(tilt) / Math.PI; // 0 up, 1 down
  return [Math.round(40 + 200 * s), 60, Math.round(240 - 200 * s)];
}

function runSpinField() {
  const canvas = $("sf-map");
  const nz = 120, nt = 200;
  const view = JSON.parse(spinField(+$("sf-theta").value, nz, nt));
  const ctx = canvas.getContext("2d");
  const img = ctx.createImageData(nt, nz);
  for (let it = 0; it < nt; it++) {
    for (let iz = 0; iz < nz; iz++) {
      const [r, g, b] = tiltColour(view.tilt[it * nz + iz]);
      const k = 4 * ((nz - 1 - iz) * nt + it);
      img.data.set([r, g, b, 255], k);
    }
  }
  const off = new OffscreenCanvas(nt, nz);
  off.getContext("2d").putImageData(img, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.drawImage(off, 0, 0, canvas.width, canvas.height);
}

for (const id of ["sg-theta", "sf-theta"]) {
  const show = () => ($(`${id}-v`).textContent = (+$(id).value).toFixed(2));
  $(id).addEventListener("input", show);
  show();
}

await init();
$("ds-run").onclick = () => run($("ds-run"), runDoubleSlit);
$("sg-run").onclick = () => run($("sg-run"), runSternGerlach);
$("sf-run").onclick = () => run($("sf-run"), runSpinField);
$("sf-theta").addEventListener("change", runSpinField);
runSpinField();
