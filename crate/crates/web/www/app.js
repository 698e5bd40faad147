import init, {
  planar_body,
  solve_planar,
  check_region,
  region_map,
  alpha_star_bound,
} from "./pkg/minklab_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

// p and q extent of the region map
const P = [-5, 3];
const Q = [-3, 5];

function show(el, value) {
  el.classList.toggle("err", Boolean(value.error));
  el.textContent = value.error ?? JSON.stringify(value, null, 2);
}

function drawCurves(canvas, curves) {
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const pts = curves.flatMap((c) => c.points);
  const extent = Math.max(...pts.map(([x, y]) => Math.max(Math.abs(x), Math.abs(y)))) * 1.1;
  const s = canvas.width / (2 * extent);
  const cx = canvas.width / 2;
  const cy = canvas.height / 2;
  ctx.strokeStyle = "#ccc";
  ctx.beginPath();
  ctx.moveTo(0, cy); ctx.lineTo(canvas.width, cy);
  ctx.moveTo(cx, 0); ctx.lineTo(cx, canvas.height);
  ctx.stroke();
  for (const c of curves) {
    ctx.strokeStyle = c.color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    c.points.forEach(([x, y], i) => {
      const px = cx + s * x;
      const py = cy - s * y;
      if (i === 0) ctx.moveTo(px, py); else ctx.lineTo(px, py);
    });
    ctx.closePath();
    ctx.stroke();
  }
}

function body() {
  const r = JSON.parse(planar_body($("b-kind").value, num("b-a"), num("b-b"), num("b-amp"), num("b-seed"), 256));
  if (!r.error) {
    drawCurves($("b-canvas"), [{ points: r.outline, color: "#1f6fb2" }]);
    const rho = r.curvature_radius;
    show($("b-out"), {
      roundness: r.roundness,
      center_offset: r.center,
      mean_radius: r.radius,
      min_curvature_radius: Math.min(...rho),
      max_curvature_radius: Math.max(...rho),
    });
  } else {
    show($("b-out"), r);
  }
}

function solve() {
  const r = JSON.parse(solve_planar(num("s-p"), num("s-q"), num("s-amp"), num("s-seed"), 128));
  if (!r.error) {
    drawCurves($("s-canvas"), [
      { points: r.initial, color: "#bbb" },
      { points: r.solution, color: "#c0392b" },
    ]);
    show($("s-out"), {
      converged: r.converged,
      iterations: r.iterations,
      residual: r.residual,
      roundness: r.roundness,
      center_offset: r.center,
      residual_history: r.history.map((h) => h.toExponential(2)),
    });
  } else {
    show($("s-out"), r);
  }
}

function drawMap() {
  const canvas = $("r-canvas");
  const ctx = canvas.getContext("2d");
  const cols = 160;
  const rows = 160;
  const m = JSON.parse(region_map($("r-id").value, num("r-n"), num("r-k"), P[0], P[1], Q[0], Q[1], cols, rows));
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (m.error) {
    show($("r-out"), m);
    return;
  }
  const w = canvas.width / cols;
  const h = canvas.height / rows;
  ctx.fillStyle = "#9bd3ae";
  for (let j = 0; j < rows; j++) {
    for (let i = 0; i < cols; i++) {
      if (m.bits[j * cols + i] === "1") ctx.fillRect(i * w, j * h, w + 0.5, h + 0.5);
    }
  }
  const x0 = ((0 - P[0]) / (P[1] - P[0])) * canvas.width;
  const y0 = ((Q[1] - 0) / (Q[1] - Q[0])) * canvas.height;
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.moveTo(x0, 0); ctx.lineTo(x0, canvas.height);
  ctx.moveTo(0, y0); ctx.lineTo(canvas.width, y0);
  ctx.stroke();
  const px = ((num("r-p") - P[0]) / (P[1] - P[0])) * canvas.width;
  const py = ((Q[1] - num("r-q")) / (Q[1] - Q[0])) * canvas.height;
  ctx.fillStyle = "#c0392b";
  ctx.beginPath();
  ctx.arc(px, py, 4, 0, 2 * Math.PI);
  ctx.fill();
}

function region() {
  drawMap();
  const id = $("r-id").value;
  const v = JSON.parse(check_region(id, num("r-n"), num("r-k"), num("r-p"), num("r-q")));
  if (!v.error && id === "corA") {
    const a = JSON.parse(alpha_star_bound(num("r-n"), num("r-k"), num("r-p")));
    if (!a.error) Object.assign(v, a);
  }
  show($("r-out"), v);
}

$("r-canvas").addEventListener("click", (e) => {
  const rect = e.target.getBoundingClientRect();
  const p = P[0] + ((e.clientX - rect.left) / rect.width) * (P[1] - P[0]);
  const q = Q[1] - ((e.clientY - rect.top) / rect.height) * (Q[1] - Q[0]);
  $("r-p").value = p.toFixed(3);
  $("r-q").value = q.toFixed(3);
  region();
});

await init();
$("status").textContent = "Ready. All computation runs locally in WebAssembly.";
$("b-go").addEventListener("click", body);
$("s-go").addEventListener("click", solve);
$("r-go").addEventListener("click", region);
for (const id of ["r-id", "r-n", "r-k"]) $(id).addEventListener("change", region);
body();
solve();
region();
