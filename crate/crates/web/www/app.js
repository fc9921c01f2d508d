import init, { hyperbola, bootstrap, irs_forward } from "./pkg/cds_aoa_web.js";

const presets = {
  msft: "6m,60\n1y,65\n2y,75\n3y,85\n4y,62\n5y,89.53\n7y,45\n10y,33.55",
  aib: "6m,400\n1y,180\n2y,210\n3y,215\n4y,218\n5y,220\n7y,215\n10y,210",
  smooth: "6m,40\n1y,45\n2y,55\n3y,63\n4y,70\n5y,76\n7y,84\n10y,90",
};

const $ = (id) => document.getElementById(id);

function parseQuotes() {
  return $("quotes").value.trim().split(/\n+/).map((line) => {
    const [tenor, s] = line.split(",").map((x) => x.trim());
    return { tenor, spread_bp: Number(s) };
  });
}

function parseSwaps() {
  return $("swaps").value.trim().split(/\n+/).map((line) => line.split(",").map(Number));
}

function refreshAnchors() {
  const sel = $("anchor");
  const keep = sel.value;
  const tenors = parseQuotes().map((q) => q.tenor).slice(0, -1);
  sel.innerHTML = tenors.map((t) => `<option>${t}</option>`).join("");
  sel.value = tenors.includes(keep) ? keep : tenors.includes("5y") ? "5y" : tenors[0];
}

// Minimal axes; series are [{pts, color, kind: "line"|"dots"|"steps", right}].
function plot(canvas, series, labels) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, m = { l: 56, r: 56, t: 14, b: 34 };
  ctx.clearRect(0, 0, W, H);
  const all = (right) => series.filter((s) => !!s.right === right).flatMap((s) => s.pts);
  const xs = series.flatMap((s) => s.pts.map((p) => p[0]));
  const range = (v) => {
    let lo = Math.min(...v), hi = Math.max(...v);
    if (lo === hi) { lo -= 1; hi += 1; }
    const pad = 0.05 * (hi - lo);
    return [lo - pad, hi + pad];
  };
  const [x0, x1] = range(xs);
  const yl = range(all(false).map((p) => p[1]));
  const yr = all(true).length ? range(all(true).map((p) => p[1])) : null;
  const X = (x) => m.l + (x - x0) / (x1 - x0) * (W - m.l - m.r);
  const Y = (y, r) => { const [a, b] = r ? yr : yl; return H - m.b - (y - a) / (b - a) * (H - m.t - m.b); };

  ctx.strokeStyle = "#999"; ctx.fillStyle = "#444"; ctx.font = "11px sans-serif";
  ctx.beginPath(); ctx.moveTo(m.l, m.t); ctx.lineTo(m.l, H - m.b); ctx.lineTo(W - m.r, H - m.b); ctx.stroke();
  for (let i = 0; i <= 4; i++) {
    const x = x0 + (x1 - x0) * i / 4, y = yl[0] + (yl[1] - yl[0]) * i / 4;
    ctx.fillText(x.toPrecision(3), X(x) - 10, H - m.b + 14);
    ctx.fillText(y.toPrecision(3), 4, Y(y, false) + 4);
    if (yr) { const z = yr[0] + (yr[1] - yr[0]) * i / 4; ctx.fillText(z.toPrecision(3), W - m.r + 4, Y(z, true) + 4); }
  }
  ctx.fillText(labels.x, W / 2 - 20, H - 4);
  ctx.fillText(labels.y, m.l + 4, m.t + 10);

  for (const s of series) {
    ctx.strokeStyle = s.color; ctx.fillStyle = s.color; ctx.lineWidth = 2;
    if (s.kind === "dots") {
      for (const p of s.pts) {
        ctx.fillStyle = p[2] ? "#c00" : s.color;
        ctx.beginPath(); ctx.arc(X(p[0]), Y(p[1], s.right), 4, 0, 2 * Math.PI); ctx.fill();
      }
    } else if (s.kind === "steps") {
      let prev = s.start;
      for (const p of s.pts) {
        ctx.strokeStyle = p[2] ? "#c00" : s.color;
        ctx.beginPath(); ctx.moveTo(X(prev), Y(p[1])); ctx.lineTo(X(p[0]), Y(p[1])); ctx.stroke();
        prev = p[0];
      }
    } else {
      ctx.beginPath();
      s.pts.forEach((p, i) => (i ? ctx.lineTo : ctx.moveTo).call(ctx, X(p[0]), Y(p[1], s.right)));
      ctx.stroke();
    }
  }
  ctx.lineWidth = 1;
}

function runCurve() {
  const quotes = JSON.stringify(parseQuotes());
  const verdict = $("verdict");
  try {
    const h = JSON.parse(hyperbola(quotes, $("anchor").value, $("loglog").checked));
    plot($("hyperbola"), [
      { pts: h.boundary, color: "#888", kind: "line" },
      { pts: h.points, color: "#1f6fb4", kind: "dots" },
    ], { x: $("loglog").checked ? "ln(T - T0)" : "T - T0 (years)", y: $("loglog").checked ? "ln s" : "s (bp)" });
    const pairs = h.violated_pairs.map(([a, b]) => `${a}-${b}`);
    verdict.textContent = pairs.length ? `Violated pairs: ${pairs.join(", ")}` : "No violated pairs.";
    verdict.className = pairs.length ? "bad" : "";
  } catch (e) {
    verdict.textContent = String(e.message ?? e);
    verdict.className = "bad";
  }
  try {
    const hz = JSON.parse(bootstrap(quotes, Number($("rate").value), Number($("recovery").value)));
    plot($("hazards"), [
      { pts: hz.map((s) => [s.t_end, s.hazard, s.negative]), color: "#1f6fb4", kind: "steps", start: 0 },
      { pts: [[0, 0], [hz[hz.length - 1].t_end, 0]], color: "#bbb", kind: "line" },
    ], { x: "T (years)", y: "hazard" });
  } catch (e) {
    const ctx = $("hazards").getContext("2d");
    ctx.clearRect(0, 0, 520, 340);
    ctx.fillStyle = "#b00";
    ctx.fillText(String(e.message ?? e), 10, 20);
  }
}

function runIrs() {
  const msg = $("irs-msg");
  try {
    const rows = JSON.parse(irs_forward(JSON.stringify(parseSwaps()), 0, 0.05));
    plot($("forwards"), [
      { pts: rows.map((r) => [r.t, r.forward_bond]), color: "#1f6fb4", kind: "line" },
      { pts: rows.map((r) => [r.t, r.forward_rate]), color: "#e08a1e", kind: "line", right: true },
    ], { x: "T (years)", y: "F(T)" });
    const rising = rows.some((r, i) => i && r.forward_bond > rows[i - 1].forward_bond);
    msg.textContent = rising ? "Forward bond rises somewhere: negative forward rates." : "";
    msg.className = rising ? "bad" : "";
  } catch (e) {
    msg.textContent = String(e.message ?? e);
    msg.className = "bad";
  }
}

await init();
for (const b of document.querySelectorAll("[data-preset]")) {
  b.addEventListener("click", () => { $("quotes").value = presets[b.dataset.preset]; refreshAnchors(); runCurve(); });
}
$("quotes").addEventListener("change", refreshAnchors);
$("run").addEventListener("click", runCurve);
$("anchor").addEventListener("change", runCurve);
$("loglog").addEventListener("change", runCurve);
$("run-irs").addEventListener("click", runIrs);
$("quotes").value = presets.msft;
refreshAnchors();
runCurve();
runIrs();
