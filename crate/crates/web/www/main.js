import init, { Demo } from "./pkg/mg_opcon_web.js";

const COLORS = { thermal: "#c0392b", storage: "#2980b9", wind: "#27ae60", pv: "#f39c12", total: "#222" };
const $ = (id) => document.getElementById(id);

function value(id) {
  const el = $(id);
  el.nextElementSibling.textContent = Number(el.value).toFixed(2);
  return Number(el.value);
}

// Axis-scaled polyline plot; `series` is [{color, xs, ys, dash}].
function plot(canvas, series, xlabel) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 36;
  ctx.clearRect(0, 0, w, h);
  const xs = series.flatMap((s) => s.xs), ys = series.flatMap((s) => s.ys);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y1 - y0 < 1e-9) { y0 -= 1; y1 += 1; }
  const sx = (x) => pad + ((x - x0) / (x1 - x0)) * (w - 2 * pad);
  const sy = (y) => h - pad - ((y - y0) / (y1 - y0)) * (h - 2 * pad);

  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.setLineDash([]);
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2); ctx.lineTo(pad, h - pad); ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
  ctx.fillText(y1.toFixed(2), 2, sy(y1) + 4);
  ctx.fillText(y0.toFixed(2), 2, sy(y0));
  ctx.fillText(x0.toFixed(1), sx(x0), h - pad + 14);
  ctx.fillText(x1.toFixed(1), sx(x1) - 20, h - pad + 14);
  ctx.fillText(xlabel, w / 2, h - 6);

  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = s.width ?? 1.5;
    ctx.setLineDash(s.dash ?? []);
    ctx.beginPath();
    s.xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(s.ys[i])) : ctx.moveTo(sx(x), sy(s.ys[i]))));
    ctx.stroke();
  }
  return { sx, sy };
}

function renderBalance(b) {
  const d = b.dispatch;
  const rows = [
    ["rho", d.rho],
    ["thermal", d.p_t[0], d.saturated.thermal[0]],
    ["storage", d.p_s[0], d.saturated.storage[0]],
    ["wind", d.p_r[0], d.saturated.renewable[0]],
    ["pv", d.p_r[1], d.saturated.renewable[1]],
    ["next x", b.next_x],
    ["load range", `${b.feasible[0].toFixed(3)} .. ${b.feasible[1].toFixed(3)}`],
  ];
  $("balance").innerHTML = rows
    .map(([k, v, s]) => `<tr><th>${k}</th><td>${typeof v === "number" ? v.toFixed(4) : v}</td><td>${s ?? ""}</td></tr>`)
    .join("");
}

function update(demo) {
  const [x, wind, pv, load] = ["x", "wind", "pv", "load"].map(value);
  $("error").textContent = "";
  const curves = JSON.parse(demo.droopCurves(x, wind, pv, load, -3, 3, 601));
  const series = curves.units.map((u) => ({ color: COLORS[u.name], xs: curves.rho, ys: u.power }));
  series.push({ color: COLORS.total, xs: curves.rho, ys: curves.total, width: 2.5 });
  series.push({ color: "#888", xs: [curves.rho[0], curves.rho.at(-1)], ys: [load, load], dash: [4, 4] });
  const { sx, sy } = plot($("curves"), series, "rho");
  try {
    const b = JSON.parse(demo.dispatchAt(x, wind, pv, load));
    renderBalance(b);
    const ctx = $("curves").getContext("2d");
    ctx.fillStyle = COLORS.total;
    ctx.beginPath();
    ctx.arc(sx(b.dispatch.rho), sy(load), 4, 0, 2 * Math.PI);
    ctx.fill();
  } catch (e) {
    $("balance").innerHTML = "";
    $("error").textContent = e.message ?? String(e);
  }
}

function updateProfile(demo) {
  const p = JSON.parse(demo.scenarioProfile(value("alpha")));
  plot($("profile"), [
    { color: "#888", xs: p.hour, ys: p.lower, dash: [4, 4] },
    { color: "#888", xs: p.hour, ys: p.upper, dash: [4, 4] },
    { color: COLORS.thermal, xs: p.hour, ys: p.scenario, width: 2 },
  ], "hour");
}

await init();
const demo = new Demo();
for (const id of ["x", "wind", "pv", "load"]) $(id).addEventListener("input", () => update(demo));
$("alpha").addEventListener("input", () => updateProfile(demo));
update(demo);
updateProfile(demo);
