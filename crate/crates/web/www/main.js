import init, { builtinProfile, curves, planLocal, planSplit } from "./pkg/dvfs_web.js";

const $ = (id) => document.getElementById(id);
const fmt = (x, d = 3) => Number(x).toPrecision(d);

let profile = "";

function baselineGhz() {
  return $("baseline").checked ? Number($("baselineGhz").value) : undefined;
}

function guard(fn) {
  try {
    $("error").textContent = "";
    fn();
  } catch (e) {
    $("error").textContent = String(e.message ?? e);
  }
}

function axes(ctx, w, h, pad, xr, yr, xlabel, ylabel) {
  ctx.strokeStyle = "#888";
  ctx.fillStyle = "#444";
  ctx.font = "11px system-ui";
  ctx.strokeRect(pad, pad / 2, w - 1.5 * pad, h - 1.5 * pad);
  ctx.fillText(xlabel, w / 2, h - 4);
  ctx.save();
  ctx.translate(10, h / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(ylabel, 0, 0);
  ctx.restore();
  ctx.fillText(fmt(xr[0]), pad, h - pad + 14);
  ctx.fillText(fmt(xr[1]), w - pad, h - pad + 14);
  ctx.fillText(fmt(yr[1]), 14, pad / 2 + 10);
  ctx.fillText(fmt(yr[0]), 14, h - pad);
}

function line(ctx, xs, ys, sx, sy, color, dash = []) {
  ctx.strokeStyle = color;
  ctx.setLineDash(dash);
  ctx.beginPath();
  xs.forEach((x, i) => (i ? ctx.lineTo(sx(x), sy(ys[i])) : ctx.moveTo(sx(x), sy(ys[i]))));
  ctx.stroke();
  ctx.setLineDash([]);
}

function drawCurves(c) {
  const canvas = $("curves");
  const ctx = canvas.getContext("2d");
  const [w, h, pad] = [canvas.width / 2 - 10, canvas.height, 40];
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const xr = [c.freq_ghz[0], c.freq_ghz[c.freq_ghz.length - 1]];
  const panels = [
    ["latency (ms)", c.power_law_ms, c.cpu_dvfs_ms],
    ["energy (J)", c.energy_j, c.cpu_dvfs_energy_j],
  ];
  panels.forEach(([label, truth, base], k) => {
    ctx.save();
    ctx.translate(k * (w + 20), 0);
    const all = truth.concat(base ?? []);
    const yr = [0, Math.max(...all)];
    const sx = (x) => pad + ((x - xr[0]) / (xr[1] - xr[0])) * (w - 1.5 * pad);
    const sy = (y) => h - pad - ((y - yr[0]) / (yr[1] - yr[0])) * (h - 1.5 * pad);
    axes(ctx, w, h, pad, xr, yr, "GPU frequency (GHz)", label);
    ctx.fillStyle = "#ccc";
    c.scale_ghz.forEach((f) => ctx.fillRect(sx(f), h - pad - 4, 1, 4));
    line(ctx, c.freq_ghz, truth, sx, sy, "#1f5fbf");
    if (base) line(ctx, c.freq_ghz, base, sx, sy, "#d0501f", [5, 4]);
    ctx.restore();
  });
  ctx.fillStyle = "#1f5fbf";
  ctx.fillText("power-law", canvas.width - 170, 20);
  ctx.fillStyle = "#d0501f";
  if (c.cpu_dvfs_ms) ctx.fillText("inverse-frequency baseline", canvas.width - 170, 34);
}

function table(headers, rows, chosen) {
  const head = "<tr>" + headers.map((h) => `<th>${h}</th>`).join("") + "</tr>";
  const body = rows
    .map((r, i) => `<tr class="${i === chosen ? "chosen" : ""}">` + r.map((v) => `<td>${v}</td>`).join("") + "</tr>")
    .join("");
  return `<table>${head}${body}</table>`;
}

function refreshCurves() {
  guard(() => drawCurves(JSON.parse(curves(profile, baselineGhz()))));
}

function refreshLocal() {
  const objective = $("objective").value;
  const raw = Number($("limit").value);
  const limit = objective === "deadline" ? raw : raw / 1000;
  $("limitOut").textContent = objective === "deadline" ? `${raw} ms` : `${raw} mJ`;
  guard(() => {
    const r = JSON.parse(planLocal(profile, objective, limit, $("model").value, baselineGhz()));
    const t = r.truth;
    const verdict = t.deadline_met ? '<span class="ok">constraint met</span>' : '<span class="bad">constraint missed</span>';
    $("localOut").innerHTML =
      `<p>${r.feasible ? "Feasible" : "Infeasible (best effort)"}: ${r.frequency_ghz} GHz, ` +
      `predicted ${fmt(r.predicted_latency_ms, 4)} ms / ${fmt(r.predicted_energy_j * 1000, 4)} mJ; ` +
      `under the power-law model ${fmt(t.actual_latency_ms, 4)} ms / ${fmt(t.actual_energy_j * 1000, 4)} mJ, ${verdict}.</p>`;
  });
}

function drawSplit(r) {
  const canvas = $("split");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const rows = r.candidates.filter((c) => c.frequency_ghz === r.frequency_ghz);
  const [w, h, pad] = [canvas.width, canvas.height, 40];
  const maxE = Math.max(...rows.map((c) => c.energy_j));
  const bw = (w - 2 * pad) / rows.length;
  axes(ctx, w, h, pad, [0, rows.length - 1], [0, maxE], "partition point m (blocks run on device)", "energy (J)");
  rows.forEach((c, i) => {
    const b = c.breakdown;
    const x = pad + i * bw + 4;
    const scale = (h - 1.5 * pad) / maxE;
    const hc = b.compute_energy_j * scale;
    const ht = b.transmit_energy_j * scale;
    ctx.fillStyle = c.feasible ? "#1f5fbf" : "#9bb0d0";
    ctx.fillRect(x, h - pad - hc, bw - 8, hc);
    ctx.fillStyle = c.feasible ? "#d0501f" : "#e0b09b";
    ctx.fillRect(x, h - pad - hc - ht, bw - 8, ht);
    ctx.fillStyle = "#222";
    ctx.fillText(String(c.partition === "local" ? "local" : c.partition), x + bw / 2 - 8, h - pad + 14);
    if (c.partition === r.partition) ctx.fillText("▼", x + bw / 2 - 8, h - pad - hc - ht - 4);
  });
}

function refreshSplit() {
  const rate = Math.pow(10, Number($("rate").value));
  const deadline = Number($("splitDeadline").value);
  $("rateOut").textContent = `${fmt(rate)} Mbps`;
  $("splitDeadlineOut").textContent = `${deadline} ms`;
  guard(() => {
    let r;
    try {
      r = JSON.parse(planSplit(profile, Number($("edgeMs").value), rate, deadline, $("joint").checked));
    } catch (e) {
      $("split").getContext("2d").clearRect(0, 0, 920, 260);
      $("splitOut").textContent = "";
      throw e;
    }
    drawSplit(r);
    const rows = r.candidates
      .filter((c) => c.frequency_ghz === r.frequency_ghz)
      .map((c) => [
        c.partition,
        fmt(c.breakdown.device_ms, 4),
        fmt(c.breakdown.upload_ms, 4),
        fmt(c.breakdown.edge_ms, 4),
        fmt(c.latency_ms, 4),
        fmt(c.energy_j * 1000, 4),
        c.feasible ? "yes" : "no",
      ]);
    const chosen = rows.findIndex((row) => row[0] === r.partition);
    $("splitOut").innerHTML =
      `<p>${r.feasible ? "Feasible" : "Infeasible (best effort)"}: m = ${r.partition} at ${r.frequency_ghz} GHz, ` +
      `${fmt(r.predicted_latency_ms, 4)} ms, ${fmt(r.predicted_energy_j * 1000, 4)} mJ.</p>` +
      table(["m", "device ms", "upload ms", "edge ms", "total ms", "energy mJ", "feasible"], rows, chosen);
  });
}

function refreshAll() {
  refreshCurves();
  refreshLocal();
  refreshSplit();
}

async function main() {
  await init();
  const load = () => {
    profile = builtinProfile($("profile").value);
    refreshAll();
  };
  $("profile").addEventListener("change", load);
  for (const id of ["baseline", "baselineGhz"]) $(id).addEventListener("input", () => (refreshCurves(), refreshLocal()));
  for (const id of ["objective", "limit", "model"]) $(id).addEventListener("input", refreshLocal);
  for (const id of ["rate", "splitDeadline", "edgeMs", "joint"]) $(id).addEventListener("input", refreshSplit);
  load();
}

main();
