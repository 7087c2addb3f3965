import init, { pilotLengthSweep, antennaSweep, lemmaScatter } from "./pkg/fddjam_web.js";

const COLORS = ["#1f77b4", "#ff7f0e", "#d62728", "#2ca02c", "#9467bd"];
const DASHED = [false, false, false, true, true];

function readControls(section) {
  const values = {};
  for (const input of section.querySelectorAll("input")) {
    if (input.type === "checkbox") values[input.name] = input.checked;
    else values[input.name] = Number(input.value);
    const out = input.parentElement.querySelector("output");
    if (out) out.textContent = input.value;
  }
  return values;
}

function prepareCanvas(canvas) {
  const dpr = window.devicePixelRatio || 1;
  const w = canvas.clientWidth, h = canvas.clientHeight;
  canvas.width = w * dpr;
  canvas.height = h * dpr;
  const ctx = canvas.getContext("2d");
  ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
  ctx.clearRect(0, 0, w, h);
  return { ctx, w, h };
}

function axes(ctx, w, h, xr, yr, xlabel, ylabel) {
  const pad = { l: 52, r: 12, t: 10, b: 38 };
  const sx = (x) => pad.l + ((x - xr[0]) / (xr[1] - xr[0] || 1)) * (w - pad.l - pad.r);
  const sy = (y) => h - pad.b - ((y - yr[0]) / (yr[1] - yr[0] || 1)) * (h - pad.t - pad.b);
  ctx.strokeStyle = "#999";
  ctx.fillStyle = "#444";
  ctx.font = "11px system-ui";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(pad.l, pad.t);
  ctx.lineTo(pad.l, h - pad.b);
  ctx.lineTo(w - pad.r, h - pad.b);
  ctx.stroke();
  for (let i = 0; i <= 5; i++) {
    const x = xr[0] + (i / 5) * (xr[1] - xr[0]);
    const y = yr[0] + (i / 5) * (yr[1] - yr[0]);
    ctx.textAlign = "center";
    ctx.fillText(x.toFixed(xr[1] - xr[0] < 10 ? 2 : 0), sx(x), h - pad.b + 14);
    ctx.textAlign = "right";
    ctx.fillText(y.toFixed(2), pad.l - 4, sy(y) + 4);
  }
  ctx.textAlign = "center";
  ctx.fillText(xlabel, (pad.l + w - pad.r) / 2, h - 6);
  ctx.save();
  ctx.translate(12, (pad.t + h - pad.b) / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(ylabel, 0, 0);
  ctx.restore();
  return { sx, sy };
}

function plotSweep(canvas, sweep) {
  const { ctx, w, h } = prepareCanvas(canvas);
  const xr = [sweep.axis[0], sweep.axis[sweep.axis.length - 1]];
  const { sx, sy } = axes(ctx, w, h, xr, [0, 1], sweep.axis_label, "MSE");
  sweep.curves.forEach((curve, k) => {
    ctx.strokeStyle = COLORS[k % COLORS.length];
    ctx.setLineDash(DASHED[k] ? [6, 4] : []);
    ctx.lineWidth = 2;
    ctx.beginPath();
    curve.values.forEach((v, i) => {
      const x = sx(sweep.axis[i]), y = sy(v);
      if (i === 0) ctx.moveTo(x, y); else ctx.lineTo(x, y);
    });
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.fillStyle = COLORS[k % COLORS.length];
    ctx.textAlign = "left";
    ctx.fillText(curve.label, w - 250, 20 + 14 * k);
  });
}

function plotScatter(canvas, data) {
  const { ctx, w, h } = prepareCanvas(canvas);
  const pts = data.random.concat([data.optimal]);
  const xs = pts.map((p) => p[0]), ys = pts.map((p) => p[1]);
  const xr = [Math.min(...xs), Math.max(...xs, data.top_eigenvalue_sum)];
  const pad = (a, b) => (b - a) * 0.05 || 0.01;
  const yr = [Math.min(...ys) - pad(Math.min(...ys), Math.max(...ys)), Math.max(...ys) + pad(Math.min(...ys), Math.max(...ys))];
  const { sx, sy } = axes(ctx, w, h, [xr[0], xr[1] + pad(...xr)], yr, "tr(ZᴴR_gZ)", "MSE");
  ctx.fillStyle = "rgba(31,119,180,0.35)";
  for (const [x, y] of data.random) ctx.fillRect(sx(x) - 1.5, sy(y) - 1.5, 3, 3);
  ctx.strokeStyle = "#888";
  ctx.setLineDash([4, 4]);
  ctx.beginPath();
  ctx.moveTo(sx(data.top_eigenvalue_sum), sy(yr[0]));
  ctx.lineTo(sx(data.top_eigenvalue_sum), sy(yr[1]));
  ctx.stroke();
  ctx.setLineDash([]);
  ctx.fillStyle = "#d62728";
  ctx.beginPath();
  ctx.arc(sx(data.optimal[0]), sy(data.optimal[1]), 5, 0, 2 * Math.PI);
  ctx.fill();
}

function wire(id, run) {
  const section = document.getElementById(id);
  const status = section.querySelector(".status");
  const canvas = section.querySelector("canvas");
  const update = () => {
    status.className = "status";
    status.textContent = "computing…";
    setTimeout(compute, 0);
  };
  const compute = () => {
    const p = readControls(section);
    const t0 = performance.now();
    try {
      const msg = run(canvas, p);
      status.className = "status";
      status.textContent = `${msg} (${(performance.now() - t0).toFixed(0)} ms)`;
    } catch (e) {
      status.className = "status error";
      status.textContent = String(e.message || e);
    }
  };
  section.querySelectorAll("input").forEach((i) => i.addEventListener("change", update));
  update();
}

await init();

wire("pilot", (canvas, p) => {
  const sweep = JSON.parse(pilotLengthSweep(p.m, p.n, p.rh, p.rg, p.pb, p.pj));
  plotSweep(canvas, sweep);
  const last = sweep.curves[2].values.at(-1);
  return `eigen-optimal jamming with optimal pilots at L=${sweep.axis.at(-1)}: MSE ${last.toFixed(3)}`;
});

wire("antennas", (canvas, p) => {
  const sweep = JSON.parse(antennaSweep(p.l, p.n, p.rh, p.rg, p.pb, p.pj, p.mmax, 5));
  plotSweep(canvas, sweep);
  const v = sweep.curves[2].values;
  const k = v.indexOf(Math.min(...v));
  return `attacked optimal-pilot curve is smallest at M=${sweep.axis[k]} (MSE ${v[k].toFixed(3)})`;
});

wire("lemma", (canvas, p) => {
  const data = JSON.parse(
    lemmaScatter(p.m, p.n, p.l, p.rh, p.rg, p.pb, p.pj, p.random, p.samples, p.seed),
  );
  plotScatter(canvas, data);
  return data.mse_counterexample_found
    ? "a random jammer reached a higher MSE than the eigen-optimal one (red)"
    : "no random jammer beat the eigen-optimal one (red) on MSE";
});
