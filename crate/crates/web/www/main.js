import init, {
  photon_added_coherent,
  photon_added_thermal,
  photon_subtracted_squeezed,
} from "./pkg/hwig_web.js";

const N = 161;
const canvas = document.getElementById("plot");
const ctx = canvas.getContext("2d");
const stats = document.getElementById("stats");
const error = document.getElementById("error");
const num = (id) => parseFloat(document.getElementById(id).value);
const op = () => document.querySelector("input[name=op]:checked").value;

function compute() {
  const half = num("half");
  switch (op()) {
    case "coherent": {
      const m = num("xi"), a = num("xiarg");
      return photon_added_coherent(m * Math.cos(a), m * Math.sin(a), half, N);
    }
    case "thermal":
      return photon_added_thermal(num("tau"), half, N);
    default:
      return photon_subtracted_squeezed(num("r"), num("phi"), num("overlap"), half, N);
  }
}

// diverging map, symmetric about zero
function color(w, scale) {
  const t = Math.max(-1, Math.min(1, w / scale));
  const fade = Math.round(255 * (1 - Math.abs(t)));
  return t < 0 ? [fade, fade, 255] : [255, fade, fade];
}

function draw(g) {
  const v = g.values();
  const scale = Math.max(g.max_value(), -g.min_value) || 1;
  const img = ctx.createImageData(N, N);
  for (let iq = 0; iq < N; iq++) {
    for (let ip = 0; ip < N; ip++) {
      const [r, gr, b] = color(v[iq * N + ip], scale);
      const k = 4 * ((N - 1 - ip) * N + iq);
      img.data[k] = r;
      img.data[k + 1] = gr;
      img.data[k + 2] = b;
      img.data[k + 3] = 255;
    }
  }
  ctx.putImageData(img, 0, 0);
  const rows = [
    ["min W", g.min_value.toFixed(6)],
    ["argmin (q, p)", `(${g.argmin_q.toFixed(3)}, ${g.argmin_p.toFixed(3)})`],
    ["negative volume", g.negative_volume.toFixed(6)],
    ["grid quadrature", g.quadrature.toFixed(6)],
    ["herald probability", g.success_probability.toExponential(3)],
  ];
  stats.innerHTML = rows.map(([k, x]) => `<tr><td>${k}</td><td>${x}</td></tr>`).join("");
  g.free();
}

function update() {
  for (const row of document.querySelectorAll("[data-op]")) {
    row.classList.toggle("hidden", row.dataset.op !== op());
  }
  for (const out of document.querySelectorAll("output")) {
    out.value = document.getElementById(out.htmlFor).value;
  }
  try {
    draw(compute());
    error.textContent = "";
  } catch (e) {
    error.textContent = String(e);
  }
}

await init();
for (const el of document.querySelectorAll("input")) el.addEventListener("input", update);
update();
