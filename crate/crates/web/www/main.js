import init, { lattice_leq, count_points, glue_family } from "./pkg/qcqs_web.js";

const $ = (id) => document.getElementById(id);

function show(out, f) {
  out.classList.remove("err");
  try {
    out.textContent = render(out.id, JSON.parse(f()));
  } catch (e) {
    out.classList.add("err");
    out.textContent = String(e);
  }
}

function render(id, r) {
  switch (id) {
    case "leq-out":
      return r.leq
        ? `${r.u} <= ${r.v}`
        : `${r.u} is not below ${r.v}\nwitness: ${r.witness} is not in the radical`;
    case "pts-out":
      return r.results
        .map((t) => `${t.test}: ${t.count} points\n  ${t.points.join("\n  ")}`)
        .join("\n");
    case "glue-out":
      if (r.glued !== null) return `glued: ${r.glued}\ncertificate: ${r.certificate.join(", ")}`;
      if (r.incompatibility) {
        const w = r.incompatibility;
        return `sections ${w.i} and ${w.j} disagree on the overlap\n  ${w.left}\n  ${w.right}`;
      }
      return r.error;
  }
}

await init();
$("leq-run").onclick = () =>
  show($("leq-out"), () => lattice_leq($("leq-ring").value, $("leq-u").value, $("leq-v").value));
$("pts-run").onclick = () =>
  show($("pts-out"), () => count_points($("pts-scheme").value, $("pts-over").value));
$("glue-run").onclick = () => show($("glue-out"), () => glue_family($("glue-family").value));
