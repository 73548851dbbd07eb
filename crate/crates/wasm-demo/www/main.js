import init, { orbit_svg, ellipses_svg, rotation_svg } from "./pkg/bouncing_billiard_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function show(target, errorBox, draw) {
  try {
    $(target).innerHTML = draw();
    $(errorBox).textContent = "";
  } catch (e) {
    $(errorBox).textContent = String(e);
  }
}

const defaults = { ellipse: 0.4, segment: 0, disc: 1, square: 0, parabola: 0.5 };

function drawOrbit() {
  show("orbit", "orbit-error", () =>
    orbit_svg($("kind").value, num("param"), num("x"), num("y"), num("offset"), num("steps")));
}

function drawEllipses() {
  show("ellipses", "ellipse-error", () => ellipses_svg(num("h-ellipse"), num("count"), num("iterations")));
}

function drawRotation() {
  $("h-rotation-value").textContent = `h = ${num("h-rotation").toFixed(2)}`;
  show("rotation", "rotation-error", () => rotation_svg(num("h-rotation"), 400));
}

await init();
$("kind").addEventListener("change", () => {
  $("param").value = defaults[$("kind").value];
  drawOrbit();
});
for (const id of ["param", "x", "y", "offset", "steps"]) $(id).addEventListener("change", drawOrbit);
for (const id of ["h-ellipse", "count", "iterations"]) $(id).addEventListener("input", drawEllipses);
$("h-rotation").addEventListener("input", drawRotation);
drawOrbit();
drawEllipses();
drawRotation();
