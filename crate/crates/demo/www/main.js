import init, { solve, reduce, width } from "./pkg/mimred_demo.js";

const $ = (id) => document.getElementById(id);

function show(id, f) {
  const out = $(id);
  try {
    out.textContent = JSON.stringify(JSON.parse(f()), null, 2);
    out.classList.remove("error");
  } catch (e) {
    out.textContent = e.message ?? String(e);
    out.classList.add("error");
  }
}

await init();

$("solve").addEventListener("click", () => show("solve-out", () => solve($("cnf").value)));
$("reduce").addEventListener("click", () => show("reduce-out", () => reduce($("cnf").value, $("profile").value)));
$("width").addEventListener("click", () =>
  show("width-out", () => width(Number($("n").value), $("edges").value, $("kind").value, $("linear").checked)),
);
