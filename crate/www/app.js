// Demo page glue: loads the wasm module, wires the three panels
// (trace scrubber, communication plot, certification) with no framework.

let wasm;
try {
  wasm = await import("./pkg/pwk_wasm.js");
  await wasm.default();
} catch (e) {
  document.getElementById("load-error").hidden = false;
  console.error(e);
  throw e;
}

const $ = (id) => document.getElementById(id);
const state = { entries: [], trace: null, at: 0 };

const catalog = JSON.parse(wasm.catalog());
state.entries = catalog.entries.filter((e) => e.has_machine);

const select = $("machine-select");
for (const e of state.entries) {
  const opt = document.createElement("option");
  opt.value = e.name;
  opt.textContent = e.name;
  select.appendChild(opt);
}

const SAMPLE_WORDS = {
  an_bn: "aaabbb",
  w_dollar: "ab$ba$aa",
  prefix_abb: "aabba",
  suffix_bba: "abbaa",
  l_expo: "abaaaacaaaaaaaabaa",
  l_lin: "01c10",
  l_expo_hat: "a0aaaacaaaaaaaa0aa",
  l_poly_hat: "a1aaaaacaaaaaaa1aaa",
};

function currentEntry() {
  return state.entries.find((e) => e.name === select.value);
}

function machineSource() {
  // The textarea wins, so table edits are explorable.
  return $("dsl").value.trim() || select.value;
}

function showMachine() {
  const e = currentEntry();
  $("machine-props").textContent =
    `${e.reversible ? "reversible" : "forward-only"}` +
    (e.comm_class ? ` · ${e.comm_class} communication` : "");
  $("machine-blurb").textContent = e.provenance + (e.note ? ` — ${e.note}` : "");
  $("dsl").value = e.dsl;
  $("word").value = SAMPLE_WORDS[e.name] ?? "";
  runWord();
}

select.addEventListener("change", showMachine);

// ---- trace panel ----------------------------------------------------------

function runWord() {
  const doc = JSON.parse(wasm.trace_word(machineSource(), $("word").value));
  if (!doc.ok) {
    $("verdict").textContent = doc.error;
    $("verdict").className = "badge rejected";
    state.trace = null;
    $("tape").replaceChildren();
    $("upper-head").replaceChildren();
    $("lower-head").replaceChildren();
    $("messages").textContent = "";
    return;
  }
  state.trace = doc;
  state.at = 0;
  $("verdict").textContent =
    `${doc.verdict} · ${doc.forward_messages} msgs forward` +
    (doc.inverts ? `, ${doc.backward_messages} backward` : "");
  $("verdict").className = `badge ${doc.verdict}`;
  $("scrub").max = doc.configs.length - 1;
  $("scrub").value = 0;
  drawTape();
}

function drawTape() {
  const doc = state.trace;
  if (!doc) return;
  const cfg = doc.configs[state.at];
  const tape = $("tape");
  const up = $("upper-head");
  const low = $("lower-head");
  tape.replaceChildren();
  up.replaceChildren();
  low.replaceChildren();
  doc.tape.forEach((sym, i) => {
    const cell = document.createElement("div");
    cell.className = "cell" + (sym === "LEND" || sym === "REND" ? " end" : "");
    cell.textContent = sym === "LEND" ? "▷" : sym === "REND" ? "◁" : sym;
    tape.appendChild(cell);

    const u = document.createElement("div");
    if (i === cfg.upper.pos) {
      u.textContent = cfg.upper.state;
      u.className = "here";
    }
    up.appendChild(u);

    const l = document.createElement("div");
    if (i === cfg.lower.pos) {
      l.textContent = cfg.lower.state;
      l.className = "here";
    }
    low.appendChild(l);
  });
  $("step-label").textContent = `configuration ${state.at} / ${doc.configs.length - 1}`;
  $("scrub").value = state.at;

  const msg = [];
  const fwd = doc.steps[state.at];
  if (fwd) {
    msg.push(
      `next forward step — <span class="up">upper sends ${fwd.sent_upper ?? "⊥"}</span>, ` +
        `<span class="down">lower sends ${fwd.sent_lower ?? "⊥"}</span>`,
    );
  } else {
    msg.push(`halted: ${doc.verdict}`);
  }
  const back = state.at > 0 ? doc.steps[state.at - 1] : null;
  if (back && doc.inverts) {
    msg.push(
      `rewinding this step — <span class="up">upper rebroadcasts ${back.back_upper ?? "⊥"}</span>, ` +
        `<span class="down">lower rebroadcasts ${back.back_lower ?? "⊥"}</span>`,
    );
  }
  $("messages").innerHTML = msg.join("<br>");
}

$("run").addEventListener("click", runWord);
$("word").addEventListener("keydown", (e) => e.key === "Enter" && runWord());
$("scrub").addEventListener("input", () => {
  state.at = Number($("scrub").value);
  drawTape();
});
$("step-fwd").addEventListener("click", () => {
  if (state.trace && state.at < state.trace.configs.length - 1) {
    state.at += 1;
    drawTape();
  }
});
$("step-back").addEventListener("click", () => {
  if (state.trace && state.at > 0) {
    state.at -= 1;
    drawTape();
  }
});

// ---- communication panel --------------------------------------------------

$("measure").addEventListener("click", () => {
  const name = select.value;
  const words = JSON.parse(wasm.member_words(name, 5));
  if (!words.ok) {
    $("class-label").textContent = words.error;
    return;
  }
  const doc = JSON.parse(wasm.measure_series(machineSource(), JSON.stringify(words.words)));
  if (!doc.ok) {
    $("class-label").textContent = doc.error;
    return;
  }
  $("class-label").textContent = doc.class ? `class: ${doc.class}` : "too few points";
  $("series-text").textContent = doc.series
    .map((p) => `n=${p.n}  forward=${p.forward}  backward=${p.backward}`)
    .join("\n");
  plot(doc);
});

function plot(doc) {
  const cv = $("plot");
  const ctx = cv.getContext("2d");
  ctx.clearRect(0, 0, cv.width, cv.height);
  if (doc.series.length === 0) return;
  const pad = 34;
  const xs = doc.series.map((p) => p.n);
  const ys = doc.series.map((p) => p.forward);
  const xmax = Math.max(...xs) * 1.08;
  const ymax = Math.max(...ys, 1) * 1.15;
  const X = (n) => pad + (n / xmax) * (cv.width - pad - 8);
  const Y = (c) => cv.height - pad + (-c / ymax) * (cv.height - pad - 8);

  ctx.strokeStyle = "#b9b4a8";
  ctx.beginPath();
  ctx.moveTo(pad, 8);
  ctx.lineTo(pad, cv.height - pad);
  ctx.lineTo(cv.width - 8, cv.height - pad);
  ctx.stroke();
  ctx.fillStyle = "#7a7f8a";
  ctx.font = "11px ui-monospace, monospace";
  ctx.fillText("word length n", cv.width / 2 - 30, cv.height - 10);
  ctx.save();
  ctx.translate(12, cv.height / 2 + 30);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText("messages", 0, 0);
  ctx.restore();

  if (doc.fit) {
    const g = {
      constant: () => 1,
      log: (n) => Math.log2(n + 1),
      sqrt: (n) => Math.sqrt(n),
      linear: (n) => n,
      other: (n) => n,
    }[doc.fit.basis];
    ctx.strokeStyle = "#0a7d62";
    ctx.beginPath();
    for (let px = 0; px <= 200; px++) {
      const n = (px / 200) * xmax;
      const c = doc.fit.scale * g(n) + doc.fit.offset;
      const x = X(n);
      const y = Y(c);
      px === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
    }
    ctx.stroke();
  }

  for (const p of doc.series) {
    ctx.fillStyle = "#b3412c";
    ctx.beginPath();
    ctx.arc(X(p.n), Y(p.forward), 4, 0, Math.PI * 2);
    ctx.fill();
    ctx.fillStyle = "#2c5bb3";
    ctx.beginPath();
    ctx.arc(X(p.n), Y(p.backward), 2.6, 0, Math.PI * 2);
    ctx.fill();
  }
}

// ---- certification panel --------------------------------------------------

$("certify").addEventListener("click", () => {
  $("cert-out").textContent = "checking every word…";
  setTimeout(() => {
    const doc = JSON.parse(wasm.certify(machineSource(), Number($("cert-len").value)));
    if (!doc.ok) {
      $("cert-out").textContent = doc.error;
      return;
    }
    let text = `${doc.verdict}\nwords checked: ${doc.words_checked}\nconfigurations checked: ${doc.configurations_checked}`;
    if (doc.witness) {
      text += `\nwitness word: ${JSON.stringify(doc.witness.word)}\n${doc.witness.failure}`;
    }
    $("cert-out").textContent = text;
  }, 10);
});

// ---- boot -----------------------------------------------------------------

$("app").hidden = false;
showMachine();
