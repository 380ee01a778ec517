"""Malformed-input generator shared by the SDL tests and the acceptance gate."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from relinfo import sdl

ROOT = Path(__file__).resolve().parent.parent
CORPUS_DIRS = (ROOT / "scenarios", ROOT / "tests" / "fixtures" / "sdl" / "valid")

# characters that matter to the grammar, plus a few that never should appear
ALPHABET = list("|<>,=(){}:*/+-_#\" \t\n.0123456789eEabcxyzXYZ") + ["é", "\x00", " ", "∘"]
WORDS = ["system", "state", "obs", "classical", "step", "assert", "labels", "on", "pauli", "spin",
         "pointer", "sectors", "projector", "measurement", "ready", "targets", "omega", "mix",
         "report", "evolve", "from", "to", "samples", "track", "tol", "note", "true", "false",
         "i", "pi", "sqrt", "log2", "I", "H", "Imax", "fact", "relfact", "agree", "P", "commutes",
         "1e999", "0", "-1", "1024", "99999"]


def corpus() -> list[str]:
    texts = []
    for d in CORPUS_DIRS:
        texts.extend(p.read_text(encoding="utf-8") for p in sorted(d.glob("*.sdl")))
    return texts


def _mutate(text: str, rng: np.random.Generator) -> str:
    kind = int(rng.integers(0, 7))
    n = len(text)
    pos = int(rng.integers(0, n + 1)) if n else 0
    if kind == 0 and n:  # delete a span
        return text[:pos] + text[pos + int(rng.integers(1, 6)):]
    if kind == 1:  # insert grammar characters
        k = int(rng.integers(1, 4))
        return text[:pos] + "".join(rng.choice(ALPHABET, size=k)) + text[pos:]
    if kind == 2 and n:  # replace one character
        return text[:pos] + str(rng.choice(ALPHABET)) + text[pos + 1:]
    if kind == 3:  # insert a keyword or odd literal
        return text[:pos] + " " + str(rng.choice(WORDS)) + " " + text[pos:]
    if kind == 4:  # truncate
        return text[:pos]
    lines = text.split("\n")
    if kind == 5 and len(lines) > 1:  # swap two lines
        a, b = rng.integers(0, len(lines), size=2)
        lines[a], lines[b] = lines[b], lines[a]
        return "\n".join(lines)
    # drop a line
    if lines:
        del lines[int(rng.integers(0, len(lines)))]
    return "\n".join(lines)


def fuzz_cases(n: int, seed: int = 7) -> list[str]:
    rng = np.random.default_rng(seed)
    base = corpus()
    out = []
    for _ in range(n):
        text = base[int(rng.integers(0, len(base)))]
        for _ in range(int(rng.integers(1, 4))):
            text = _mutate(text, rng)
        out.append(text)
    return out


def run_case(text: str) -> str:
    """Parse, check and evaluate one input.

    Returns ``"ok"`` or ``"diagnostic"``; any other exception propagates.
    Sweeps are cut to 3 samples to keep the run short.
    """
    try:
        doc = sdl.parse(text)
        sdl.evaluate(doc, "fuzz", sdl.RunConfig(samples=3))
    except sdl.SdlError as exc:
        exc.format("fuzz.sdl")
        return "diagnostic"
    return "ok"
