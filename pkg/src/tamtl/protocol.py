"""The bundled two-attempt communication protocol model.

A server idles until a client starts a run; the first attempt must begin
within T1, each attempt resolves within T2 (success, failure, or timeout
exactly at T2), a failed or timed-out first attempt is retried once, and
the run returns to idle within T3 of its start.  Clock G spans the whole
run, S paces attempt starts, A times the attempt in progress.

``protocol_model_text`` renders the model file for any number of parallel
instances; from two instances up, pairwise synchronization axioms state
that runs started together finish with the same outcome.  The fixture
table records the expected verdict for each bundled check.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from importlib import resources

from .modelfile import ModelFile, parse_model

LOCATIONS = ("idle", "try", "s1", "ok1", "ko1", "tout1",
             "s2", "ok2", "ko2", "tout2")

_EDGES = """\
  edge idle -> try reset G S
  edge try -> s1 guard S < T1 reset A
  edge s1 -> ok1 guard A < T2
  edge s1 -> ko1 guard A < T2 reset S
  edge s1 -> tout1 guard A = T2 reset S
  edge ko1 -> s2 guard S < T1 reset A
  edge tout1 -> s2 guard S < T1 reset A
  edge s2 -> ok2 guard A < T2
  edge s2 -> ko2 guard A < T2
  edge s2 -> tout2 guard A = T2
  edge ok1 -> idle guard G < T3
  edge ok2 -> idle guard G < T3
  edge ko2 -> idle guard G < T3
  edge tout2 -> idle guard G < T3
"""


def instance_names(n_r: int) -> list[str]:
    if n_r <= 26:
        return list(string.ascii_uppercase[:n_r])
    return [f"P{i + 1}" for i in range(n_r)]


def _sync_axiom(a: str, b: str) -> str:
    def won(x):
        return f"st_{x} = ok1 || st_{x} = ok2"

    def lost(x):
        return f"st_{x} = tout2 || st_{x} = ko2"

    return (f"st_{a} = try && st_{b} = try ->\n"
            f"  until(!({lost(a)}), {won(a)}) && until(!({lost(b)}), {won(b)}) ||\n"
            f"  until(!({won(a)}), {lost(a)}) && until(!({won(b)}), {lost(b)})")


def protocol_model_text(n_r: int = 1, t1: int = 3, t2: int = 6, t3: int = 18,
                        delta=1, bound: int = 30) -> str:
    """Render the protocol model file for ``n_r`` parallel instances."""
    if n_r < 1:
        raise ValueError("need at least one protocol instance")
    names = instance_names(n_r)
    a = names[0]
    lines = [
        f"# communication protocol, {n_r} concurrent run(s)",
        f"param delta {delta}",
        f"param bound {bound}",
        f"param T1 {t1}",
        f"param T2 {t2}",
        f"param T3 {t3}",
        "",
        "automaton proto",
        "  alphabet run",
        "  clocks G S A",
        "  initial idle",
    ]
    lines.extend(f"  state {loc}" for loc in LOCATIONS)
    lines.append(_EDGES.rstrip("\n"))
    lines.append("")
    lines.extend(f"instance {name} of proto" for name in names)
    lines.append("")
    for i in range(n_r):
        for j in range(i + 1, n_r):
            lines.append(f"axiom {_sync_axiom(names[i], names[j])}")
    err = f"st_{a} = ko1 || st_{a} = ko2"
    win = f"st_{a} = ok1 || st_{a} = ok2"
    lines.extend([
        "",
        f"property 1 : {win} -> until(!({err}), st_{a} = idle)",
        f"property 2 : {err} -> until(!({win}), st_{a} = idle)",
        f"property 3 : st_{a} = try -> ev(0,T3){{st_{a} = idle}}",
        f"property 3p : st_{a} = try -> ev(0,T3+delta){{st_{a} = idle}}",
        f"property 4 : st_{a} = s1 -> ev_p(0,2*T1+T2+delta){{st_{a} = try}}",
        f"property 5 : st_{a} = ok1 -> until(0,T3)(!({err}), st_{a} = idle)",
    ])
    if n_r >= 2:
        b = names[1]
        together = f"st_{a} = try && st_{b} = try"
        started = f"st_{a} = try || st_{b} = try"
        split = f"st_{a} = ok2 && st_{b} = ko2"
        lines.append(
            f"property 6 : {split} -> since(0,T3)(!({together}), {started})")
        lines.append(
            f"property 7 : st_{a} = ok2 && ev_p(0,T1){{st_{b} = ko2}} "
            f"-> since(0,T3)(!({together}), {started})")
    return "\n".join(lines) + "\n"


def corpus_protocol(n_r: int = 1, t1: int = 3, t2: int = 6, t3: int = 18,
                    delta=1, bound: int = 30) -> ModelFile:
    """The parsed protocol model (goes through the full model-file path)."""
    return parse_model(protocol_model_text(n_r, t1, t2, t3, delta, bound))


@dataclass(frozen=True)
class Fixture:
    """One bundled check with its expected qualitative outcome."""

    file: str
    prop: str
    n_r: int
    t1: int
    t2: int
    t3: int
    delta: int
    bound: int
    expected: str  # verified | falsified | inconclusive

    def model(self) -> ModelFile:
        return corpus_protocol(self.n_r, self.t1, self.t2, self.t3,
                               self.delta, self.bound)


FIXTURES = (
    Fixture("protocol_n1.tv", "1", 1, 3, 6, 18, 1, 30, "verified"),
    Fixture("protocol_n1.tv", "2", 1, 3, 6, 18, 1, 30, "falsified"),
    Fixture("protocol_n1.tv", "3", 1, 3, 6, 18, 1, 30, "inconclusive"),
    Fixture("protocol_n1.tv", "3p", 1, 3, 6, 18, 1, 30, "verified"),
    Fixture("protocol_n1.tv", "4", 1, 3, 6, 18, 1, 30, "verified"),
    Fixture("protocol_n1.tv", "5", 1, 3, 6, 18, 1, 30, "verified"),
    Fixture("protocol_n2.tv", "6", 2, 3, 6, 18, 1, 30, "verified"),
    Fixture("protocol_n2.tv", "7", 2, 3, 6, 18, 1, 30, "verified"),
    Fixture("protocol_k36.tv", "1", 1, 3, 6, 24, 1, 36, "verified"),
    Fixture("protocol_k40.tv", "1", 1, 4, 8, 24, 1, 40, "verified"),
)


def fixture_manifest() -> str:
    return json.dumps([f.__dict__ for f in FIXTURES], indent=2) + "\n"


def corpus_file_text(name: str) -> str:
    """The shipped text of a bundled model file."""
    return resources.files("tamtl.corpus").joinpath(name).read_text()


def write_corpus(directory: str):
    """Regenerate the bundled corpus files into a directory."""
    import os
    os.makedirs(directory, exist_ok=True)
    seen = {}
    for f in FIXTURES:
        seen[f.file] = (f.n_r, f.t1, f.t2, f.t3, f.delta, f.bound)
    for name, (n_r, t1, t2, t3, delta, bound) in seen.items():
        with open(os.path.join(directory, name), "w") as handle:
            handle.write(protocol_model_text(n_r, t1, t2, t3, delta, bound))
    with open(os.path.join(directory, "fixtures.json"), "w") as handle:
        handle.write(fixture_manifest())
