"""Human-diffable trace interchange format.

One line per position after a loop header::

    loop: 6
    0 | st_A=idle in_A=run | rest_A_G rest_A_S rest_A_A
    1 | st_A=try in_A=run |

Items are ``name=value`` pairs, the trailing section lists the
propositions true at that position.  '#' starts a comment.
"""

from __future__ import annotations

from .semantics import LassoTrace, Signature


class TraceFormatError(ValueError):
    pass


def format_trace(trace: LassoTrace) -> str:
    lines = [f"loop: {trace.loop}"]
    for pos in range(trace.k + 1):
        items, props = trace.states[pos]
        item_part = " ".join(f"{n}={items[n]}" for n, _ in trace.signature.items)
        prop_part = " ".join(p for p in trace.signature.props if p in props)
        lines.append(f"{pos} | {item_part} | {prop_part}".rstrip())
    return "\n".join(lines) + "\n"


def parse_trace(text: str, sig: Signature) -> LassoTrace:
    loop = None
    rows: dict[int, tuple[dict, list]] = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("loop:"):
            loop = int(line.split(":", 1)[1].strip())
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) < 2:
            raise TraceFormatError(f"line {n}: expected 'pos | items | props'")
        try:
            pos = int(parts[0])
        except ValueError:
            raise TraceFormatError(f"line {n}: bad position {parts[0]!r}") from None
        items = {}
        for pair in parts[1].split():
            if "=" not in pair:
                raise TraceFormatError(f"line {n}: bad item assignment {pair!r}")
            name, value = pair.split("=", 1)
            items[name] = value
        props = parts[2].split() if len(parts) > 2 else []
        for p in props:
            if p not in sig.props:
                raise TraceFormatError(f"line {n}: unknown proposition {p}")
        rows[pos] = (items, props)
    if loop is None:
        raise TraceFormatError("missing 'loop:' header")
    if not rows:
        raise TraceFormatError("trace has no positions")
    k = max(rows)
    if sorted(rows) != list(range(k + 1)):
        raise TraceFormatError("positions must cover 0..k without gaps")
    try:
        return LassoTrace(sig, loop, [rows[p] for p in range(k + 1)])
    except ValueError as exc:
        raise TraceFormatError(str(exc)) from None
