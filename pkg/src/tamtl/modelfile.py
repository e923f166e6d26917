"""The model-file language and the concrete formula syntax.

A model file is line-oriented (``#`` starts a comment, lines continue while
parentheses stay open) with sections::

    param delta 1            # sampling step (rational, default 1)
    param bound 30           # exploration bound k
    param T1 3               # any other name declares a constant
    signature                # optional free items/propositions
      item door : open shut
      prop p q
    automaton NAME
      alphabet go stop
      clocks C D
      initial s0
      state s0 : go          # labeling; omit ": syms" for the full alphabet
      edge s0 -> s1 guard C < T1 && D >= 2 reset C
    instance A of NAME       # items st_A, in_A; propositions rest_A_C, ...
    axiom FORMULA
    property NAME : FORMULA

Formulas use a keyword syntax: ``until``, ``since``, ``release``,
``trigger`` (binary, arguments in parentheses), ``ev``, ``alw``, ``ev_p``,
``alw_p``, ``nowon``, ``nowon_s``, ``uptonow``, ``uptonow_s`` (unary,
argument braced or a tight operand), ``becomes``/``becomesO`` (binary), and
the positional guards ``atzero``/``from1``.  Temporal keywords take an
interval suffix like ``(0,12]``, ``[3,inf)``, ``[=3]``, ``[>=3]`` or
``[<3]``; a missing suffix means (0, inf).  Bounds are arithmetic over
numbers, declared constants and ``delta``.  Exact clock guards ``c = T``
desugar to ``T <= c < T + delta``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import automata as ta
from .formulas import (Alw, AlwP, And, AtZero, Becomes, BecomesO, Ev, EvP,
                       FALSE, FalseF, Formula, FromOne, ItemIs, Not, Nowon,
                       NowonStrict, Or, Prop, Release, ReleaseI, Since,
                       SinceX, TRUE, Trigger, TriggerI, TrueF, Until, UntilX,
                       Uptonow, UptonowStrict, granularity_ok,
                       is_state_formula)
from .intervals import (INF, DenseInterval, DiscreteInterval, POSITIVE)
from .semantics import Signature


class ParseError(ValueError):
    """A syntax or resolution error; positions are 1-based."""

    def __init__(self, message: str, line: int, column: int,
                 expected: tuple[str, ...] = (), found: str = ""):
        at = f"{line}:{column}"
        if expected:
            message = f"{message} (expected {' | '.join(expected)}, found {found!r})"
        super().__init__(f"{at}: {message}")
        self.line = line
        self.column = column
        self.expected = expected
        self.found = found


# ---------------------------------------------------------------------------
# tokens


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<number>\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym><->|->|&&|\|\||!=|<=|>=|==|[()\[\]{},=<>!+\-*/:])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # number | ident | sym | end
    text: str
    line: int
    col: int


def tokenize(text: str, first_line: int = 1) -> list[Token]:
    tokens = []
    line = first_line
    col = 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind == "nl":
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(value)
        else:
            tokens.append(Token(kind, value, line, col))
            col += len(value)
        pos = m.end()
    tokens.append(Token("end", "", line, col))
    return tokens


KEYWORDS = {
    "until": Until, "since": Since, "release": Release, "trigger": Trigger,
    "until_x": UntilX, "since_x": SinceX, "release_i": ReleaseI,
    "trigger_i": TriggerI,
    "ev": Ev, "alw": Alw, "ev_p": EvP, "alw_p": AlwP,
    "nowon_s": NowonStrict, "uptonow_s": UptonowStrict,
    "nowon": Nowon, "uptonow": Uptonow,
    "becomes": Becomes, "becomesO": BecomesO,
    "atzero": AtZero, "from1": FromOne,
}
BINARY_KW = {"until", "since", "release", "trigger", "until_x", "since_x",
             "release_i", "trigger_i", "becomes", "becomesO"}
INTERVAL_KW = {"until", "since", "release", "trigger", "until_x", "since_x",
               "release_i", "trigger_i", "ev", "alw", "ev_p", "alw_p"}
DISCRETE_ONLY_KW = {"until_x", "since_x", "release_i", "trigger_i", "from1"}
RESERVED = set(KEYWORDS) | {"true", "false", "inf", "delta"}


class _FormulaParser:
    def __init__(self, tokens: list[Token], sig: Signature,
                 constants: dict[str, Fraction], discrete: bool):
        self.tokens = tokens
        self.i = 0
        self.sig = sig
        self.constants = dict(constants)
        self.discrete = discrete
        self.items = dict(sig.items)
        self.props = set(sig.props)

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def accept(self, text: str) -> Optional[Token]:
        if self.peek().text == text and self.peek().kind != "end":
            return self.next()
        return None

    def expect(self, text: str, what: str = "") -> Token:
        t = self.peek()
        if t.text != text or t.kind == "end":
            raise ParseError(what or "syntax error", t.line, t.col,
                             expected=(text,), found=t.text or "<end>")
        return self.next()

    def fail(self, message: str, expected: tuple[str, ...] = ()) -> ParseError:
        t = self.peek()
        return ParseError(message, t.line, t.col, expected=expected,
                          found=t.text or "<end>")

    # -- grammar -----------------------------------------------------------

    def formula(self) -> Formula:
        f = self.implication()
        while self.accept("<->"):
            g = self.implication()
            f = And((Or((Not(f), g)), Or((Not(g), f))))
        return f

    def implication(self) -> Formula:
        f = self.disjunction()
        if self.accept("->"):
            g = self.implication()
            return Or((Not(f), g))
        return f

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.accept("||"):
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.accept("&&"):
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        if self.accept("!"):
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        t = self.peek()
        if t.text == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if t.text == "{":
            self.next()
            f = self.formula()
            self.expect("}")
            return f
        if t.kind == "ident":
            if t.text == "true":
                self.next()
                return TRUE
            if t.text == "false":
                self.next()
                return FALSE
            if t.text in KEYWORDS:
                return self.temporal()
            return self.atom()
        raise self.fail("expected a formula", expected=("formula",))

    def temporal(self) -> Formula:
        kw = self.next()
        node = KEYWORDS[kw.text]
        if self.discrete and kw.text == "becomesO":
            pass
        if not self.discrete and kw.text in DISCRETE_ONLY_KW:
            raise ParseError(f"{kw.text} is a discrete-time operator",
                             kw.line, kw.col)
        interval = None
        if kw.text in INTERVAL_KW:
            interval = self.try_interval()
            if interval is None:
                if self.discrete:
                    raise self.fail(f"{kw.text} needs an explicit interval "
                                    "over discrete time", expected=("interval",))
                interval = POSITIVE
        if kw.text in BINARY_KW:
            self.expect("(", f"{kw.text} takes two parenthesized arguments")
            left = self.formula()
            self.expect(",")
            right = self.formula()
            self.expect(")")
            if kw.text in ("becomes", "becomesO"):
                return node(left, right)
            return node(interval, left, right)
        if kw.text in ("atzero", "from1", "nowon", "nowon_s", "uptonow",
                       "uptonow_s"):
            arg = self.unary_operand()
            return node(arg)
        return node(interval, self.unary_operand())

    def unary_operand(self) -> Formula:
        if self.peek().text == "{":
            self.next()
            f = self.formula()
            self.expect("}")
            return f
        return self.unary()

    def try_interval(self):
        """Attempt an interval suffix; backtrack when the parenthesis opens
        an argument list instead."""
        start = self.i
        t = self.peek()
        if t.text not in ("(", "["):
            return None
        try:
            return self.interval()
        except ParseError:
            self.i = start
            return None

    def interval(self):
        opener = self.next()
        lo_open = opener.text == "("
        if self.accept("="):
            d = self.const_expr()
            self._close_bracket()
            return self._mk_interval(d, False, d, False)
        if self.accept(">="):
            d = self.const_expr()
            self._close_bracket()
            return self._mk_interval(d, False, INF, True)
        if self.accept("<"):
            d = self.const_expr()
            self._close_bracket()
            return self._mk_interval(Fraction(0), True, d, True)
        lo = self.const_bound()
        self.expect(",")
        hi = self.const_bound()
        closer = self.next()
        if closer.text not in (")", "]"):
            raise ParseError("unterminated interval", closer.line, closer.col,
                             expected=(")", "]"), found=closer.text or "<end>")
        return self._mk_interval(lo, lo_open, hi, closer.text == ")")

    def _close_bracket(self):
        closer = self.next()
        if closer.text not in (")", "]"):
            raise ParseError("unterminated interval", closer.line, closer.col,
                             expected=(")", "]"), found=closer.text or "<end>")

    def _mk_interval(self, lo, lo_open, hi, hi_open):
        if self.discrete:
            return DiscreteInterval.from_brackets(lo, lo_open, hi, hi_open)
        return DenseInterval(lo, hi, lo_open, hi_open)

    def const_bound(self):
        if self.accept("inf"):
            return INF
        if self.peek().text == "-" and self.tokens[self.i + 1].text == "inf":
            self.next()
            self.next()
            return -INF
        return self.const_expr()

    def const_expr(self) -> Fraction:
        value = self.const_term()
        while True:
            if self.accept("+"):
                value = value + self.const_term()
            elif self.accept("-"):
                value = value - self.const_term()
            else:
                return value

    def const_term(self) -> Fraction:
        value = self.const_factor()
        while True:
            if self.accept("*"):
                value = value * self.const_factor()
            elif self.accept("/"):
                value = value / self.const_factor()
            else:
                return value

    def const_factor(self) -> Fraction:
        t = self.peek()
        if t.text == "-":
            self.next()
            return -self.const_factor()
        if t.text == "(":
            self.next()
            value = self.const_expr()
            self.expect(")")
            return value
        if t.kind == "number":
            self.next()
            return Fraction(t.text)
        if t.kind == "ident":
            if t.text == "delta" and "delta" in self.constants:
                self.next()
                return self.constants["delta"]
            if t.text in self.constants:
                self.next()
                return self.constants[t.text]
        raise ParseError("expected a numeric bound", t.line, t.col,
                         expected=("number", "constant"), found=t.text or "<end>")

    def atom(self) -> Formula:
        t = self.next()
        name = t.text
        if name in RESERVED:
            raise ParseError(f"{name} is a reserved word", t.line, t.col)
        if self.peek().text in ("=", "!="):
            op = self.next()
            v = self.next()
            if v.kind not in ("ident", "number"):
                raise ParseError("expected an item value", v.line, v.col,
                                 expected=("value",), found=v.text or "<end>")
            if name not in self.items:
                raise ParseError(f"unknown item {name}", t.line, t.col)
            if v.text not in self.items[name]:
                raise ParseError(
                    f"{v.text} is not a value of item {name}", v.line, v.col)
            test = ItemIs(name, v.text)
            return Not(test) if op.text == "!=" else test
        if name in self.props:
            return Prop(name)
        if name in self.items:
            raise ParseError(f"item {name} needs a comparison", t.line, t.col)
        raise ParseError(f"unknown proposition {name}", t.line, t.col)


def parse_formula(text: str, sig: Signature,
                  constants: Optional[dict[str, Fraction]] = None,
                  first_line: int = 1) -> Formula:
    """Parse a dense-time formula against a signature; intervals are kept
    as written (normalization is deferred to the discretizer)."""
    p = _FormulaParser(tokenize(text, first_line), sig, constants or {},
                       discrete=False)
    f = p.formula()
    end = p.peek()
    if end.kind != "end":
        raise ParseError("trailing input after formula", end.line, end.col,
                         expected=("<end>",), found=end.text)
    return f


def parse_discrete_formula(text: str, sig: Signature,
                           constants: Optional[dict[str, Fraction]] = None,
                           first_line: int = 1) -> Formula:
    p = _FormulaParser(tokenize(text, first_line), sig, constants or {},
                       discrete=True)
    f = p.formula()
    end = p.peek()
    if end.kind != "end":
        raise ParseError("trailing input after formula", end.line, end.col,
                         expected=("<end>",), found=end.text)
    return f


# ---------------------------------------------------------------------------
# pretty printing


_KW_OF = {Until: "until", Since: "since", Release: "release", Trigger: "trigger",
          UntilX: "until_x", SinceX: "since_x", ReleaseI: "release_i",
          TriggerI: "trigger_i", Ev: "ev", Alw: "alw", EvP: "ev_p",
          AlwP: "alw_p", NowonStrict: "nowon_s", UptonowStrict: "uptonow_s",
          Nowon: "nowon", Uptonow: "uptonow", Becomes: "becomes",
          BecomesO: "becomesO", AtZero: "atzero", FromOne: "from1"}

_LVL_IMPL, _LVL_OR, _LVL_AND, _LVL_UNARY = 1, 2, 3, 4


def _interval_text(iv) -> str:
    if isinstance(iv, DenseInterval):
        if iv == POSITIVE:
            return ""
        lo = "-inf" if iv.lo == -INF else str(iv.lo)
        hi = "inf" if iv.hi == INF else str(iv.hi)
        return (f"{'(' if iv.lo_open else '['}{lo},{hi}"
                f"{')' if iv.hi_open else ']'}")
    hi = "inf" if iv.hi == INF else str(iv.hi)
    return f"[{iv.lo},{hi}]"


def pretty(f: Formula) -> str:
    """Concrete syntax for a formula; parsing the result rebuilds the same
    AST (the round-trip law)."""
    return _pp(f, 0)


def _pp(f: Formula, level: int) -> str:
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, ItemIs):
        return f"{f.item} = {f.value}"
    if isinstance(f, Not):
        if isinstance(f.arg, ItemIs):
            return f"{f.arg.item} != {f.arg.value}"
        if isinstance(f.arg, (Prop, TrueF, FalseF)):
            return f"!{_pp(f.arg, _LVL_UNARY)}"
        return f"!({_pp(f.arg, 0)})"
    if isinstance(f, Or):
        if len(f.args) == 2 and isinstance(f.args[0], Not):
            body = f"{_pp(f.args[0].arg, _LVL_OR)} -> {_pp(f.args[1], _LVL_IMPL)}"
            return f"({body})" if level > _LVL_IMPL else body
        body = " || ".join(_pp(a, _LVL_AND) for a in f.args)
        return f"({body})" if level > _LVL_OR else body
    if isinstance(f, And):
        body = " && ".join(_pp(a, _LVL_UNARY) for a in f.args)
        return f"({body})" if level > _LVL_AND else body
    kw = _KW_OF.get(type(f))
    if kw is None:
        raise TypeError(f"cannot print {type(f).__name__}")
    iv = getattr(f, "interval", None)
    suffix = _interval_text(iv) if iv is not None else ""
    if hasattr(f, "left"):
        return f"{kw}{suffix}({_pp(f.left, 0)}, {_pp(f.right, 0)})"
    return f"{kw}{suffix}{{{_pp(f.arg, 0)}}}"


# ---------------------------------------------------------------------------
# model files


@dataclass
class ModelFile:
    signature: Signature
    automata: dict[str, ta.TimedAutomaton]
    instances: list[ta.InstanceBinding]
    axioms: list[Formula]
    properties: list[tuple[str, Formula]]
    delta: Fraction
    bound: Optional[int]
    constants: dict[str, Fraction] = field(default_factory=dict)

    def property_named(self, name: str) -> Formula:
        for n, f in self.properties:
            if n == name:
                return f
        raise KeyError(f"no property named {name}")


def _logical_lines(text: str):
    """Join physical lines while parentheses/brackets/braces stay open or a
    line ends in a dangling binary operator."""
    pending = ""
    start = None
    for n, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped and not pending:
            continue
        if start is None:
            start = n
        pending = f"{pending}\n{stripped}" if pending else stripped
        depth = sum(pending.count(c) for c in "([{") - \
            sum(pending.count(c) for c in ")]}")
        dangling = pending.rstrip().endswith(("->", "&&", "||", ","))
        if depth <= 0 and not dangling:
            yield start, pending
            pending = ""
            start = None
    if pending:
        yield start, pending


@dataclass
class _AutomatonDraft:
    name: str
    line: int
    alphabet: list[str] = field(default_factory=list)
    clocks: list[str] = field(default_factory=list)
    initial: list[str] = field(default_factory=list)
    states: list[tuple[str, Optional[list[str]]]] = field(default_factory=list)
    edges: list[tuple[int, str, str, Optional[str], list[str]]] = field(default_factory=list)


class _ModelParser:
    def __init__(self, text: str):
        self.lines = list(_logical_lines(text))
        self.constants: dict[str, Fraction] = {}
        self.delta = Fraction(1)
        self.bound: Optional[int] = None
        self.sig_items: list[tuple[str, tuple[str, ...]]] = []
        self.sig_props: list[str] = []
        self.drafts: dict[str, _AutomatonDraft] = {}
        self.instances: list[tuple[int, str, str]] = []
        self.axiom_lines: list[tuple[int, str]] = []
        self.property_lines: list[tuple[int, str, str]] = []

    def run(self) -> ModelFile:
        self.scan_sections()
        automata = {name: self.build_automaton(d)
                    for name, d in self.drafts.items()}
        bindings = []
        names = set()
        for line, iname, aname in self.instances:
            if iname in names:
                raise ParseError(f"duplicate instance name {iname}", line, 1)
            names.add(iname)
            if aname not in automata:
                raise ParseError(f"unknown automaton {aname}", line, 1)
            bindings.append(ta.bind_instance(automata[aname], iname))
        sig = Signature(tuple(self.sig_items), tuple(self.sig_props))
        for b in bindings:
            sig = sig.merged(b.signature_part())
        axioms = [self.parse_line_formula(line, text, sig)
                  for line, text in self.axiom_lines]
        seen = set()
        properties = []
        for line, name, text in self.property_lines:
            if name in seen:
                raise ParseError(f"duplicate property name {name}", line, 1)
            seen.add(name)
            properties.append((name, self.parse_line_formula(line, text, sig)))
        model = ModelFile(sig, automata, bindings, axioms, properties,
                          self.delta, self.bound, dict(self.constants))
        self.check_granularity(model)
        return model

    def parse_line_formula(self, line: int, text: str, sig: Signature) -> Formula:
        return parse_formula(text, sig, self.constants, first_line=line)

    def check_granularity(self, model: ModelFile):
        for where, f in ([("axiom", f) for f in model.axioms]
                         + [(f"property {n}", f) for n, f in model.properties]):
            if not granularity_ok(f, model.delta):
                raise ParseError(
                    f"{where}: an interval bound is not a multiple of "
                    f"delta = {model.delta}", 1, 1)

    def scan_sections(self):
        current: Optional[_AutomatonDraft] = None
        in_signature = False
        for line, text in self.lines:
            head, _, rest = text.strip().partition(" ")
            rest = rest.strip()
            if head == "param":
                self.param(line, rest)
                current = None
                in_signature = False
            elif head == "signature":
                in_signature = True
                current = None
            elif head == "automaton":
                name = rest
                if not name:
                    raise ParseError("automaton needs a name", line, 1)
                if name in self.drafts:
                    raise ParseError(f"duplicate automaton {name}", line, 1)
                current = _AutomatonDraft(name, line)
                self.drafts[name] = current
                in_signature = False
            elif head == "instance":
                m = re.fullmatch(r"(\w+)\s+of\s+(\w+)", rest)
                if not m:
                    raise ParseError("expected: instance NAME of AUTOMATON",
                                     line, 1)
                self.instances.append((line, m.group(1), m.group(2)))
                current = None
                in_signature = False
            elif head == "axiom":
                self.axiom_lines.append((line, rest))
                current = None
                in_signature = False
            elif head == "property":
                name, sep, body = rest.partition(":")
                if not sep:
                    raise ParseError("expected: property NAME : FORMULA",
                                     line, 1)
                self.property_lines.append((line, name.strip(), body.strip()))
                current = None
                in_signature = False
            elif in_signature and head in ("item", "prop"):
                self.signature_line(line, head, rest)
            elif current is not None:
                self.automaton_line(current, line, head, rest)
            else:
                raise ParseError(f"unexpected directive {head!r}", line, 1)

    def param(self, line: int, rest: str):
        m = re.fullmatch(r"(\w+)\s+(.+)", rest)
        if not m:
            raise ParseError("expected: param NAME VALUE", line, 1)
        name, value = m.group(1), m.group(2).strip()
        if name == "delta":
            self.delta = Fraction(value)
            if self.delta <= 0:
                raise ParseError("delta must be positive", line, 1)
            self.constants["delta"] = self.delta
        elif name == "bound":
            self.bound = int(value)
        else:
            self.constants[name] = Fraction(value)

    def signature_line(self, line: int, head: str, rest: str):
        if head == "item":
            m = re.fullmatch(r"(\w+)\s*:\s*(.+)", rest)
            if not m:
                raise ParseError("expected: item NAME : VALUE...", line, 1)
            self.sig_items.append((m.group(1), tuple(m.group(2).split())))
        else:
            self.sig_props.extend(rest.split())

    def automaton_line(self, d: _AutomatonDraft, line: int, head: str, rest: str):
        if head == "alphabet":
            d.alphabet.extend(rest.split())
        elif head in ("clock", "clocks"):
            d.clocks.extend(rest.split())
        elif head in ("init", "initial"):
            d.initial.extend(rest.split())
        elif head == "state":
            name, sep, labels = rest.partition(":")
            name = name.strip()
            if any(name == s for s, _ in d.states):
                raise ParseError(f"duplicate state name {name}", line, 1)
            d.states.append((name, labels.split() if sep else None))
        elif head == "edge":
            m = re.fullmatch(
                r"(\w+)\s*->\s*(\w+)"
                r"(?:\s+guard\s+(.*?))?"
                r"(?:\s+reset\s+([\w ]+))?", rest)
            if not m:
                raise ParseError(
                    "expected: edge SRC -> DST [guard EXPR] [reset CLOCKS]",
                    line, 1)
            src, dst, guard, resets = m.groups()
            if src == dst:
                raise ParseError(f"self-loop edge at {src}", line, 1)
            d.edges.append((line, src, dst, guard,
                            resets.split() if resets else []))
        else:
            raise ParseError(f"unknown automaton directive {head!r}", line, 1)

    def build_automaton(self, d: _AutomatonDraft) -> ta.TimedAutomaton:
        state_names = [s for s, _ in d.states]
        labeling = tuple(
            (s, tuple(labels) if labels else tuple(d.alphabet))
            for s, labels in d.states)
        edges = []
        for line, src, dst, guard, resets in d.edges:
            for name, where in ((src, "source"), (dst, "target")):
                if name not in state_names:
                    raise ParseError(f"unknown {where} state {name}", line, 1)
            for c in resets:
                if c not in d.clocks:
                    raise ParseError(f"unknown clock {c} in reset", line, 1)
            g = self.parse_guard(line, guard) if guard else None
            edges.append(ta.Edge(src, dst, tuple(resets), g))
        for s in d.initial:
            if s not in state_names:
                raise ParseError(f"unknown initial state {s}", d.line, 1)
        return ta.TimedAutomaton(
            name=d.name, alphabet=tuple(d.alphabet),
            locations=tuple(state_names), initial=tuple(d.initial),
            labeling=labeling, clocks=tuple(d.clocks), edges=tuple(edges))

    def parse_guard(self, line: int, text: str) -> ta.ClockConstraint:
        tokens = tokenize(text, line)
        parser = _GuardParser(tokens, self.constants, self.delta)
        g = parser.disjunction()
        end = parser.peek()
        if end.kind != "end":
            raise ParseError("trailing input after guard", end.line, end.col,
                             expected=("<end>",), found=end.text)
        return g


class _GuardParser(_FormulaParser):
    def __init__(self, tokens, constants, delta):
        super().__init__(tokens, Signature(), constants, discrete=False)
        self.delta = delta

    def disjunction(self):
        parts = [self.conjunction()]
        while self.accept("||"):
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else ta.GuardOr(tuple(parts))

    def conjunction(self):
        parts = [self.guard_atom()]
        while self.accept("&&"):
            parts.append(self.guard_atom())
        return parts[0] if len(parts) == 1 else ta.GuardAnd(tuple(parts))

    def guard_atom(self):
        if self.accept("("):
            g = self.disjunction()
            self.expect(")")
            return g
        t = self.next()
        if t.kind != "ident":
            raise ParseError("expected a clock name", t.line, t.col,
                             expected=("clock",), found=t.text or "<end>")
        clock = t.text
        op = self.next()
        if op.text not in ("<", ">=", "=", "=="):
            raise ParseError("expected <, >= or = in clock guard",
                             op.line, op.col, expected=("<", ">=", "="),
                             found=op.text or "<end>")
        bound = self.const_expr()
        self.check_bound(t, bound)
        if op.text == "<":
            return ta.ClockLess(clock, bound)
        if op.text == ">=":
            return ta.ClockAtLeast(clock, bound)
        # exact test sugar: T <= c < T + delta
        return ta.GuardAnd((ta.ClockAtLeast(clock, bound),
                            ta.ClockLess(clock, bound + self.delta)))

    def check_bound(self, tok: Token, bound: Fraction):
        if bound <= 0:
            raise ParseError(f"guard constant {bound} is not positive",
                             tok.line, tok.col)
        if (bound / self.delta).denominator != 1:
            raise ParseError(
                f"guard constant {bound} is not a multiple of delta = "
                f"{self.delta}", tok.line, tok.col)


def parse_model(text: str) -> ModelFile:
    """Parse and resolve a model file; named constants are substituted into
    interval bounds and clock guards, exact guards are desugared."""
    return _ModelParser(text).run()
