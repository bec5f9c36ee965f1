"""Circuit IR over a finite algebra, the four instance kinds, and text I/O.

A circuit is a gate list in topological order (operands strictly precede
their gate) with an ordered output list.  Inputs are named, not positional,
because generated instances carry structured names.  Serialization preserves
gate order so generated gadgets diff cleanly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence

from .algebra import App, Const as TermConst, FiniteAlgebra, Term, Var
from .errors import (
    ArityMismatch,
    ElementOutOfRange,
    ForwardReference,
    ParseError,
    UnboundInput,
    UnknownOp,
)

_RESERVED = {"input", "const"}


@dataclass(frozen=True)
class Gate:
    kind: str                     # "input" | "const" | "op"
    name: str = ""                # input name or op name
    value: int = 0                # const element
    args: tuple[int, ...] = ()    # operand gate indices


def input_gate(name: str) -> Gate:
    return Gate("input", name=name)


def const_gate(value: int) -> Gate:
    return Gate("const", value=value)


def op_gate(op: str, args: Sequence[int]) -> Gate:
    return Gate("op", name=op, args=tuple(args))


@dataclass(frozen=True)
class Circuit:
    gates: tuple[Gate, ...]
    outputs: tuple[int, ...]
    algebra_name: str = ""

    def __post_init__(self) -> None:
        for i, g in enumerate(self.gates):
            if g.kind == "op":
                for a in g.args:
                    if a >= i:
                        raise ForwardReference(f"gate g{i} references g{a}")
                    if a < 0:
                        raise ValueError("negative gate reference")
        if not self.outputs:
            raise ValueError("circuit needs at least one output")
        for o in self.outputs:
            if not 0 <= o < len(self.gates):
                raise ValueError(f"output gate g{o} out of range")

    @property
    def input_names(self) -> list[str]:
        seen: dict[str, None] = {}
        for g in self.gates:
            if g.kind == "input":
                seen.setdefault(g.name, None)
        return list(seen)

    @property
    def size(self) -> int:
        return len(self.gates)

    def with_outputs(self, outputs: Sequence[int]) -> "Circuit":
        return Circuit(self.gates, tuple(outputs), self.algebra_name)


Assignment = Mapping[str, int]


def eval_circuit(
    alg: FiniteAlgebra,
    c: Circuit,
    asg: Assignment,
    hook: Optional[Callable[[int, int], None]] = None,
) -> tuple[int, ...]:
    """Single forward pass; each gate evaluates exactly once (hook observes)."""
    n = alg.size
    vals = [0] * len(c.gates)
    ops = {op.name: op for op in alg.ops}
    for i, g in enumerate(c.gates):
        if g.kind == "input":
            try:
                v = asg[g.name]
            except KeyError:
                raise UnboundInput(f"input {g.name!r} not assigned") from None
            if not 0 <= v < n:
                raise ElementOutOfRange(f"input {g.name}={v} out of range")
        elif g.kind == "const":
            if not 0 <= g.value < n:
                raise ElementOutOfRange(f"const {g.value} out of range")
            v = g.value
        else:
            op = ops.get(g.name)
            if op is None:
                raise UnknownOp(f"algebra {alg.name} has no operation {g.name!r}")
            if len(g.args) != op.arity:
                raise ArityMismatch(
                    f"gate g{i}: op {g.name} expects {op.arity} args, got {len(g.args)}"
                )
            idx = 0
            for a in g.args:
                idx = idx * n + vals[a]
            v = op.table[idx]
        vals[i] = v
        if hook is not None:
            hook(i, v)
    return tuple(vals[o] for o in c.outputs)


def compile_circuit(alg: FiniteAlgebra, c: Circuit) -> Callable[[Sequence[int]], tuple[int, ...]]:
    """Compile to a fast evaluator taking values for sorted(input_names)."""
    n = alg.size
    names = sorted(c.input_names)
    slot = {nm: i for i, nm in enumerate(names)}
    ops = {op.name: op for op in alg.ops}
    prog: list[tuple] = []
    for i, g in enumerate(c.gates):
        if g.kind == "input":
            prog.append(("i", slot[g.name]))
        elif g.kind == "const":
            if not 0 <= g.value < n:
                raise ElementOutOfRange(f"const {g.value} out of range")
            prog.append(("c", g.value))
        else:
            op = ops.get(g.name)
            if op is None:
                raise UnknownOp(f"algebra {alg.name} has no operation {g.name!r}")
            if len(g.args) != op.arity:
                raise ArityMismatch(f"gate g{i}: op {g.name} arity mismatch")
            prog.append(("o", op.table, g.args))
    outs = c.outputs

    def run(values: Sequence[int]) -> tuple[int, ...]:
        vals = []
        append = vals.append
        for instr in prog:
            tag = instr[0]
            if tag == "o":
                table, args = instr[1], instr[2]
                idx = 0
                for a in args:
                    idx = idx * n + vals[a]
                append(table[idx])
            elif tag == "i":
                append(values[instr[1]])
            else:
                append(instr[1])
        return tuple(vals[o] for o in outs)

    return run


# ---------------------------------------------------------------------------
# Instances


@dataclass(frozen=True)
class CsatInstance:
    circuit: Circuit

    def __post_init__(self) -> None:
        if len(self.circuit.outputs) != 2:
            raise ValueError("CSAT instance needs exactly 2 outputs")


@dataclass(frozen=True)
class McsatInstance:
    circuit: Circuit

    def __post_init__(self) -> None:
        if len(self.circuit.outputs) < 2:
            raise ValueError("MCSAT instance needs at least 2 outputs")


@dataclass(frozen=True)
class CeqvInstance:
    circuit: Circuit

    def __post_init__(self) -> None:
        if len(self.circuit.outputs) != 2:
            raise ValueError("CEQV instance needs exactly 2 outputs")


@dataclass(frozen=True)
class ScsatInstance:
    """A system of equations g_i = h_i over one shared gate list."""

    circuit: Circuit
    equations: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        for g, h in self.equations:
            for x in (g, h):
                if not 0 <= x < len(self.circuit.gates):
                    raise ValueError(f"equation gate g{x} out of range")


Instance = CsatInstance | McsatInstance | CeqvInstance | ScsatInstance


def instance_circuit(inst: Instance) -> Circuit:
    return inst.circuit


# ---------------------------------------------------------------------------
# Builder


class CircuitBuilder:
    """Incremental construction with input-gate interning by name."""

    def __init__(self, algebra_name: str = ""):
        self.gates: list[Gate] = []
        self.algebra_name = algebra_name
        self._inputs: dict[str, int] = {}

    def input(self, name: str) -> int:
        if name in self._inputs:
            return self._inputs[name]
        self.gates.append(input_gate(name))
        self._inputs[name] = len(self.gates) - 1
        return self._inputs[name]

    def const(self, value: int) -> int:
        self.gates.append(const_gate(value))
        return len(self.gates) - 1

    def op(self, name: str, *args: int) -> int:
        self.gates.append(op_gate(name, args))
        return len(self.gates) - 1

    def inline_term(self, t: Term, binding: Sequence[int]) -> int:
        """Add gates computing t with Var(i) wired to gate binding[i]."""
        if isinstance(t, Var):
            return binding[t.index]
        if isinstance(t, TermConst):
            return self.const(t.value)
        assert isinstance(t, App)
        args = [self.inline_term(a, binding) for a in t.args]
        return self.op(t.op, *args)

    def build(self, outputs: Sequence[int]) -> Circuit:
        return Circuit(tuple(self.gates), tuple(outputs), self.algebra_name)


# ---------------------------------------------------------------------------
# Term <-> circuit


def from_term(alg: FiniteAlgebra, t: Term, var_names: Optional[Sequence[str]] = None) -> Circuit:
    """Tree-shaped circuit for a term; size equals the term node count."""
    b = CircuitBuilder(alg.name)

    def emit(node: Term) -> int:
        if isinstance(node, Var):
            name = var_names[node.index] if var_names else f"x{node.index}"
            # tree shape: do not intern inputs
            b.gates.append(input_gate(name))
            return len(b.gates) - 1
        if isinstance(node, TermConst):
            return b.const(node.value)
        assert isinstance(node, App)
        args = [emit(a) for a in node.args]
        return b.op(node.op, *args)

    out = emit(t)
    return b.build([out])


def to_term(c: Circuit, output: int) -> Term:
    """Unfold a gate into a term; shared gates are duplicated (may grow
    exponentially relative to the circuit)."""
    names = sorted(c.input_names)
    index_of = {nm: i for i, nm in enumerate(names)}

    def unfold(i: int) -> Term:
        g = c.gates[i]
        if g.kind == "input":
            return Var(index_of[g.name])
        if g.kind == "const":
            return TermConst(g.value)
        return App(g.name, tuple(unfold(a) for a in g.args))

    return unfold(output)


def iterated_commutator_circuit(alg: FiniteAlgebra, n: int,
                                mul: str = "mul", inv: str = "inv") -> Circuit:
    """Maximally shared circuit for t_n = [..[[x1,x2],x3]..,xn] with
    [a,b] = a^-1 b^-1 a b.  Has n input gates plus 5 gates per commutator."""
    if n < 2:
        raise ValueError("need n >= 2")
    b = CircuitBuilder(alg.name)
    xs = [b.input(f"x{i}") for i in range(1, n + 1)]
    acc = xs[0]
    for x in xs[1:]:
        ai = b.op(inv, acc)
        bi = b.op(inv, x)
        p1 = b.op(mul, ai, bi)
        p2 = b.op(mul, p1, acc)
        acc = b.op(mul, p2, x)
    return b.build([acc])


# ---------------------------------------------------------------------------
# Text format
#
#   gN = input <name>
#   gN = const <element>
#   gN = <opname> gI gJ ...
#   outputs: gI gJ ...
#   equation: gI gJ          (repeatable; systems of equations)


def serialize_circuit(c: Circuit) -> str:
    lines = []
    for i, g in enumerate(c.gates):
        if g.kind == "input":
            lines.append(f"g{i} = input {g.name}")
        elif g.kind == "const":
            lines.append(f"g{i} = const {g.value}")
        else:
            lines.append(f"g{i} = {g.name} " + " ".join(f"g{a}" for a in g.args))
    lines.append("outputs: " + " ".join(f"g{o}" for o in c.outputs))
    return "\n".join(lines) + "\n"


def serialize_system(s: ScsatInstance) -> str:
    body = serialize_circuit(s.circuit.with_outputs(list(s.circuit.outputs)))
    lines = body.rstrip("\n").splitlines()
    lines = [ln for ln in lines if not ln.startswith("outputs:")]
    for g, h in s.equations:
        lines.append(f"equation: g{g} g{h}")
    return "\n".join(lines) + "\n"


def _parse_gate_ref(tok: str, current: int, ln: int) -> int:
    if not tok.startswith("g"):
        raise ParseError(f"expected gate reference, got {tok!r}", ln)
    try:
        idx = int(tok[1:])
    except ValueError:
        raise ParseError(f"bad gate reference {tok!r}", ln) from None
    if idx >= current:
        raise ForwardReference(f"gate reference {tok} ahead of definition", ln)
    if idx < 0:
        raise ParseError(f"bad gate reference {tok!r}", ln)
    return idx


def parse_circuit(text: str, alg: Optional[FiniteAlgebra] = None,
                  algebra_name: str = "") -> Circuit | ScsatInstance:
    """Parse the gate-list format.  Returns a ScsatInstance when equation
    lines are present, else a Circuit.  With alg given, op names and arities
    are checked at parse time."""
    gates: list[Gate] = []
    outputs: list[int] = []
    equations: list[tuple[int, int]] = []
    if alg is not None and not algebra_name:
        algebra_name = alg.name
    opmap = {op.name: op for op in alg.ops} if alg is not None else None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("outputs:"):
            toks = line[len("outputs:"):].split()
            outputs = [_parse_gate_ref(t, len(gates), ln) for t in toks]
            continue
        if line.startswith("equation:"):
            toks = line[len("equation:"):].split()
            if len(toks) != 2:
                raise ParseError("equation takes exactly two gate references", ln)
            g, h = (_parse_gate_ref(t, len(gates), ln) for t in toks)
            equations.append((g, h))
            continue
        parts = line.split()
        if len(parts) < 3 or parts[1] != "=":
            raise ParseError(f"cannot parse line {raw!r}", ln)
        if parts[0] != f"g{len(gates)}":
            raise ParseError(f"expected gate g{len(gates)}, got {parts[0]!r}", ln)
        head = parts[2]
        rest = parts[3:]
        if head == "input":
            if len(rest) != 1:
                raise ParseError("input takes one name", ln)
            gates.append(input_gate(rest[0]))
        elif head == "const":
            if len(rest) != 1:
                raise ParseError("const takes one element", ln)
            try:
                v = int(rest[0])
            except ValueError:
                raise ParseError(f"bad constant {rest[0]!r}", ln) from None
            if alg is not None and not 0 <= v < alg.size:
                raise ParseError(f"constant {v} out of range 0..{alg.size - 1}", ln)
            gates.append(const_gate(v))
        else:
            if head in _RESERVED:
                raise ParseError(f"malformed {head} line", ln)
            if opmap is not None:
                op = opmap.get(head)
                if op is None:
                    raise ParseError(f"unknown operation {head!r}", ln)
                if len(rest) != op.arity:
                    raise ParseError(
                        f"op {head} expects {op.arity} operands, got {len(rest)}", ln
                    )
            args = [_parse_gate_ref(t, len(gates), ln) for t in rest]
            gates.append(op_gate(head, args))
    if equations:
        circ = Circuit(tuple(gates), tuple(outputs) if outputs else (0,), algebra_name)
        return ScsatInstance(circ, tuple(equations))
    if not outputs:
        raise ParseError("missing outputs: line")
    return Circuit(tuple(gates), tuple(outputs), algebra_name)


# ---------------------------------------------------------------------------
# Random instance generation (seeded; used by tests and experiments)


def random_circuit(alg: FiniteAlgebra, rng, n_inputs: int, n_gates: int,
                   n_outputs: int = 2) -> Circuit:
    """Random topologically ordered circuit; inputs all appear first."""
    b = CircuitBuilder(alg.name)
    for i in range(n_inputs):
        b.input(f"x{i}")
    usable = [op for op in alg.ops if op.arity >= 1]
    while len(b.gates) < n_gates:
        roll = rng.random()
        if not usable or roll < 0.15:
            b.const(rng.randrange(alg.size))
            continue
        op = usable[rng.randrange(len(usable))]
        args = [rng.randrange(len(b.gates)) for _ in range(op.arity)]
        b.op(op.name, *args)
    outs = [rng.randrange(len(b.gates)) for _ in range(n_outputs)]
    return b.build(outs)
