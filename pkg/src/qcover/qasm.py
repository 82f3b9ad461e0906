"""
OpenQASM 2.0 frontend: text -> Circuit and Circuit -> text.

The parser is a hand-rolled lexer + recursive descent over the OpenQASM 2.0
grammar, restricted to the gate vocabulary in ir.GateKind:

    program   := "OPENQASM" real ";" include? statement*
    include   := "include" string ";"
    statement := regdecl | gatedecl | qop | "barrier" anylist ";"
    regdecl   := ("qreg" | "creg") id "[" nnint "]" ";"
    gatedecl  := "gate" id ("(" idlist? ")")? idlist "{" bodyop* "}"
    qop       := uop | "measure" argument "->" argument ";"
    uop       := id ("(" explist ")")? anylist ";"
    argument  := id | id "[" nnint "]"
    exp       := additive expression over reals, ints, "pi", parameters,
                 + - * / ^, unary -, and sin/cos/tan/exp/ln/sqrt

User-defined `gate` bodies are inlined at call time with parameters folded to
64-bit floats.  Registers map to flat qubit/clbit index spaces in declaration
order.  `opaque`, `reset`, and `if` are rejected with diagnostics, as is any
non-2.0 version header.

Aliases accepted for compatibility with older emitters: U -> u, CX -> cx,
u1 -> p, u3 -> u, u2(phi,lam) -> u(pi/2, phi, lam).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .ir import Circuit, GateInstruction, GateKind, Instruction, SPECS


@dataclass(frozen=True)
class SourceSpan:
    """Location of a token or construct in the source text."""

    file: str
    line: int
    col_start: int
    col_end: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col_start}"


class QasmError(Exception):
    """Any diagnostic produced while parsing OpenQASM source."""

    def __init__(self, message: str, span: SourceSpan | None = None):
        self.message = message
        self.span = span
        super().__init__(f"{span}: {message}" if span else message)


class SerializationError(Exception):
    pass


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
      (?P<WS>       [ \t\r]+)
    | (?P<NEWLINE>  \n)
    | (?P<COMMENT>  //[^\n]*)
    | (?P<REAL>     (\d+\.\d*|\.\d+)([eE][+-]?\d+)? | \d+[eE][+-]?\d+)
    | (?P<INT>      \d+)
    | (?P<ID>       [a-zA-Z_][a-zA-Z0-9_]*)
    | (?P<STRING>   "[^"\n]*")
    | (?P<ARROW>    ->)
    | (?P<SYM>      [{}\[\]();,+\-*/^=<>!])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    type: str
    text: str
    line: int
    col: int


def _tokenize(source: str, filename: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise QasmError(
                f"unexpected character {source[pos]!r}",
                SourceSpan(filename, line, col, col + 1),
            )
        kind = m.lastgroup
        text = m.group()
        if kind == "NEWLINE":
            line += 1
            col = 1
        elif kind in ("WS", "COMMENT"):
            col += len(text)
        else:
            tokens.append(_Token(kind, text, line, col))
            col += len(text)
        pos = m.end()
    tokens.append(_Token("EOF", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parameter expressions
# ---------------------------------------------------------------------------

_FUNCS = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan,
    "exp": math.exp, "ln": math.log, "sqrt": math.sqrt,
}


@dataclass(frozen=True)
class _Reg:
    name: str
    size: int
    offset: int
    is_qreg: bool


@dataclass(frozen=True)
class _GateDef:
    name: str
    params: tuple[str, ...]
    qargs: tuple[str, ...]
    # body ops hold unevaluated parameter ASTs so angles fold per call site
    body: tuple[tuple[str, tuple["_Expr", ...], tuple[str, ...], SourceSpan], ...]


_Expr = tuple  # small AST tuples: ("num", v) ("param", name) ("bin", op, l, r) ...


class _Parser:
    def __init__(self, source: str, filename: str):
        self.tokens = _tokenize(source, filename)
        self.pos = 0
        self.filename = filename
        self.qregs: dict[str, _Reg] = {}
        self.cregs: dict[str, _Reg] = {}
        self.gate_defs: dict[str, _GateDef] = {}
        self.instructions: list[Instruction] = []
        self.num_qubits = 0
        self.num_clbits = 0
        self.next_id = 0

    # -- token helpers ----------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.type != "EOF":
            self.pos += 1
        return tok

    def span(self, tok: _Token) -> SourceSpan:
        return SourceSpan(self.filename, tok.line, tok.col, tok.col + max(len(tok.text), 1))

    def error(self, message: str, tok: _Token | None = None) -> QasmError:
        tok = tok or self.peek()
        return QasmError(message, self.span(tok))

    def expect(self, type_: str, text: str | None = None) -> _Token:
        tok = self.peek()
        if tok.type != type_ or (text is not None and tok.text != text):
            want = text or type_.lower()
            raise self.error(f"expected {want!r}, found {tok.text!r}")
        return self.advance()

    def accept(self, type_: str, text: str | None = None) -> _Token | None:
        tok = self.peek()
        if tok.type == type_ and (text is None or tok.text == text):
            return self.advance()
        return None

    # -- grammar ----------------------------------------------------------

    def parse(self) -> Circuit:
        tok = self.expect("ID", "OPENQASM")
        ver = self.peek()
        if ver.type not in ("REAL", "INT"):
            raise self.error("expected version number after OPENQASM")
        self.advance()
        if ver.text != "2.0":
            raise self.error(
                f"unsupported OpenQASM version {ver.text}; only 2.0 is accepted", ver)
        self.expect("SYM", ";")

        while self.peek().type != "EOF":
            self.statement()

        return Circuit(self.num_qubits, self.num_clbits, tuple(self.instructions))

    def statement(self) -> None:
        tok = self.peek()
        if tok.type != "ID":
            raise self.error(f"expected statement, found {tok.text!r}")
        word = tok.text
        if word == "include":
            self.include()
        elif word in ("qreg", "creg"):
            self.regdecl()
        elif word == "gate":
            self.gatedecl()
        elif word == "opaque":
            raise self.error("opaque gates are not supported")
        elif word == "reset":
            raise self.error("unsupported gate 'reset'")
        elif word == "if":
            raise self.error("classical control flow ('if') is not supported")
        elif word == "measure":
            self.measure()
        elif word == "barrier":
            self.barrier()
        else:
            self.uop()

    def include(self) -> None:
        self.advance()
        tok = self.expect("STRING")
        if tok.text != '"qelib1.inc"':
            raise self.error(f"unsupported include {tok.text}; only \"qelib1.inc\"", tok)
        self.expect("SYM", ";")

    def regdecl(self) -> None:
        kw = self.advance()
        name_tok = self.expect("ID")
        name = name_tok.text
        if name in self.qregs or name in self.cregs:
            raise self.error(f"register {name!r} already declared", name_tok)
        self.expect("SYM", "[")
        size_tok = self.expect("INT")
        size = int(size_tok.text)
        if size < 1:
            raise self.error("register size must be positive", size_tok)
        self.expect("SYM", "]")
        self.expect("SYM", ";")
        if kw.text == "qreg":
            self.qregs[name] = _Reg(name, size, self.num_qubits, True)
            self.num_qubits += size
        else:
            self.cregs[name] = _Reg(name, size, self.num_clbits, False)
            self.num_clbits += size

    def gatedecl(self) -> None:
        self.advance()
        name_tok = self.expect("ID")
        name = name_tok.text
        params: list[str] = []
        if self.accept("SYM", "("):
            if not self.accept("SYM", ")"):
                params.append(self.expect("ID").text)
                while self.accept("SYM", ","):
                    params.append(self.expect("ID").text)
                self.expect("SYM", ")")
        qargs = [self.expect("ID").text]
        while self.accept("SYM", ","):
            qargs.append(self.expect("ID").text)
        self.expect("SYM", "{")
        body: list[tuple[str, tuple, tuple[str, ...], SourceSpan]] = []
        while not self.accept("SYM", "}"):
            op_tok = self.expect("ID")
            if op_tok.text == "barrier":
                # barriers inside gate bodies are dropped (no circuit effect)
                while not self.accept("SYM", ";"):
                    self.advance()
                continue
            op_params: list = []
            if self.accept("SYM", "("):
                if not self.accept("SYM", ")"):
                    op_params.append(self.expr_ast(params))
                    while self.accept("SYM", ","):
                        op_params.append(self.expr_ast(params))
                    self.expect("SYM", ")")
            op_qargs = [self.expect("ID").text]
            while self.accept("SYM", ","):
                op_qargs.append(self.expect("ID").text)
            self.expect("SYM", ";")
            for qa in op_qargs:
                if qa not in qargs:
                    raise self.error(f"unknown qubit argument {qa!r} in gate body", op_tok)
            body.append((op_tok.text, tuple(op_params), tuple(op_qargs), self.span(op_tok)))
        if name in self.gate_defs:
            raise self.error(f"gate {name!r} already defined", name_tok)
        self.gate_defs[name] = _GateDef(name, tuple(params), tuple(qargs), tuple(body))

    # -- expressions ------------------------------------------------------

    def expr_ast(self, param_names: list[str] | tuple[str, ...]) -> _Expr:
        return self._additive(param_names)

    def _additive(self, pn) -> _Expr:
        node = self._multiplicative(pn)
        while True:
            if self.accept("SYM", "+"):
                node = ("bin", "+", node, self._multiplicative(pn))
            elif self.accept("SYM", "-"):
                node = ("bin", "-", node, self._multiplicative(pn))
            else:
                return node

    def _multiplicative(self, pn) -> _Expr:
        node = self._unary(pn)
        while True:
            if self.accept("SYM", "*"):
                node = ("bin", "*", node, self._unary(pn))
            elif self.accept("SYM", "/"):
                node = ("bin", "/", node, self._unary(pn))
            else:
                return node

    def _unary(self, pn) -> _Expr:
        if self.accept("SYM", "-"):
            return ("neg", self._unary(pn))
        if self.accept("SYM", "+"):
            return self._unary(pn)
        return self._power(pn)

    def _power(self, pn) -> _Expr:
        node = self._atom(pn)
        if self.accept("SYM", "^"):
            return ("bin", "^", node, self._unary(pn))
        return node

    def _atom(self, pn) -> _Expr:
        tok = self.peek()
        if tok.type in ("REAL", "INT"):
            self.advance()
            return ("num", float(tok.text))
        if tok.type == "ID":
            self.advance()
            if tok.text == "pi":
                return ("num", math.pi)
            if tok.text in _FUNCS:
                self.expect("SYM", "(")
                arg = self.expr_ast(pn)
                self.expect("SYM", ")")
                return ("fun", tok.text, arg)
            if tok.text in pn:
                return ("param", tok.text)
            raise self.error(f"unknown identifier {tok.text!r} in expression", tok)
        if self.accept("SYM", "("):
            node = self.expr_ast(pn)
            self.expect("SYM", ")")
            return node
        raise self.error(f"expected expression, found {tok.text!r}", tok)

    def eval_expr(self, node: _Expr, env: dict[str, float], span: SourceSpan) -> float:
        tag = node[0]
        if tag == "num":
            return node[1]
        if tag == "param":
            return env[node[1]]
        if tag == "neg":
            return -self.eval_expr(node[1], env, span)
        if tag == "fun":
            try:
                return _FUNCS[node[1]](self.eval_expr(node[2], env, span))
            except ValueError as exc:
                raise QasmError(f"math error in parameter: {exc}", span) from None
        _, op, left, right = node
        a = self.eval_expr(left, env, span)
        b = self.eval_expr(right, env, span)
        try:
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                if b == 0.0:
                    raise QasmError("division by zero in parameter", span)
                return a / b
            value = a ** b
            if isinstance(value, complex):  # negative base, fractional power
                raise QasmError("parameter expression is not real", span)
            return value
        except (OverflowError, ZeroDivisionError) as exc:
            raise QasmError(f"math error in parameter: {exc}", span) from None

    # -- quantum operations -----------------------------------------------

    def argument(self, want_qreg: bool) -> list[int]:
        """Resolve `reg` or `reg[i]` to a list of flat indices."""
        name_tok = self.expect("ID")
        regs = self.qregs if want_qreg else self.cregs
        reg = regs.get(name_tok.text)
        if reg is None:
            what = "quantum" if want_qreg else "classical"
            raise self.error(f"undeclared {what} register {name_tok.text!r}", name_tok)
        if self.accept("SYM", "["):
            idx_tok = self.expect("INT")
            idx = int(idx_tok.text)
            if idx >= reg.size:
                raise self.error(
                    f"index {idx} out of range for {reg.name}[{reg.size}]", idx_tok)
            self.expect("SYM", "]")
            return [reg.offset + idx]
        return [reg.offset + i for i in range(reg.size)]

    def measure(self) -> None:
        tok = self.advance()
        src = self.argument(want_qreg=True)
        self.expect("ARROW")
        dst = self.argument(want_qreg=False)
        self.expect("SYM", ";")
        if len(src) != len(dst):
            raise self.error("measure arguments have mismatched sizes", tok)
        for q, c in zip(src, dst):
            self.emit(GateKind.MEASURE, (), (q,), (c,), self.span(tok))

    def barrier(self) -> None:
        tok = self.advance()
        qubits = self.argument(want_qreg=True)
        while self.accept("SYM", ","):
            qubits.extend(self.argument(want_qreg=True))
        self.expect("SYM", ";")
        self.emit(GateKind.BARRIER, (), tuple(qubits), (), self.span(tok))

    _ALIASES = {"U": ("u", 3), "CX": ("cx", 0), "u1": ("p", 1),
                "u2": ("u2", 2), "u3": ("u", 3)}

    def uop(self) -> None:
        name_tok = self.advance()
        name = name_tok.text
        params: list[float] = []
        if self.accept("SYM", "("):
            if not self.accept("SYM", ")"):
                params.append(self.eval_expr(self.expr_ast(()), {}, self.span(name_tok)))
                while self.accept("SYM", ","):
                    params.append(self.eval_expr(self.expr_ast(()), {}, self.span(name_tok)))
                self.expect("SYM", ")")
        args = [self.argument(want_qreg=True)]
        while self.accept("SYM", ","):
            args.append(self.argument(want_qreg=True))
        self.expect("SYM", ";")
        self.apply_named(name, params, args, self.span(name_tok))

    def apply_named(self, name: str, params: list[float],
                    args: list[list[int]], span: SourceSpan) -> None:
        """Apply a gate by name to (possibly register-wide) argument lists."""
        # OpenQASM broadcast rule: whole registers must share one length and
        # single qubits repeat across it.
        length = 1
        for a in args:
            if len(a) > 1:
                if length not in (1, len(a)):
                    raise QasmError("mismatched register sizes in gate operands", span)
                length = len(a)
        for i in range(length):
            operands = tuple(a[i] if len(a) > 1 else a[0] for a in args)
            self.apply_single(name, params, operands, span)

    def apply_single(self, name: str, params: list[float],
                     qubits: tuple[int, ...], span: SourceSpan) -> None:
        if name in self._ALIASES:
            target, nparams = self._ALIASES[name]
            if len(params) != nparams:
                raise QasmError(
                    f"{name} takes {nparams} parameter(s), got {len(params)}", span)
            if target == "u2":
                self.apply_single("u", [math.pi / 2, params[0], params[1]], qubits, span)
            else:
                self.apply_single(target, params, qubits, span)
            return
        if name in self.gate_defs:
            self.inline_call(self.gate_defs[name], params, qubits, span)
            return
        try:
            kind = GateKind(name)
        except ValueError:
            raise QasmError(f"unsupported gate {name!r}", span) from None
        if kind in (GateKind.MEASURE, GateKind.BARRIER):
            raise QasmError(f"unsupported gate {name!r}", span)
        spec = SPECS[kind]
        if len(params) != spec.num_params:
            raise QasmError(
                f"{name} takes {spec.num_params} parameter(s), got {len(params)}", span)
        if len(qubits) != spec.num_qubits:
            raise QasmError(
                f"{name} takes {spec.num_qubits} qubit(s), got {len(qubits)}", span)
        if len(set(qubits)) != len(qubits):
            raise QasmError(f"duplicate qubit operand in {name}", span)
        self.emit(kind, tuple(params), qubits, (), span)

    def inline_call(self, gd: _GateDef, params: list[float],
                    qubits: tuple[int, ...], span: SourceSpan) -> None:
        if len(params) != len(gd.params):
            raise QasmError(
                f"{gd.name} takes {len(gd.params)} parameter(s), got {len(params)}", span)
        if len(qubits) != len(gd.qargs):
            raise QasmError(
                f"{gd.name} takes {len(gd.qargs)} qubit(s), got {len(qubits)}", span)
        env = dict(zip(gd.params, params))
        qmap = dict(zip(gd.qargs, qubits))
        for op_name, op_params, op_qargs, op_span in gd.body:
            values = [self.eval_expr(ast, env, op_span) for ast in op_params]
            operands = tuple(qmap[qa] for qa in op_qargs)
            self.apply_single(op_name, values, operands, op_span)

    def emit(self, kind: GateKind, params: tuple[float, ...],
             qubits: tuple[int, ...], clbits: tuple[int, ...],
             span: SourceSpan) -> None:
        try:
            instr = GateInstruction(self.next_id, kind, qubits, params, clbits)
        except ValueError as exc:
            raise QasmError(str(exc), span) from None
        self.instructions.append(instr)
        self.next_id += 1


def parse(source: str, filename: str = "<input>") -> Circuit:
    """Parse OpenQASM 2.0 source into a Circuit.

    Raises QasmError with a SourceSpan for any syntax problem, unsupported
    gate, or non-2.0 version header; never raises anything else on text input.
    """
    return _Parser(source, filename).parse()


def parse_file(path: str) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), filename=path)


# ---------------------------------------------------------------------------
# Serializer
# ---------------------------------------------------------------------------

def _format_angle(value: float) -> str:
    """Render an angle, preferring exact small fractions of pi."""
    if value == 0.0:
        return "0"
    for den in (1, 2, 4, 3, 8, 6, 16, 32):
        num = value * den / math.pi
        rounded = round(num)
        if rounded != 0 and abs(num - rounded) < 1e-12:
            # must re-evaluate exactly like the parser: (num*pi)/den
            if abs((rounded * math.pi) / den - value) < 1e-12:
                mag = f"pi" if abs(rounded) == 1 else f"{abs(rounded)}*pi"
                if den != 1:
                    mag += f"/{den}"
                return ("-" if rounded < 0 else "") + mag
    return repr(value)


def serialize(circuit: Circuit) -> str:
    """Emit OpenQASM 2.0 that parses back to an identical circuit.

    Probes are simulator directives with no QASM form; circuits containing
    them are rejected.
    """
    if circuit.has_probes():
        raise SerializationError("probes not serializable")
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";']
    if circuit.num_qubits:
        lines.append(f"qreg q[{circuit.num_qubits}];")
    if circuit.num_clbits:
        lines.append(f"creg c[{circuit.num_clbits}];")
    for instr in circuit.instructions:
        if instr.kind is GateKind.MEASURE:
            lines.append(f"measure q[{instr.qubits[0]}] -> c[{instr.clbits[0]}];")
            continue
        if instr.kind is GateKind.BARRIER:
            operands = ",".join(f"q[{q}]" for q in instr.qubits)
            lines.append(f"barrier {operands};")
            continue
        name = instr.kind.value
        if instr.params:
            name += "(" + ",".join(_format_angle(v) for v in instr.params) + ")"
        operands = ",".join(f"q[{q}]" for q in instr.qubits)
        lines.append(f"{name} {operands};")
    return "\n".join(lines) + "\n"
