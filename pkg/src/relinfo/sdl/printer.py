"""Canonical text rendering of scenario syntax trees.

``parse(print_document(doc)) == doc`` holds for every tree the parser can
produce; the printed form is also what appears in assertion descriptions.
"""

from __future__ import annotations

from . import ast


def print_coef(c: ast.Coef) -> str:
    parts = []
    for op, atom in zip(c.ops, c.atoms):
        parts.append(op + print_atom(atom))
    return ("-" if c.negative else "") + "".join(parts)


def print_atom(a: ast.Atom) -> str:
    if a.kind == "num":
        return a.text
    if a.kind in ("i", "pi"):
        return a.kind
    return f"{a.kind}({a.text})"


def print_value(v) -> str:
    if isinstance(v, ast.BoolLit):
        return "true" if v.value else "false"
    return print_coef(v)


def print_factor(f) -> str:
    if isinstance(f, ast.KetLit):
        return "|" + ",".join(f.entries) + ">"
    if isinstance(f, ast.StateRef):
        return f.name
    return "(" + print_sum(f.body) + ")"


def print_term(t: ast.Term) -> str:
    pieces = [print_coef(t.coef)] if t.coef is not None else []
    pieces.extend(print_factor(f) for f in t.factors)
    return " ".join(pieces)


def print_sum(s: ast.Sum) -> str:
    out = ""
    for k, t in enumerate(s.terms):
        body = print_term(t)
        if k == 0:
            out = ("-" if t.sign == "-" else "") + body
        else:
            out += f" {t.sign} {body}"
    return out


def print_query(q) -> str:
    if isinstance(q, ast.InfoQuery):
        inner = ",".join(q.target)
        if q.op is not None:
            inner += q.op + ",".join(q.given)
            if q.value:
                inner += "=" + ",".join(str(v) for v in q.value)
        return f"{q.func}({inner})"
    if isinstance(q, ast.AgreeQuery):
        return f"agree({q.first}, {q.second}, {q.target})"
    if isinstance(q, ast.ProbQuery):
        return f"P({q.observable}={q.outcome})"
    return f"commutes({q.first}, {q.second})"


def print_kind(k) -> str:
    if isinstance(k, ast.PauliKind):
        return f"pauli {k.which}"
    if isinstance(k, ast.SpinKind):
        return f"spin {print_coef(k.angle)}"
    if isinstance(k, ast.PointerKind):
        return "pointer"
    if isinstance(k, ast.SectorsKind):
        return "sectors " + " ".join("{" + " ".join(g) + "}" for g in k.groups)
    if isinstance(k, ast.ProjectorKind):
        return f"projector {k.state}"
    return (
        f"measurement {k.observable} ready {k.ready} targets {' '.join(k.targets)} "
        f"omega {print_coef(k.omega)}"
    )


def print_statement(s) -> str:
    if isinstance(s, ast.SystemDecl):
        line = f"system {s.name} {s.dim}"
        if s.labels:
            line += " labels " + " ".join(s.labels)
        return line
    if isinstance(s, ast.StateDecl):
        on = f" on {' '.join(s.systems)}" if s.systems else ""
        return f"state {s.name}{on} = {print_sum(s.expr)}"
    if isinstance(s, ast.ObsDecl):
        return f"obs {s.name} {' '.join(s.systems)} {print_kind(s.kind)}"
    if isinstance(s, ast.ClassicalDecl):
        return f"classical {s.name} = {{{', '.join(s.members)}}}"
    if isinstance(s, ast.StateStep):
        return f"step state {s.state}"
    if isinstance(s, ast.MixStep):
        return f"step mix {print_coef(s.epsilon)}"
    if isinstance(s, ast.ReportStep):
        line = f"step report {s.subsystem} targets {' '.join(s.targets)}"
        return line + (f" tol {s.tol}" if s.tol is not None else "")
    if isinstance(s, ast.EvolveStep):
        line = (
            f"step evolve {s.hamiltonian} from {print_coef(s.start)} to {print_coef(s.stop)} "
            f"samples {s.samples}"
        )
        if s.track is not None:
            line += f" track {s.track[0]} {s.track[1]}"
        return line
    if isinstance(s, ast.AssertStmt):
        line = f"assert {print_query(s.query)} = {print_value(s.expected)}"
        if s.tol is not None:
            line += f" tol {s.tol}"
        if s.note is not None:
            line += f' note "{s.note}"'
        return line
    raise TypeError(f"not a statement: {type(s).__name__}")


def print_document(doc: ast.Document) -> str:
    return "".join(print_statement(s) + "\n" for s in doc.statements)
