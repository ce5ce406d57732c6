"""S-expression concrete syntax for types and terms.

    type  ::= nat | (-> type type ...) | (* type type)
    term  ::= x | n | name:family | (var x type)
            | (lam (x type) ... term) | (app term term ...) | (term term ...)
            | (pair term term) | (fst term) | (snd term)
            | suc | pre | ifzero | min | (Y type) | (while type) | (rec type)
            | (rec-str type) | (while-str type) | (byval (type ...) type)

``;`` starts a comment that runs to the end of the line.  ``(var x type)``
names a free variable; the printer uses it for every free occurrence so that
``parse(show(t))`` gives back ``t`` up to alpha-equivalence.
"""

import re

from .terms import (LIB_FAMILIES, LIB_TYPES, App, Const, Fst, Lam, Lib, Num, Pair, Snd,
                    TermTypeError, Var, fresh_var, names_of)
from .types import NAT, Arrow, arrow, product, type_str


class ParseError(ValueError):
    def __init__(self, message, line=None, col=None):
        where = "" if line is None else " at line %d, column %d" % (line, col)
        super().__init__(message + where)
        self.line = line
        self.col = col


_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")
_KEYWORDS = {"lam", "app", "pair", "fst", "snd", "var", "nat", "->", "*",
             "suc", "pre", "ifzero", "min", "Y", "while", "rec", "rec-str",
             "while-str", "byval"}


class _Tok:
    __slots__ = ("text", "line", "col")

    def __init__(self, text, line, col):
        self.text, self.line, self.col = text, line, col


def _tokenize(text):
    out = []
    line, start = 1, 0
    for m in _TOKEN.finditer(text):
        s = m.group()
        if not s.isspace() and not s.startswith(";"):
            out.append(_Tok(s, line, m.start() - start + 1))
        nl = s.count("\n")
        if nl:
            line += nl
            start = m.start() + s.rindex("\n") + 1
    return out


def _read(tokens):
    """Tokens to nested lists; each leaf stays a _Tok."""
    stack = [[]]
    opens = []
    for tok in tokens:
        if tok.text == "(":
            stack.append([])
            opens.append(tok)
        elif tok.text == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", tok.line, tok.col)
            done = stack.pop()
            opened = opens.pop()
            stack[-1].append(_SList(done, opened))
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise ParseError("missing ')'", opens[-1].line, opens[-1].col)
    return stack[0]


class _SList(list):
    def __init__(self, items, tok):
        super().__init__(items)
        self.line, self.col = tok.line, tok.col


def _where(x):
    return x.line, x.col


def _head(x):
    return x[0].text if isinstance(x, _SList) and x and isinstance(x[0], _Tok) else None


def _type(x):
    if isinstance(x, _Tok):
        if x.text == "nat":
            return NAT
        raise ParseError("expected a type, got %r" % x.text, *_where(x))
    h = _head(x)
    if h == "->" and len(x) >= 3:
        return arrow(*[_type(y) for y in x[1:]])
    if h == "*" and len(x) == 3:
        return product(_type(x[1]), _type(x[2]))
    raise ParseError("malformed type", *_where(x))


def parse_type(text):
    items = _read(_tokenize(text))
    if len(items) != 1:
        raise ParseError("expected exactly one type")
    return _type(items[0])


def _term(x, env):
    try:
        return _term_inner(x, env)
    except TermTypeError as e:
        if getattr(e, "located", False):
            raise
        msg = "type error in %s: %s" % (show(e.term) if e.term is not None else "term", e)
        err = TermTypeError(msg, e.term)
        err.located = True
        err.line, err.col = _where(x)
        raise err from None


_SIMPLE_CONSTS = {"suc", "pre", "ifzero", "min"}
_TYPED_CONSTS = {"Y", "while", "rec", "rec-str", "while-str"}


def _term_inner(x, env):
    if isinstance(x, _Tok):
        s = x.text
        if s.isdigit():
            return Num(int(s))
        if s in _SIMPLE_CONSTS:
            return Const(s)
        if s in env:
            return env[s]
        if ":" in s:
            name, _, fam = s.partition(":")
            if name in LIB_TYPES and fam in LIB_FAMILIES:
                return Lib(name, fam)
        if s in LIB_TYPES:
            return Lib(s, "str")
        raise ParseError("unbound identifier %r" % s, *_where(x))
    if not x:
        raise ParseError("empty application", *_where(x))
    h = _head(x)
    if h == "lam":
        if len(x) < 3:
            raise ParseError("lam needs binders and a body", *_where(x))
        env = dict(env)
        vs = []
        for b in x[1:-1]:
            if not (isinstance(b, _SList) and len(b) == 2 and isinstance(b[0], _Tok)):
                raise ParseError("binder must look like (x type)", *_where(b))
            name = b[0].text
            if not _IDENT.match(name) or name in _KEYWORDS:
                raise ParseError("bad variable name %r" % name, *_where(b[0]))
            v = Var(name, _type(b[1]))
            env[name] = v
            vs.append(v)
        body = _term(x[-1], env)
        for v in reversed(vs):
            body = Lam(v, body)
        return body
    if h == "var":
        if len(x) != 3:
            raise ParseError("(var x type) expected", *_where(x))
        return Var(x[1].text, _type(x[2]))
    if h == "pair":
        _arity(x, 3)
        return Pair(_term(x[1], env), _term(x[2], env))
    if h in ("fst", "snd"):
        _arity(x, 2)
        return (Fst if h == "fst" else Snd)(_term(x[1], env))
    if h == "ifzero" and len(x) == 2 and _is_type_shaped(x[1]):
        return Const("ifzero", (_type(x[1]),))
    if h in _TYPED_CONSTS:
        _arity(x, 2)
        return Const(h, (_type(x[1]),))
    if h == "byval":
        _arity(x, 3)
        if not isinstance(x[1], _SList):
            raise ParseError("byval takes a list of argument types", *_where(x))
        return Const("byval", tuple(_type(y) for y in x[1]) + (_type(x[2]),))
    parts = x[1:] if h == "app" else x
    if len(parts) < 2 and h == "app":
        raise ParseError("app needs a function and arguments", *_where(x))
    t = _term(parts[0], env)
    for a in parts[1:]:
        t = App(t, _term(a, env))
    return t


def _is_type_shaped(x):
    if isinstance(x, _Tok):
        return x.text == "nat"
    return _head(x) in ("->", "*")


def _arity(x, n):
    if len(x) != n:
        raise ParseError("%s takes %d argument(s)" % (x[0].text, n - 1), *_where(x))


def parse(text, env=None):
    """Parse one term.  ``env`` maps names to free variables."""
    items = _read(_tokenize(text))
    if len(items) != 1:
        raise ParseError("expected exactly one term, found %d" % len(items))
    return _term(items[0], dict(env or {}))


def parse_file(path, env=None):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), env)


# --- printing ----------------------------------------------------------------

def show(t):
    """Concrete syntax; binders are renamed when a name would be captured."""
    out = []
    _show(t, {}, out)
    return "".join(out)


def _const_str(c):
    if c.kind in _SIMPLE_CONSTS and not c.params:
        return c.kind
    if c.kind == "byval":
        return "(byval (%s) %s)" % (" ".join(type_str(s) for s in c.params[:-1]),
                                    type_str(c.params[-1]))
    return "(%s %s)" % (c.kind, type_str(c.params[0]))


def _show(t, names, out):
    # names maps bound Var -> printed name
    cls = type(t)
    if cls is Var:
        n = names.get(t)
        out.append(n if n is not None else "(var %s %s)" % (t.name, type_str(t.type)))
    elif cls is Num:
        out.append(str(t.n))
    elif cls is Const:
        out.append(_const_str(t))
    elif cls is Lib:
        out.append("%s:%s" % (t.name, t.family))
    elif cls is Lam:
        binders = []
        names = dict(names)
        while type(t) is Lam:
            v = t.var
            taken = {names.get(u, u.name) for u in t.body.fv if u != v}
            name = v.name
            if name in taken or name in _KEYWORDS or not _IDENT.match(name):
                name = fresh_var(v.name if _IDENT.match(v.name) else "v", v.type,
                                 taken | _KEYWORDS).name
            names[v] = name
            binders.append("(%s %s)" % (name, type_str(v.type)))
            t = t.body
        out.append("(lam %s " % " ".join(binders))
        _show(t, names, out)
        out.append(")")
    elif cls is App:
        fn, args = t, []
        while type(fn) is App:
            args.append(fn.arg)
            fn = fn.fn
        out.append("(")
        _show(fn, names, out)
        for a in reversed(args):
            out.append(" ")
            _show(a, names, out)
        out.append(")")
    elif cls is Pair:
        out.append("(pair ")
        _show(t.left, names, out)
        out.append(" ")
        _show(t.right, names, out)
        out.append(")")
    else:
        out.append("(fst " if cls is Fst else "(snd ")
        _show(t.arg, names, out)
        out.append(")")


def pretty(t, width=None):
    """A compact human-oriented rendering (not parseable)."""
    s = _pretty(t, {})
    if width and len(s) > width:
        s = s[: width - 3] + "..."
    return s


def _pretty(t, names):
    cls = type(t)
    if cls is Var:
        return names.get(t, t.name)
    if cls is Num:
        return str(t.n)
    if cls is Const:
        if not t.params:
            return t.kind
        return "%s[%s]" % (t.kind, ",".join(type_str(p) for p in t.params))
    if cls is Lib:
        return t.name if t.family == "str" else "%s:%s" % (t.name, t.family)
    if cls is Lam:
        vs = []
        names = dict(names)
        while type(t) is Lam:
            taken = {names.get(u, u.name) for u in t.body.fv if u != t.var}
            name = t.var.name
            if name in taken:
                name = fresh_var(name, t.var.type, taken).name
            names[t.var] = name
            vs.append(name)
            t = t.body
        return "\\%s. %s" % (" ".join(vs), _pretty(t, names))
    if cls is App:
        fn, args = t, []
        while type(fn) is App:
            args.append(fn.arg)
            fn = fn.fn
        parts = [_pretty_atom(fn, names)] + [_pretty_atom(a, names) for a in reversed(args)]
        return " ".join(parts)
    if cls is Pair:
        return "<%s, %s>" % (_pretty(t.left, names), _pretty(t.right, names))
    return "%s %s" % ("fst" if cls is Fst else "snd", _pretty_atom(t.arg, names))


def _pretty_atom(t, names):
    s = _pretty(t, names)
    if type(t) in (Lam, App, Fst, Snd):
        return "(" + s + ")"
    return s




