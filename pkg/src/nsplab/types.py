"""Simple types over nat, with optional binary products.

Types are interned, so two structurally equal types are the same object and
``is`` / ``==`` agree.  That keeps type checks at term construction cheap.
"""

import threading

_lock = threading.Lock()
_table = {}


class SimpleType:
    __slots__ = ("_level", "__weakref__")

    def __repr__(self):
        return "SimpleType(%s)" % type_str(self)

    def __str__(self):
        return type_str(self)

    # interned, so identity is structural equality
    def __eq__(self, other):
        return self is other

    def __hash__(self):
        return id(self)

    def __reduce__(self):
        raise TypeError("types are interned; rebuild them with nat/arrow/product")


class NatType(SimpleType):
    __slots__ = ()


class Arrow(SimpleType):
    __slots__ = ("dom", "cod")


class Product(SimpleType):
    __slots__ = ("left", "right")


NAT = NatType()
NAT._level = 0


def _intern(key, cls, a, b, level):
    t = _table.get(key)
    if t is not None:
        return t
    with _lock:
        t = _table.get(key)
        if t is None:
            t = object.__new__(cls)
            if cls is Arrow:
                t.dom, t.cod = a, b
            else:
                t.left, t.right = a, b
            t._level = level
            _table[key] = t
    return t


def arrow(*ts):
    """arrow(a, b, c) is a -> (b -> c).  A single argument is returned as is."""
    if not ts:
        raise ValueError("arrow needs at least one type")
    result = ts[-1]
    for dom in reversed(ts[:-1]):
        key = ("->", id(dom), id(result))
        result = _intern(key, Arrow, dom, result, max(dom._level + 1, result._level))
    return result


def product(left, right):
    key = ("*", id(left), id(right))
    return _intern(key, Product, left, right, max(left._level, right._level))


def level(t):
    return t._level


def pure(k):
    """The pure type of level k: pure(0) = nat, pure(k+1) = pure(k) -> nat."""
    if k < 0:
        raise ValueError("level must be >= 0")
    t = NAT
    for _ in range(k):
        t = arrow(t, NAT)
    return t


def is_product_free(t):
    if t is NAT:
        return True
    if isinstance(t, Product):
        return False
    return is_product_free(t.dom) and is_product_free(t.cod)


def split_arrow(t):
    """Return (argument types, final non-arrow type)."""
    args = []
    while isinstance(t, Arrow):
        args.append(t.dom)
        t = t.cod
    return args, t


def arity(t):
    return len(split_arrow(t)[0])


def type_str(t):
    if t is NAT:
        return "nat"
    if isinstance(t, Arrow):
        return "(-> %s %s)" % (type_str(t.dom), type_str(t.cod))
    return "(* %s %s)" % (type_str(t.left), type_str(t.right))


def pretty_type(t):
    """Infix rendering, e.g. ``(nat->nat)->nat``."""
    if t is NAT:
        return "nat"
    if isinstance(t, Product):
        return "(%s x %s)" % (pretty_type(t.left), pretty_type(t.right))
    dom = pretty_type(t.dom)
    if isinstance(t.dom, Arrow):
        dom = "(" + dom + ")"
    return dom + "->" + pretty_type(t.cod)
