"""Formula AST, concrete syntax, structural measures and translations.

The core connectives are atoms, falsity, negation, conjunction and the
comparative similarity operator ``<<`` (written ``Sim`` here).  The
conditional ``~>`` (``Cond``) exists only as an interchange format for the
translations; the tableau engine never sees it.  Derived connectives
(``true``, ``|``, ``->``, ``<->``) are desugared by the parser and
re-sugared by the printer, so the AST stays five constructors wide.
"""

from __future__ import annotations

from dataclasses import dataclass


class Formula:
    """Base class for formula nodes.  Instances are immutable values."""

    __slots__ = ()

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    name: str

    def __repr__(self):
        return f"Atom({self.name!r})"


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    def __repr__(self):
        return "Bottom()"


@dataclass(frozen=True, repr=False)
class Not(Formula):
    arg: Formula

    def __repr__(self):
        return f"Not({self.arg!r})"


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"And({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Sim(Formula):
    """``left << right``: strictly closer to left-objects than to right-objects."""

    left: Formula
    right: Formula

    def __repr__(self):
        return f"Sim({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Cond(Formula):
    """``left ~> right``: the conditional, used only by translations."""

    left: Formula
    right: Formula

    def __repr__(self):
        return f"Cond({self.left!r}, {self.right!r})"


BOTTOM = Bottom()
TOP = Not(BOTTOM)


def lnot(f: Formula) -> Formula:
    return Not(f)


def land(a: Formula, b: Formula) -> Formula:
    return And(a, b)


def lor(a: Formula, b: Formula) -> Formula:
    """a | b, desugared to ~(~a & ~b)."""
    return Not(And(Not(a), Not(b)))


def limp(a: Formula, b: Formula) -> Formula:
    """a -> b, desugared to ~(a & ~b)."""
    return Not(And(a, Not(b)))


def liff(a: Formula, b: Formula) -> Formula:
    """a <-> b, desugared to (a -> b) & (b -> a)."""
    return And(limp(a, b), limp(b, a))


# ---------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class FormulaMeasures:
    size: int
    sim_depth: int
    atoms: frozenset[str]


def size(f: Formula) -> int:
    """Node count of the tree."""
    if isinstance(f, (Atom, Bottom)):
        return 1
    if isinstance(f, Not):
        return 1 + size(f.arg)
    return 1 + size(f.left) + size(f.right)


def sim_depth(f: Formula) -> int:
    """Maximum nesting depth of << (Cond counts as well: it hides three)."""
    if isinstance(f, (Atom, Bottom)):
        return 0
    if isinstance(f, Not):
        return sim_depth(f.arg)
    d = max(sim_depth(f.left), sim_depth(f.right))
    if isinstance(f, (Sim, Cond)):
        return d + 1
    return d


def atom_names(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset([f.name])
    if isinstance(f, Bottom):
        return frozenset()
    if isinstance(f, Not):
        return atom_names(f.arg)
    return atom_names(f.left) | atom_names(f.right)


def measures(f: Formula) -> FormulaMeasures:
    return FormulaMeasures(size(f), sim_depth(f), atom_names(f))


def has_cond(f: Formula) -> bool:
    if isinstance(f, (Atom, Bottom)):
        return False
    if isinstance(f, Cond):
        return True
    if isinstance(f, Not):
        return has_cond(f.arg)
    return has_cond(f.left) or has_cond(f.right)


def has_sim(f: Formula) -> bool:
    if isinstance(f, (Atom, Bottom)):
        return False
    if isinstance(f, Sim):
        return True
    if isinstance(f, Not):
        return has_sim(f.arg)
    return has_sim(f.left) or has_sim(f.right)


def subformulas(f: Formula):
    """All subformula nodes, preorder."""
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.arg)
    elif isinstance(f, (And, Sim, Cond)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)


# ---------------------------------------------------------------------------
# parser


class ParseError(ValueError):
    """Syntax error carrying the offset at which it was detected."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


_KEYWORDS = {"true", "false"}

# Longest-match-first so "<->" is not read as "<" "->" etc.
_PUNCT = ["<->", "->", "<<", "~>", "~", "!", "&", "|", "(", ")"]


def _tokenize(text: str):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        for p in _PUNCT:
            if text.startswith(p, i):
                toks.append((p, i))
                i += len(p)
                break
        else:
            if c.isalpha() or c == "_":
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                toks.append((text[i:j], i))
                i = j
            else:
                raise ParseError(f"unknown token {c!r}", i)
    toks.append((None, n))  # end marker
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def pos(self):
        return self.toks[self.i][1]

    def eat(self, tok=None):
        t, p = self.toks[self.i]
        if tok is not None and t != tok:
            raise ParseError(f"expected {tok!r}, found {t!r}", p)
        self.i += 1
        return t

    # formula := iff
    def formula(self):
        return self.iff()

    # iff := imp ("<->" imp)*   (left associative)
    def iff(self):
        f = self.imp()
        while self.peek() == "<->":
            self.eat()
            f = liff(f, self.imp())
        return f

    # imp := sim ("->" imp)?    (right associative)
    def imp(self):
        f = self.sim()
        if self.peek() == "->":
            self.eat()
            return limp(f, self.imp())
        return f

    # sim := or (("<<" | "~>") or)?   (non-associative)
    def sim(self):
        f = self.lor()
        t = self.peek()
        if t in ("<<", "~>"):
            self.eat()
            g = self.lor()
            out = Sim(f, g) if t == "<<" else Cond(f, g)
            if self.peek() in ("<<", "~>"):
                raise ParseError(
                    "chained << / ~> must be parenthesized", self.pos()
                )
            return out
        return f

    # or := and ("|" and)*
    def lor(self):
        f = self.land()
        while self.peek() == "|":
            self.eat()
            f = lor(f, self.land())
        return f

    # and := unary ("&" unary)*
    def land(self):
        f = self.unary()
        while self.peek() == "&":
            self.eat()
            f = And(f, self.unary())
        return f

    # unary := ("~" | "!") unary | "(" formula ")" | "true" | "false" | IDENT
    def unary(self):
        t = self.peek()
        if t in ("~", "!"):
            self.eat()
            return Not(self.unary())
        if t == "(":
            self.eat()
            f = self.formula()
            if self.peek() != ")":
                raise ParseError("unbalanced parentheses", self.pos())
            self.eat(")")
            return f
        if t == "true":
            self.eat()
            return TOP
        if t == "false":
            self.eat()
            return BOTTOM
        if t is None:
            raise ParseError("unexpected end of input", self.pos())
        if t[0].isalpha() or t[0] == "_":
            self.eat()
            return Atom(t)
        raise ParseError(f"unexpected token {t!r}", self.pos())


def parse(text: str) -> Formula:
    """Parse concrete syntax into the desugared AST."""
    p = _Parser(text)
    f = p.formula()
    if p.peek() is not None:
        raise ParseError(f"trailing input {p.peek()!r}", p.pos())
    return f


# ---------------------------------------------------------------------------
# printer

# Looser operators get higher numbers; parenthesization compares these.
_PREC_NOT, _PREC_AND, _PREC_OR, _PREC_SIM, _PREC_IMP = 1, 2, 3, 4, 5


def _sugar(f: Formula):
    """Recognize the printable shape of f: one of the sugared views."""
    if isinstance(f, Not):
        a = f.arg
        if isinstance(a, Bottom):
            return ("true",)
        if isinstance(a, And):
            if isinstance(a.left, Not) and isinstance(a.right, Not):
                return ("or", a.left.arg, a.right.arg)
            if isinstance(a.right, Not):
                return ("imp", a.left, a.right.arg)
    return None


def _prec(f: Formula) -> int:
    s = _sugar(f)
    if s is not None:
        if s[0] == "true":
            return 0
        return _PREC_OR if s[0] == "or" else _PREC_IMP
    if isinstance(f, (Atom, Bottom)):
        return 0
    if isinstance(f, Not):
        return _PREC_NOT
    if isinstance(f, And):
        return _PREC_AND
    return _PREC_SIM  # Sim, Cond


def _render(f: Formula) -> str:
    s = _sugar(f)
    if s is not None:
        if s[0] == "true":
            return "true"
        op = "|" if s[0] == "or" else "->"
        prec = _PREC_OR if s[0] == "or" else _PREC_IMP
        return f"{_child(s[1], prec)} {op} {_child(s[2], prec)}"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Not):
        return "~" + _child(f.arg, _PREC_NOT)
    if isinstance(f, And):
        return f"{_child(f.left, _PREC_AND)} & {_child(f.right, _PREC_AND)}"
    if isinstance(f, Sim):
        return f"{_child(f.left, _PREC_SIM)} << {_child(f.right, _PREC_SIM)}"
    if isinstance(f, Cond):
        return f"{_child(f.left, _PREC_SIM)} ~> {_child(f.right, _PREC_SIM)}"
    raise TypeError(f"not a formula: {f!r}")


def _child(f: Formula, parent_prec: int) -> str:
    text = _render(f)
    p = _prec(f)
    if p == 0 or p == _PREC_NOT:
        return text
    # << and ~> take parenthesized operands whenever they are binary;
    # elsewhere parenthesize at equal-or-looser precedence (binary operators
    # are printed non-associatively).
    if parent_prec == _PREC_SIM or p >= parent_prec:
        return f"({text})"
    return text


def print_formula(f: Formula) -> str:
    """Concrete syntax for f; parse(print_formula(f)) is structurally f."""
    return _render(f)


# ---------------------------------------------------------------------------
# interdefinability translations


def cond_to_csl(f: Formula) -> Formula:
    """Eliminate ~> bottom-up: A ~> B becomes (A << (A & ~B)) | ~(A << false)."""
    if isinstance(f, (Atom, Bottom)):
        return f
    if isinstance(f, Not):
        return Not(cond_to_csl(f.arg))
    left, right = cond_to_csl(f.left), cond_to_csl(f.right)
    if isinstance(f, And):
        return And(left, right)
    if isinstance(f, Sim):
        return Sim(left, right)
    return lor(Sim(left, And(left, Not(right))), Not(Sim(left, BOTTOM)))


def csl_to_cond(f: Formula) -> Formula:
    """Eliminate << bottom-up:
    A << B becomes ((A | B) ~> A) & (A ~> ~B) & ~(A ~> false)."""
    if isinstance(f, (Atom, Bottom)):
        return f
    if isinstance(f, Not):
        return Not(csl_to_cond(f.arg))
    left, right = csl_to_cond(f.left), csl_to_cond(f.right)
    if isinstance(f, Cond):
        return Cond(left, right)
    if isinstance(f, And):
        return And(left, right)
    return And(
        And(Cond(lor(left, right), left), Cond(left, Not(right))),
        Not(Cond(left, BOTTOM)),
    )
