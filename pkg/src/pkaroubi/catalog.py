"""Named presentations used by fixtures, tests and the CLI."""
from __future__ import annotations

from fractions import Fraction

from .field import Field
from .pcat import PCatPresentation
from .pmod import FPModule


def one_object_ae(field: Field, birth_e=1, rmax=None) -> PCatPresentation:
    """One object * with Hom(*,*) = k<a_r> ⊕ k<e_r>, a born 0, e born ``birth_e``.

    a is the identity; e∘e = e∘a = a∘e = e.  e_∞ is idempotent in the limit
    but is not the class of any weight-0 idempotent.
    """
    hom = FPModule(field, [("a", 0), ("e", birth_e)])
    a, e = hom.basis_vector(hom.index("a")), hom.basis_vector(hom.index("e"))
    ia, ie = hom.index("a"), hom.index("e")
    table = {("*", "*", "*"): {(ia, ia): a, (ia, ie): e, (ie, ia): e, (ie, ie): e}}
    return PCatPresentation(field, ["*"], {("*", "*"): hom}, table, {"*": a}, rmax=rmax, name="one_object_ae")


def one_object_nonunital(field: Field, birth_e=1) -> PCatPresentation:
    """A single generator e with e∘e = e and no identity (W = identities breaks axiom 5)."""
    hom = FPModule(field, [("e", birth_e)])
    e = hom.basis_vector(0)
    return PCatPresentation(field, ["*"], {("*", "*"): hom}, {("*", "*", "*"): {(0, 0): e}}, {}, name="nonunital_e")


def broken_associativity(field: Field) -> PCatPresentation:
    """The one-object example with a·e changed to 0, which breaks associativity."""
    P = one_object_ae(field)
    hom = P.hom("*", "*")
    ia, ie = hom.index("a"), hom.index("e")
    tab = dict(P.table[("*", "*", "*")])
    tab[(ie, ia)] = hom.zero()
    return PCatPresentation(field, ["*"], {("*", "*"): hom}, {("*", "*", "*"): tab}, {}, name="broken_assoc")


def empty_category(field: Field) -> PCatPresentation:
    return PCatPresentation(field, [], {}, {}, {}, name="empty")


def monoid_presentation(field: Field, births, mult, relations=(), identity=None, name="monoid"):
    """One-object presentation from named generators and a multiplication table.

    ``mult[(x, y)]`` is a dict giving y∘x (x first) as a combination of
    generator names; ``relations`` are (weight, {name: coeff}).
    """
    hom = FPModule(field, list(births.items()), list(relations))
    tab = {}
    for (x, y), combo in mult.items():
        tab[(hom.index(x), hom.index(y))] = hom.vector(combo)
    ident = {"*": hom.vector({identity: 1})} if identity else {}
    return PCatPresentation(field, ["*"], {("*", "*"): hom}, {("*", "*", "*"): tab}, ident, name=name)


def truncated_ae(field: Field, birth_e=Fraction(1), death_a=Fraction(3)) -> PCatPresentation:
    """Variant of the one-object example where a dies at ``death_a`` while e survives:
    a relation a = e in weight ``death_a`` (so η_r = e_r for r ≥ death_a)."""
    hom = FPModule(field, [("a", 0), ("e", birth_e)], [(death_a, {"a": 1, "e": -1})])
    ia, ie = hom.index("a"), hom.index("e")
    a, e = hom.basis_vector(ia), hom.basis_vector(ie)
    table = {("*", "*", "*"): {(ia, ia): a, (ia, ie): e, (ie, ia): e, (ie, ie): e}}
    return PCatPresentation(field, ["*"], {("*", "*"): hom}, table, {"*": a}, name="truncated_ae")
