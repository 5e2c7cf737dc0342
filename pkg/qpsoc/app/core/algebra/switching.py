"""
Switching: the substitution z_k -> 1 - z_k carried through the lifted variables.
"""

from typing import Dict

from qpsoc.app.core.algebra.monomial import LinearForm, Monomial, Variable


def switch_form(f: LinearForm, k: int) -> LinearForm:
    """
    z_S (k in S)  ->  z_{S minus k} - z_S      (z_empty = 1)
    z_kk          ->  1 - 2 z_k + z_kk
    """
    constant = f.constant
    terms: Dict[Variable, float] = {}

    def add(v: Variable, c: float):
        terms[v] = terms.get(v, 0.0) + c

    for v, c in f.terms.items():
        if not isinstance(v, Monomial) or k not in v.nodes:
            add(v, c)
        elif v.loop:
            constant += c
            add(Monomial.node(k), -2.0 * c)
            add(v, c)
        else:
            rest = tuple(i for i in v.nodes if i != k)
            if rest:
                add(Monomial.subset(rest), c)
            else:
                constant += c
            add(v, -c)

    return LinearForm(constant, terms)
