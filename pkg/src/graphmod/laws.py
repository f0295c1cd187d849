"""Catalogue of reduction laws as instantiable equivalence schemas.

Each law has metavariables drawn from small fixed pools: formulas, labels,
features, actions and update actions.  ``instances`` enumerates bindings
that satisfy the law's side condition and returns both sides.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable

from .syntax import (
    FALSE,
    TRUE,
    AddEdges,
    And,
    AssignGlobal,
    AssignLocal,
    Box,
    Choice,
    DelEdges,
    Feature,
    Iff,
    Implies,
    NewNode,
    NewNodeGo,
    Not,
    Or,
    Prop,
    Seq,
    Star,
    Test,
    Universal,
)

FORMULAS = (Prop("p"), Prop("q"), Prop("r"), Prop("s"), FALSE)
LABELS = ("p", "q", "r", "s")
FEATURES = ("a", "b")
ACTIONS = (Feature("a"), Feature("b"), Universal(), Test(Prop("p")))
U = Universal()
N = NewNode()
NG = NewNodeGo()


def update_pool(formulas=FORMULAS, labels=LABELS, features=FEATURES) -> list:
    """Update actions (no local assignment) built from the pools."""
    out = [N, NG]
    out += [AssignGlobal(w, f) for w in labels for f in formulas]
    for kind in (AddEdges, DelEdges):
        out += [kind(a, f, g) for a in features for f in formulas for g in formulas]
    return out


DOMAINS = {
    "phi": FORMULAS, "psi": FORMULAS, "chi": FORMULAS,
    "omega": LABELS, "pi": LABELS,
    "a": FEATURES, "b": FEATURES,
    "alpha": ACTIONS, "beta": ACTIONS,
}


@dataclass(frozen=True)
class Law:
    name: str
    group: str
    variables: tuple[str, ...]
    build: Callable = field(compare=False)
    condition: Callable | None = field(default=None, compare=False)
    printed: bool = True  # False for corrected forms of printed laws
    valid: bool = True

    def sides(self, **binding):
        return self.build(**binding)

    def formula(self, **binding):
        lhs, rhs = self.build(**binding)
        return Iff(lhs, rhs)

    def bindings(self):
        doms = [DOMAINS.get(v) or update_pool() for v in self.variables]
        for values in itertools.product(*doms):
            b = dict(zip(self.variables, values))
            if self.condition is None or self.condition(**b):
                yield b


def _law(name, group, variables, condition=None, *, printed=True, valid=True):
    def wrap(build):
        return Law(name, group, tuple(variables.split()), build, condition, printed, valid)
    return wrap


def _add(a, phi, psi):
    return AddEdges(a, phi, psi)


def _del(a, phi, psi):
    return DelEdges(a, phi, psi)


def _setg(omega, phi):
    return AssignGlobal(omega, phi)


def _setl(omega, phi):
    return AssignLocal(omega, phi)


LAWS: list[Law] = [
    # program constructs
    _law("test", "program", "phi psi")(lambda phi, psi: (Box(Test(phi), psi), Implies(phi, psi))),
    _law("sequence", "program", "alpha beta phi")(
        lambda alpha, beta, phi: (Box(Seq(alpha, beta), phi), Box(alpha, Box(beta, phi)))),
    _law("choice", "program", "alpha beta phi")(
        lambda alpha, beta, phi: (Box(Choice(alpha, beta), phi), And(Box(alpha, phi), Box(beta, phi)))),
    _law("star", "program", "alpha phi")(
        lambda alpha, phi: (Box(Star(alpha), phi), And(phi, Box(alpha, Box(Star(alpha), phi))))),
    # updates are total functions
    _law("update-bot", "normality", "upd")(lambda upd: (Box(upd, FALSE), FALSE)),
    _law("update-not", "normality", "upd phi")(lambda upd, phi: (Box(upd, Not(phi)), Not(Box(upd, phi)))),
    _law("update-or", "normality", "upd phi psi")(
        lambda upd, phi, psi: (Box(upd, Or(phi, psi)), Or(Box(upd, phi), Box(upd, psi)))),
    # moving updates past feature and universal boxes
    _law("new-feature", "commute", "a phi")(
        lambda a, phi: (Box(N, Box(Feature(a), phi)), Box(Feature(a), Box(N, phi)))),
    _law("new-universal", "commute", "phi", valid=False)(
        lambda phi: (Box(N, Box(U, phi)), And(Box(N, phi), Box(U, Box(N, phi))))),
    _law("newgo-feature", "commute", "a phi")(lambda a, phi: (Box(NG, Box(Feature(a), phi)), TRUE)),
    _law("newgo-universal", "commute", "phi", valid=False)(
        lambda phi: (Box(NG, Box(U, phi)), And(Box(NG, phi), Box(U, Box(NG, phi))))),
    _law("setg-feature", "commute", "omega phi a psi")(
        lambda omega, phi, a, psi: (Box(_setg(omega, phi), Box(Feature(a), psi)),
                                    Box(Feature(a), Box(_setg(omega, phi), psi)))),
    _law("setg-universal", "commute", "omega phi psi")(
        lambda omega, phi, psi: (Box(_setg(omega, phi), Box(U, psi)), Box(U, Box(_setg(omega, phi), psi)))),
    _law("add-other-feature", "commute", "a phi psi b chi", lambda a, b, **_: a != b)(
        lambda a, phi, psi, b, chi: (Box(_add(a, phi, psi), Box(Feature(b), chi)),
                                     Box(Feature(b), Box(_add(a, phi, psi), chi)))),
    _law("add-same-feature", "commute", "a phi psi chi")(
        lambda a, phi, psi, chi: (
            Box(_add(a, phi, psi), Box(Feature(a), chi)),
            And(Box(Feature(a), Box(_add(a, phi, psi), chi)),
                Implies(phi, Box(U, Implies(psi, Box(_add(a, phi, psi), chi))))))),
    _law("add-universal", "commute", "a phi psi chi")(
        lambda a, phi, psi, chi: (Box(_add(a, phi, psi), Box(U, chi)), Box(U, Box(_add(a, phi, psi), chi)))),
    _law("del-other-feature", "commute", "a phi psi b chi", lambda a, b, **_: a != b)(
        lambda a, phi, psi, b, chi: (Box(_del(a, phi, psi), Box(Feature(b), chi)),
                                     Box(Feature(b), Box(_del(a, phi, psi), chi)))),
    _law("del-same-feature", "commute", "a phi psi chi")(
        lambda a, phi, psi, chi: (
            Box(_del(a, phi, psi), Box(Feature(a), chi)),
            Or(And(Not(phi), Box(Feature(a), Box(_del(a, phi, psi), chi))),
               And(phi, Box(Feature(a), Implies(Not(psi), Box(_del(a, phi, psi), chi))))))),
    _law("del-universal", "commute", "a phi psi chi")(
        lambda a, phi, psi, chi: (Box(_del(a, phi, psi), Box(U, chi)), Box(U, Box(_del(a, phi, psi), chi)))),
    # updates at atoms
    _law("new-atom", "atom", "omega")(lambda omega: (Box(N, Prop(omega)), Prop(omega))),
    _law("newgo-atom", "atom", "omega")(lambda omega: (Box(NG, Prop(omega)), FALSE)),
    _law("setg-other-atom", "atom", "omega phi pi", lambda omega, pi, **_: omega != pi)(
        lambda omega, phi, pi: (Box(_setg(omega, phi), Prop(pi)), Prop(pi))),
    _law("setg-same-atom", "atom", "omega phi")(
        lambda omega, phi: (Box(_setg(omega, phi), Prop(omega)), phi)),
    _law("add-atom", "atom", "a phi psi omega")(
        lambda a, phi, psi, omega: (Box(_add(a, phi, psi), Prop(omega)), Prop(omega))),
    _law("del-atom", "atom", "a phi psi omega")(
        lambda a, phi, psi, omega: (Box(_del(a, phi, psi), Prop(omega)), Prop(omega))),
    # local assignment
    _law("setl-bot", "local", "omega phi")(lambda omega, phi: (Box(_setl(omega, phi), FALSE), FALSE)),
    _law("setl-not", "local", "omega phi psi")(
        lambda omega, phi, psi: (Box(_setl(omega, phi), Not(psi)), Not(Box(_setl(omega, phi), psi)))),
    _law("setl-or", "local", "omega phi psi chi")(
        lambda omega, phi, psi, chi: (Box(_setl(omega, phi), Or(psi, chi)),
                                      Or(Box(_setl(omega, phi), psi), Box(_setl(omega, phi), chi)))),
    _law("setl-other-atom", "local", "omega phi pi", lambda omega, pi, **_: omega != pi)(
        lambda omega, phi, pi: (Box(_setl(omega, phi), Prop(pi)), Prop(pi))),
    _law("setl-same-atom", "local", "omega phi")(
        lambda omega, phi: (Box(_setl(omega, phi), Prop(omega)), phi)),
    # corrected forms of the two universal laws for node creation
    _law("new-universal-fixed", "commute", "phi", printed=False)(
        lambda phi: (Box(N, Box(U, phi)), And(Box(NG, phi), Box(U, Box(N, phi))))),
    _law("newgo-universal-fixed", "commute", "phi", printed=False)(
        lambda phi: (Box(NG, Box(U, phi)), And(Box(NG, phi), Box(U, Box(N, phi))))),
]

BY_NAME = {law.name: law for law in LAWS}
PRINTED = [law for law in LAWS if law.printed]


def instances(law: Law, limit: int | None = None, seed: int = 0) -> list[tuple[dict, object, object]]:
    """Bindings with both sides; a seeded sample when ``limit`` is smaller
    than the full enumeration."""
    all_b = list(law.bindings())
    if limit is not None and len(all_b) > limit:
        all_b = random.Random(seed).sample(all_b, limit)
    return [(b, *law.sides(**b)) for b in all_b]
