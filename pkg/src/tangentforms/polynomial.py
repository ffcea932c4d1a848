"""Sparse polynomials over (t, x, y), used to build exact shifts dF of a form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import Binary, Expr, Number, Var, add_exprs, mul_exprs
from .form import TangentForm, add_exact
from .jet import VarSet


@dataclass(frozen=True)
class Polynomial:
    """sum of coef * prod(var_k ** exps[k]) over the variables of ``VarSet.for_dimension(m)``."""

    m: int
    terms: tuple[tuple[float, tuple[int, ...]], ...]

    @property
    def labels(self) -> tuple[str, ...]:
        return VarSet.for_dimension(self.m).labels

    @classmethod
    def random(cls, m: int, rng: np.random.Generator, n_terms: int = 4, max_degree: int = 3) -> "Polynomial":
        n = 2 * m + 1
        terms = []
        for _ in range(n_terms):
            degree = int(rng.integers(1, max_degree + 1))
            exps = np.zeros(n, dtype=int)
            for k in rng.integers(0, n, size=degree):
                exps[k] += 1
            terms.append((float(np.round(rng.uniform(-2, 2), 3)), tuple(int(e) for e in exps)))
        return cls(m, tuple(terms))

    def derivative(self, index: int) -> "Polynomial":
        out = []
        for coef, exps in self.terms:
            k = exps[index]
            if k:
                e = list(exps)
                e[index] -= 1
                out.append((coef * k, tuple(e)))
        return Polynomial(self.m, tuple(out))

    def to_expr(self) -> Expr:
        total: Expr = Number(0.0)
        for coef, exps in self.terms:
            term: Expr = Number(coef)
            for label, k in zip(self.labels, exps):
                if k == 1:
                    term = mul_exprs(term, Var(label))
                elif k > 1:
                    term = mul_exprs(term, Binary("pow", Var(label), Number(float(k))))
            total = add_exprs(total, term)
        return total


def exact_shift(form: TangentForm, F: Polynomial) -> TangentForm:
    """form + dF."""
    m = form.m
    grads = [F.derivative(i).to_expr() for i in range(2 * m + 1)]
    return add_exact(form, grads[0], grads[1 : m + 1], grads[m + 1 :])
