"""
Sparse exact linear algebra used by every verifier.

Vectors are plain dicts ``coordinate -> scalar`` with no zero entries; the
scalars are anything supporting field arithmetic (``QQ`` elements for the
classical side, Q(q) elements for the quantum side). Each stored row carries
the combination of inserted inputs that produced it, so membership answers
come with explicit coefficients and dependent inputs yield nullspace vectors.
"""
from typing import Any, Callable, Hashable

from qcoiso.services.qfield import valuation_at_one

Vector = dict[Hashable, Any]


def vec_axpy(target: Vector, alpha, source: Vector) -> None:
    """In place ``target += alpha * source`` keeping the vector sparse."""
    for coord, value in source.items():
        new = target.get(coord, 0) + alpha * value
        if new:
            target[coord] = new
        else:
            target.pop(coord, None)


def vec_scale(alpha, source: Vector) -> Vector:
    if not alpha:
        return {}
    return {coord: alpha * value for coord, value in source.items()}


def vec_add(*vectors: Vector) -> Vector:
    out: Vector = {}
    for v in vectors:
        vec_axpy(out, 1, v)
    return out


class EchelonBasis:
    """Incrementally maintained reduced row echelon form over an exact field.

    ``key`` orders coordinates; the pivot of a row is its smallest coordinate.
    """

    def __init__(self, key: Callable[[Hashable], Any] | None = None):
        self.key = key
        self.rows: dict[Hashable, tuple[Vector, Vector]] = {}
        self.labels: list[Hashable] = []
        self.relations: list[Vector] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _pivot(self, vec: Vector) -> Hashable:
        return min(vec, key=self.key) if self.key else min(vec)

    def reduce(self, vec: Vector) -> tuple[Vector, Vector]:
        """Returns ``(residual, combo)`` with ``vec = sum(combo[l] * input[l]) + residual``."""
        residual = dict(vec)
        combo: Vector = {}
        for coord in [c for c in vec if c in self.rows]:
            factor = residual.get(coord)
            if not factor:
                continue
            row, row_combo = self.rows[coord]
            vec_axpy(residual, -factor, row)
            vec_axpy(combo, factor, row_combo)
        return residual, combo

    def insert(self, vec: Vector, label: Hashable) -> bool:
        """Adds an input vector; returns False (and records a relation) when dependent."""
        self.labels.append(label)
        residual, combo = self.reduce(vec)
        if not residual:
            relation = vec_scale(-1, combo)
            vec_axpy(relation, 1, {label: 1})
            self.relations.append(relation)
            return False
        row_combo = vec_scale(-1, combo)
        vec_axpy(row_combo, 1, {label: 1})
        pivot = self._pivot(residual)
        inv = 1 / residual[pivot]
        row = vec_scale(inv, residual)
        row_combo = vec_scale(inv, row_combo)
        for other_pivot, (other, other_combo) in self.rows.items():
            factor = other.get(pivot)
            if factor:
                vec_axpy(other, -factor, row)
                vec_axpy(other_combo, -factor, row_combo)
        self.rows[pivot] = (row, row_combo)
        return True

    def contains(self, vec: Vector) -> bool:
        residual, _ = self.reduce(vec)
        return not residual

    def express(self, vec: Vector) -> Vector | None:
        """Coefficients over the inserted labels, or None when outside the span."""
        residual, combo = self.reduce(vec)
        return None if residual else combo

    def basis_rows(self) -> list[Vector]:
        order = sorted(self.rows, key=self.key) if self.key else sorted(self.rows)
        return [self.rows[p][0] for p in order]


class LatticeEchelon:
    """Hermite form of a module over the local ring of Q(q) at q=1.

    Rows are triangular with respect to ``key``; among rows competing for a
    pivot the one of smallest q=1 valuation is kept, so every elimination
    step uses a factor regular at q=1.
    """

    def __init__(self, key: Callable[[Hashable], Any]):
        self.key = key
        self.rows: dict[Hashable, tuple[Vector, Vector]] = {}
        self.relations: list[Vector] = []

    def insert(self, vec: Vector, label: Hashable) -> None:
        g = dict(vec)
        combo: Vector = {label: 1}
        while g:
            lead = min(g, key=self.key)
            if lead not in self.rows:
                self.rows[lead] = (g, combo)
                return
            row, row_combo = self.rows[lead]
            if valuation_at_one(g[lead]) < valuation_at_one(row[lead]):
                self.rows[lead] = (g, combo)
                g, combo = dict(row), dict(row_combo)
                row, row_combo = self.rows[lead]
            factor = g[lead] / row[lead]
            vec_axpy(g, -factor, row)
            vec_axpy(combo, -factor, row_combo)
        self.relations.append(combo)

    def decompose(self, target: Vector) -> tuple[str, Vector]:
        """Classifies ``target``.

        Returns ``('module', combo)`` when it lies in the module (all
        coordinates regular at q=1), ``('span', combo)`` when it only lies in
        the Q(q)-span, ``('outside', {})`` otherwise.
        """
        t = dict(target)
        combo: Vector = {}
        integral = True
        while t:
            lead = min(t, key=self.key)
            if lead not in self.rows:
                return 'outside', {}
            row, row_combo = self.rows[lead]
            factor = t[lead] / row[lead]
            if valuation_at_one(factor) < 0:
                integral = False
            vec_axpy(t, -factor, row)
            vec_axpy(combo, factor, row_combo)
        return ('module' if integral else 'span'), combo
