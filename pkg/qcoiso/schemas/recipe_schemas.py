from __future__ import annotations

import re

from pydantic import BaseModel, Field, model_validator
from typing import List, Literal, Optional, Tuple

_TOKEN = re.compile(r'\s*(?:(\[)|(\])|(,)|_q\^(-?\d+)|_q|_(-?\d+)|E(\d+)|([A-Za-z][A-Za-z0-9_]*))')


def parse_bracket_text(text: str) -> dict:
    """Reads ``[[E1,E2]_q,E3]_q^2`` style text into the dict form of :class:`BracketExprSchema`.

    ``[a,b]`` leaves the power unresolved, ``[a,b]_0`` is the plain commutator,
    ``[a,b]_q`` and ``[a,b]_q^k`` fix the exponent; bare names refer to earlier entries.
    """
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f'unexpected character at offset {pos} in {text!r}')
        tokens.append(m)
        pos = m.end()

    def expr(i: int) -> tuple[dict, int]:
        if i >= len(tokens):
            raise ValueError(f'unexpected end of {text!r}')
        m = tokens[i]
        if m.group(6):
            return {'gen': int(m.group(6))}, i + 1
        if m.group(7):
            return {'ref': m.group(7)}, i + 1
        if not m.group(1):
            raise ValueError(f'expected "[" , "E<i>" or a name in {text!r}')
        lhs, i = expr(i + 1)
        if i >= len(tokens) or not tokens[i].group(3):
            raise ValueError(f'expected "," in {text!r}')
        rhs, i = expr(i + 1)
        if i >= len(tokens) or not tokens[i].group(2):
            raise ValueError(f'expected "]" in {text!r}')
        i += 1
        power = None
        if i < len(tokens):
            s = tokens[i]
            if s.group(4) is not None:
                power, i = int(s.group(4)), i + 1
            elif s.group(0).strip() == '_q':
                power, i = 1, i + 1
            elif s.group(5) is not None:
                power, i = int(s.group(5)), i + 1
        return {'qbr': [lhs, rhs, power]}, i

    node, end = expr(0)
    if end != len(tokens):
        raise ValueError(f'trailing input in {text!r}')
    return node


class BracketExprSchema(BaseModel):
    """One node of a bracket tree: a generator E_i, a reference to an earlier named entry, or a q-bracket.

    ``qbr`` is ``[lhs, rhs, power]``; a null power is resolved from the weights of the operands.
    """
    gen: Optional[int] = Field(None, ge=1)
    ref: Optional[str] = None
    qbr: Optional[Tuple[BracketExprSchema, BracketExprSchema, Optional[int]]] = None

    @model_validator(mode='before')
    @classmethod
    def accept_text(cls, data):
        if isinstance(data, str):
            return parse_bracket_text(data)
        return data

    @model_validator(mode='after')
    def exactly_one_kind(self) -> 'BracketExprSchema':
        kinds = [k for k in ('gen', 'ref', 'qbr') if getattr(self, k) is not None]
        if len(kinds) != 1:
            raise ValueError('exactly one of "gen", "ref" or "qbr" must be given')
        return self

    def to_text(self) -> str:
        if self.gen is not None:
            return f'E{self.gen}'
        if self.ref is not None:
            return self.ref
        lhs, rhs, power = self.qbr
        suffix = '' if power is None else ('_q' if power == 1 else (f'_{power}' if power == 0 else f'_q^{power}'))
        return f'[{lhs.to_text()},{rhs.to_text()}]{suffix}'


class GeneratorSpec(BaseModel):
    name: str = Field(..., min_length=1)
    expr: BracketExprSchema
    group: Optional[str] = Field(None, description='Family label such as "(a)"')
    generator: bool = Field(True, description='False for auxiliary sub-expressions that are referenced but not part of B_h')


class RecipeSchema(BaseModel):
    type: Literal['A', 'B', 'C', 'D', 'E', 'F', 'G']
    rank: int = Field(..., ge=1)
    beta: str
    k_monomial: List[int]
    generators: List[GeneratorSpec] = Field(..., min_length=1)
    power_assignment: Literal['explicit', 'heuristic'] = 'explicit'
    notes: List[str] = Field(default_factory=list)

    @model_validator(mode='after')
    def k_monomial_matches_rank(self) -> 'RecipeSchema':
        if len(self.k_monomial) != self.rank:
            raise ValueError(f'k_monomial has {len(self.k_monomial)} entries for rank {self.rank}')
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ValueError('generator names must be unique')
        return self


BracketExprSchema.model_rebuild()


class TemplateSpec(BaseModel):
    """A product of bracket expressions, e.g. ``["[E2,[E2,E1]_q]_q^-1", "E3"]``."""
    label: str = Field(..., min_length=1)
    factors: List[BracketExprSchema] = Field(..., min_length=1)


class IdentitySchema(BaseModel):
    type: Literal['A', 'B', 'C', 'D', 'E', 'F', 'G']
    rank: int = Field(..., ge=1)
    description: Optional[str] = None
    target: List[BracketExprSchema] = Field(..., min_length=1)
    templates: List[TemplateSpec] = Field(default_factory=list)
    ideal_mode: bool = Field(False, description='Add every u*R*v Serre product of the target weight to the templates')
    auxiliary: List[TemplateSpec] = Field(default_factory=list, description='Extra relations whose u*R*v products may be used')

    @model_validator(mode='after')
    def something_to_solve_with(self) -> 'IdentitySchema':
        if not self.templates and not self.ideal_mode:
            raise ValueError('give templates or set ideal_mode')
        labels = [t.label for t in self.templates] + [t.label for t in self.auxiliary]
        if len(set(labels)) != len(labels):
            raise ValueError('template labels must be unique')
        return self
