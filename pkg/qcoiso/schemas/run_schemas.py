from pydantic import BaseModel, Field, model_validator
from typing import Literal, Optional
from pathlib import Path

class RunConfig(BaseModel):
    command: Literal['roots', 'classical', 'verify', 'solve', 'recipe-validate', 'recipe-show']
    type: Optional[str] = None
    rank: Optional[int] = Field(None, ge=1)
    beta: Optional[str] = None
    max_degree: Optional[int] = Field(None, ge=1)
    jobs: Optional[int] = Field(None, ge=0)
    recipe: Optional[Path] = None
    templates: Optional[Path] = None
    identity: Optional[str] = None
    order: Literal['deglex', 'revlex'] = 'deglex'
    output: Optional[Path] = None
    format: Literal['text', 'json'] = 'json'
    timings: bool = True
    force: bool = False

    @model_validator(mode='after')
    def case_or_recipe(self) -> 'RunConfig':
        uses_case = self.command in ('roots', 'classical', 'recipe-show') or (self.command == 'verify' and self.recipe is None)
        if uses_case:
            if self.type is None or self.rank is None:
                raise ValueError(f'{self.command} needs --type and --rank')
            if self.command != 'roots' and self.beta is None:
                raise ValueError(f'{self.command} needs --beta')
        if self.command == 'recipe-validate' and self.recipe is None:
            raise ValueError('recipe validate needs a recipe file')
        if self.command == 'solve' and (self.identity is None) == (self.templates is None):
            raise ValueError('solve needs exactly one of an identity name or --templates')
        return self
