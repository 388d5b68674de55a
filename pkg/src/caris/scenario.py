"""Per-context configuration: feature gates, phrases, templates, providers.

Scenario files are plain JSON documents; swapping one reconfigures the
whole interaction surface without code changes.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator


class FeatureFlags(BaseModel):
    photo_capture: bool = True
    stt: bool = True
    tts: bool = True
    llm: bool = True


class QuickPhrase(BaseModel):
    text: str
    triggers: list[str] = Field(default_factory=list)


class TemplateSpec(BaseModel):
    template_id: str
    body: str
    required_vars: list[str] = Field(default_factory=list)


class ProviderSpec(BaseModel):
    name: str
    kind: Literal["cloud", "local", "mock"]
    model: str = ""
    supports_images: bool = False
    endpoint: Optional[str] = None
    credentials_env: Optional[str] = None
    options: dict = Field(default_factory=dict)


class TeleopConfig(BaseModel):
    max_linear: float = 0.3
    max_angular: float = 0.5


class ScenarioConfig(BaseModel):
    name: str
    enabled_features: FeatureFlags = Field(default_factory=FeatureFlags)
    quick_phrases: list[QuickPhrase] = Field(default_factory=list)
    templates: list[TemplateSpec] = Field(default_factory=list)
    default_role: str = ""
    provider: str = "mock"
    providers: list[ProviderSpec] = Field(
        default_factory=lambda: [ProviderSpec(name="mock", kind="mock", model="mock")]
    )
    teleop: TeleopConfig = Field(default_factory=TeleopConfig)

    @model_validator(mode="after")
    def _check(self) -> "ScenarioConfig":
        if not self.name:
            raise ValueError("scenario name must be non-empty")
        names = [p.name for p in self.providers]
        if len(set(names)) != len(names):
            raise ValueError("provider names must be unique")
        if self.provider not in names:
            raise ValueError(f"default provider {self.provider!r} is not defined")
        ids = [t.template_id for t in self.templates]
        if len(set(ids)) != len(ids):
            raise ValueError("template ids must be unique")
        f = self.enabled_features
        if not (f.stt or f.tts or f.llm):
            raise ValueError("at least one communication channel must be enabled")
        return self

    def template(self, template_id: str) -> Optional[TemplateSpec]:
        for t in self.templates:
            if t.template_id == template_id:
                return t
        return None

    def provider_spec(self, name: str) -> Optional[ProviderSpec]:
        for p in self.providers:
            if p.name == name:
                return p
        return None


def load_scenario(path: str | Path) -> ScenarioConfig:
    return ScenarioConfig.model_validate(json.loads(Path(path).read_text(encoding="utf-8")))
