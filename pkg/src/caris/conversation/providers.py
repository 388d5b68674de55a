"""Language-model provider adapters.

The mock provider is a pure function of its inputs and is the only
backend the test suite needs. The cloud adapter speaks a Gemini-style
REST dialect; the local adapter speaks the OpenAI chat-completions
dialect that llama.cpp/ollama-style servers expose. Both take their
endpoint from the provider spec and credentials from the environment
variable the spec names.
"""

from __future__ import annotations

import asyncio
import base64
import os
from dataclasses import dataclass, field
from typing import Optional

import httpx

from caris.conversation.exchange import Speaker
from caris.errors import ProviderUnavailable
from caris.scenario import ProviderSpec


@dataclass
class ProviderRequest:
    role_prompt: str
    messages: list[tuple[str, str]]
    image: Optional[bytes] = None


class Provider:
    def __init__(self, spec: ProviderSpec):
        self.spec = spec

    @property
    def name(self) -> str:
        return self.spec.name

    @property
    def supports_images(self) -> bool:
        return self.spec.supports_images

    async def complete(self, request: ProviderRequest) -> str:
        raise NotImplementedError


class MockProvider(Provider):
    """Deterministic echo: "role:<role>|echo:<last text>[|image:<n>B]".

    Options: stall_s delays the reply (useful for latency tests), fail
    raises ProviderUnavailable.
    """

    def __init__(self, spec: ProviderSpec):
        super().__init__(spec)
        self.stall_s = float(spec.options.get("stall_s", 0.0))
        self.fail = bool(spec.options.get("fail", False))
        self.calls: list[ProviderRequest] = []

    async def complete(self, request: ProviderRequest) -> str:
        self.calls.append(request)
        if self.stall_s > 0:
            await asyncio.sleep(self.stall_s)
        if self.fail:
            raise ProviderUnavailable("mock provider configured to fail")
        parts = []
        if request.role_prompt:
            parts.append(f"role:{request.role_prompt}")
        last_text = request.messages[-1][1] if request.messages else ""
        parts.append(f"echo:{last_text}")
        if request.image is not None:
            parts.append(f"image:{len(request.image)}B")
        return "|".join(parts)


def _credential(spec: ProviderSpec) -> str:
    if not spec.credentials_env:
        return ""
    value = os.environ.get(spec.credentials_env)
    if value is None:
        raise ProviderUnavailable(
            f"credentials environment variable {spec.credentials_env} is not set"
        )
    return value


class GeminiProvider(Provider):
    """Cloud adapter for generateContent-style endpoints."""

    async def complete(self, request: ProviderRequest) -> str:
        key = _credential(self.spec)
        if not self.spec.endpoint:
            raise ProviderUnavailable(f"provider {self.name} has no endpoint configured")
        url = f"{self.spec.endpoint.rstrip('/')}/v1beta/models/{self.spec.model}:generateContent"
        contents = []
        for speaker, text in request.messages:
            role = "model" if speaker == Speaker.MODEL else "user"
            contents.append({"role": role, "parts": [{"text": text}]})
        if request.image is not None and contents:
            contents[-1]["parts"].append(
                {
                    "inline_data": {
                        "mime_type": "image/png",
                        "data": base64.b64encode(request.image).decode("ascii"),
                    }
                }
            )
        body = {"contents": contents}
        if request.role_prompt:
            body["system_instruction"] = {"parts": [{"text": request.role_prompt}]}
        try:
            async with httpx.AsyncClient() as client:
                resp = await client.post(url, json=body, params={"key": key}, timeout=None)
                resp.raise_for_status()
                doc = resp.json()
            return doc["candidates"][0]["content"]["parts"][0]["text"]
        except (httpx.HTTPError, KeyError, IndexError) as e:
            raise ProviderUnavailable(f"{self.name}: {e}") from e


class LocalOpenAIProvider(Provider):
    """Local adapter for OpenAI-compatible chat-completions servers."""

    async def complete(self, request: ProviderRequest) -> str:
        if not self.spec.endpoint:
            raise ProviderUnavailable(f"provider {self.name} has no endpoint configured")
        url = f"{self.spec.endpoint.rstrip('/')}/v1/chat/completions"
        messages = []
        if request.role_prompt:
            messages.append({"role": "system", "content": request.role_prompt})
        for speaker, text in request.messages:
            role = "assistant" if speaker == Speaker.MODEL else "user"
            messages.append({"role": role, "content": text})
        if request.image is not None and messages:
            data_uri = "data:image/png;base64," + base64.b64encode(request.image).decode("ascii")
            messages[-1] = {
                "role": "user",
                "content": [
                    {"type": "text", "text": messages[-1]["content"]},
                    {"type": "image_url", "image_url": {"url": data_uri}},
                ],
            }
        headers = {}
        if self.spec.credentials_env:
            headers["Authorization"] = f"Bearer {_credential(self.spec)}"
        try:
            async with httpx.AsyncClient() as client:
                resp = await client.post(
                    url,
                    json={"model": self.spec.model, "messages": messages},
                    headers=headers,
                    timeout=None,
                )
                resp.raise_for_status()
                doc = resp.json()
            return doc["choices"][0]["message"]["content"]
        except (httpx.HTTPError, KeyError, IndexError) as e:
            raise ProviderUnavailable(f"{self.name}: {e}") from e


_KIND_TO_CLASS = {
    "mock": MockProvider,
    "cloud": GeminiProvider,
    "local": LocalOpenAIProvider,
}


def build_provider(spec: ProviderSpec) -> Provider:
    return _KIND_TO_CLASS[spec.kind](spec)


def build_providers(specs: list[ProviderSpec]) -> dict[str, Provider]:
    return {spec.name: build_provider(spec) for spec in specs}
