"""One language-model request/response with its full context."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass
class ChatExchange:
    exchange_id: str
    timestamp: float
    provider: str
    model: str
    role_prompt: str
    messages: list[tuple[str, str]]  # (speaker, text), speaker in {wizard, user, model}
    image: Optional[str] = None      # path reference, never inline bytes
    response: Optional[str] = None   # present iff the provider call succeeded
    error: Optional[str] = None
    latency_ms: int = 0
    person_id: Optional[int] = None

    def to_dict(self) -> dict:
        doc = {
            "exchange_id": self.exchange_id,
            "timestamp": self.timestamp,
            "provider": self.provider,
            "model": self.model,
            "role_prompt": self.role_prompt,
            "messages": [[speaker, text] for speaker, text in self.messages],
            "latency_ms": self.latency_ms,
        }
        if self.image is not None:
            doc["image"] = self.image
        if self.response is not None:
            doc["response"] = self.response
        if self.error is not None:
            doc["error"] = self.error
        if self.person_id is not None:
            doc["person_id"] = self.person_id
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ChatExchange":
        return cls(
            exchange_id=doc["exchange_id"],
            timestamp=doc["timestamp"],
            provider=doc["provider"],
            model=doc["model"],
            role_prompt=doc["role_prompt"],
            messages=[(m[0], m[1]) for m in doc["messages"]],
            image=doc.get("image"),
            response=doc.get("response"),
            error=doc.get("error"),
            latency_ms=doc["latency_ms"],
            person_id=doc.get("person_id"),
        )


class Speaker:
    WIZARD = "wizard"
    USER = "user"
    MODEL = "model"
