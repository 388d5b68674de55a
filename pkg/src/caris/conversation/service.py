"""Orchestrates language interaction: completions, roles, and transcripts."""

from __future__ import annotations

import asyncio
import time
from typing import Optional

from caris.conversation.exchange import ChatExchange, Speaker
from caris.conversation.providers import Provider, ProviderRequest
from caris.errors import EmptyPrompt, ImagesUnsupported, ProviderUnavailable
from caris.recorder.events import EventKind

DEFAULT_TIMEOUT_S = 30.0
HISTORY_WINDOW = 20


class ConversationService:
    def __init__(
        self,
        providers: dict[str, Provider],
        default_provider: str = "mock",
        recorder=None,
        timeout_s: float = DEFAULT_TIMEOUT_S,
        history_window: int = HISTORY_WINDOW,
    ):
        self.providers = providers
        self.default_provider = default_provider
        self.recorder = recorder
        self.timeout_s = timeout_s
        self.history_window = history_window
        self.role = ""
        self.transcript: list[tuple[str, str]] = []
        self._exchange_counter = 0

    def set_role(self, role_text: str) -> None:
        """Role text rides along as the leading system-style message."""
        self.role = role_text
        if self.recorder is not None:
            self.recorder.record(
                EventKind.SCENARIO, {"action": "set_role", "role": role_text}
            )

    def add_utterance(self, speaker: str, text: str) -> None:
        self.transcript.append((speaker, text))

    def recent_transcript(self, window: int = HISTORY_WINDOW) -> str:
        return "\n".join(text for _, text in self.transcript[-window:])

    async def complete(
        self,
        prompt: str,
        provider_name: Optional[str] = None,
        image: Optional[bytes] = None,
        person_id: Optional[int] = None,
    ) -> ChatExchange:
        """Run one completion; success or failure, exactly one exchange is recorded."""
        name = provider_name or self.default_provider
        provider = self.providers.get(name)
        if provider is None:
            raise ProviderUnavailable(f"provider {name!r} is not registered")
        if not prompt or not prompt.strip():
            raise EmptyPrompt("completion request carried no prompt text")
        if image is not None and not provider.supports_images:
            raise ImagesUnsupported(f"provider {name!r} does not accept images")

        self.transcript.append((Speaker.WIZARD, prompt))
        messages = self.transcript[-self.history_window:]
        self._exchange_counter += 1
        exchange = ChatExchange(
            exchange_id=f"ex-{self._exchange_counter:04d}",
            timestamp=time.time(),
            provider=provider.name,
            model=provider.spec.model,
            role_prompt=self.role,
            messages=list(messages),
            person_id=person_id,
        )
        start = time.monotonic()
        error: Optional[Exception] = None
        try:
            exchange.response = await asyncio.wait_for(
                provider.complete(ProviderRequest(self.role, messages, image)),
                timeout=self.timeout_s,
            )
        except asyncio.TimeoutError:
            error = ProviderUnavailable(f"provider {name!r} timed out after {self.timeout_s}s")
        except ProviderUnavailable as e:
            error = e
        except Exception as e:  # adapter bugs surface as provider failures
            error = ProviderUnavailable(f"provider {name!r} failed: {e}")
        exchange.latency_ms = int((time.monotonic() - start) * 1000)
        if error is not None:
            exchange.error = str(error)
        if self.recorder is not None:
            self.recorder.record_llm(exchange, image=image)
        if error is not None:
            raise error
        self.transcript.append((Speaker.MODEL, exchange.response))
        return exchange
