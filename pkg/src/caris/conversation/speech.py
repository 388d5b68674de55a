"""Speech seams: pluggable transcription and robot-voiced speech.

Real engines sit behind these adapters; the shipped mock keeps the suite
hermetic. speak() produces exactly one /tts publish and one tts event.
"""

from __future__ import annotations

from typing import Callable, Optional

from caris.errors import AdapterUnavailable, DisabledByScenario
from caris.recorder.events import EventKind


class MockTranscriber:
    """Echoes UTF-8 payloads, otherwise returns its embedded fixture text."""

    def __init__(self, text: str = "mock transcript"):
        self.text = text

    def transcribe(self, audio: bytes) -> str:
        try:
            decoded = audio.decode("utf-8")
        except UnicodeDecodeError:
            return self.text
        return decoded if decoded.strip() else self.text


class SpeechService:
    def __init__(
        self,
        scenario_provider: Callable[[], object],
        bridge=None,
        transcriber=None,
        recorder=None,
    ):
        self._scenario = scenario_provider
        self.bridge = bridge
        self.transcriber = transcriber
        self.recorder = recorder

    async def speak(self, text: str, person_id: Optional[int] = None, note: Optional[str] = None):
        if not self._scenario().enabled_features.tts:
            raise DisabledByScenario("TTS is disabled by the active scenario")
        if self.bridge is None:
            raise AdapterUnavailable("no speech output channel is connected")
        handle = await self.bridge.say(text)
        if self.recorder is not None:
            self.recorder.record(
                EventKind.TTS, {"text": text, "topic": handle.topic}, person_id, note
            )
        return handle

    def transcribe(self, audio: bytes, source: str = "wizard", note: Optional[str] = None) -> str:
        if not self._scenario().enabled_features.stt:
            raise DisabledByScenario("STT is disabled by the active scenario")
        if self.transcriber is None:
            raise AdapterUnavailable("no transcription adapter is configured")
        text = self.transcriber.transcribe(audio)
        if self.recorder is not None:
            self.recorder.record(EventKind.STT, {"text": text, "source": source}, note=note)
        return text
