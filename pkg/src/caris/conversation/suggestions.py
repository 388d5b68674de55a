"""Context-sensitive prompt suggestions from scenario quick phrases.

Phrases whose trigger keywords appear in the recent transcript rank
first; matching is exact lowercase substring so behavior is fully
deterministic. An optional generator may contribute one extra
suggestion without exceeding the cap.
"""

from __future__ import annotations

from typing import Callable, Optional

MAX_SUGGESTIONS = 5


def suggest_prompts(
    scenario,
    recent_transcript: str,
    limit: int = MAX_SUGGESTIONS,
    generator: Optional[Callable[[str], str]] = None,
) -> list[str]:
    text = recent_transcript.lower()
    triggered, untriggered = [], []
    for phrase in scenario.quick_phrases:
        if any(k.lower() in text for k in phrase.triggers):
            triggered.append(phrase.text)
        else:
            untriggered.append(phrase.text)
    ranked = triggered + untriggered
    if generator is not None:
        return ranked[: limit - 1] + [generator(recent_transcript)]
    return ranked[:limit]
