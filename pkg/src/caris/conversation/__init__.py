from caris.conversation.exchange import ChatExchange, Speaker
from caris.conversation.providers import (
    GeminiProvider,
    LocalOpenAIProvider,
    MockProvider,
    Provider,
    build_provider,
)
from caris.conversation.service import ConversationService
from caris.conversation.speech import MockTranscriber, SpeechService
from caris.conversation.suggestions import suggest_prompts
from caris.conversation.templates import Template, render_template

__all__ = [
    "ChatExchange",
    "Speaker",
    "Provider",
    "MockProvider",
    "GeminiProvider",
    "LocalOpenAIProvider",
    "build_provider",
    "ConversationService",
    "SpeechService",
    "MockTranscriber",
    "suggest_prompts",
    "Template",
    "render_template",
]
