"""Context-adaptable Wizard-of-Oz robot orchestration service."""

__version__ = "0.1.0"
