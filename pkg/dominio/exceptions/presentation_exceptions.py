"""
Presentation layer specific exceptions.
"""

from typing import Any, List, Optional

from .base_exceptions import PresentationException


class ConsoleException(PresentationException):
    """
    Command-line argument errors.

    Used for malformed ``--set`` overrides, unknown subcommands and similar
    problems detected before any computation starts.
    """

    def __init__(
        self,
        command: str,
        command_args: Optional[List[str]] = None,
        user_input: Optional[str] = None,
        **kwargs: Any,
    ) -> None:
        context = kwargs.get("context") or {}
        context.update(
            {
                "command": command,
                "command_args": list(command_args or []),
                "user_input": user_input,
            }
        )
        kwargs["context"] = context
        kwargs.setdefault("user_message", f"Argumento inválido para '{command}'")
        super().__init__(f"Console error in '{command}': {user_input}", **kwargs)
