#!/usr/bin/env python3
"""
================================================================
❌ WORKBENCH ERRORS - Exception hierarchy
Every failure the workbench can signal, each with its own exit code
================================================================
"""

from typing import Any, Dict, Optional


class WorkbenchError(Exception):
    """Base class for all workbench failures"""
    exit_code: int = 1

    def __init__(self, message: str, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.detail = detail or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
            "detail": self.detail,
        }


class InvariantViolation(WorkbenchError):
    """A checked property failed; names the property"""
    exit_code = 1

    def __init__(self, prop: str, message: str, detail: Optional[Dict[str, Any]] = None):
        super().__init__(f"[{prop}] {message}", detail)
        self.prop = prop


class ConfigError(WorkbenchError):
    exit_code = 2


class BudgetExceededError(WorkbenchError):
    """Enumeration would exceed the configured cell/word budget"""
    exit_code = 4

    def __init__(self, what: str, required: int, budget: int):
        super().__init__(
            f"{what} needs {required} items, budget is {budget}",
            {"required": required, "budget": budget},
        )
        self.required = required
        self.budget = budget


class DomainError(WorkbenchError):
    exit_code = 5


class PreconditionError(WorkbenchError):
    exit_code = 5


class EmptyResultError(WorkbenchError):
    """Blow-up window contains nothing"""
    exit_code = 5


IO_EXIT_CODE = 3
