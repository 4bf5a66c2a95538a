import logging
import sys
from datetime import datetime
from typing import Any


def setup_logger(name: str = "cpd_surfaces", log_file: str | None = None, level: int = logging.INFO) -> logging.Logger:
    """Configure logging for the CLI; stdout is reserved for data output."""
    logger = logging.getLogger(name)
    logger.setLevel(level)

    formatter = logging.Formatter("%(asctime)s | %(levelname)-8s | %(message)s", datefmt="%Y-%m-%d %H:%M:%S")

    # Drop handlers left by an earlier call
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    # File handler (optional)
    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


class ErrorTracker:
    """Track errors (exit 1) and failed verification checks (exit 2) during a CLI run."""

    errors: list[dict[str, Any]]
    failures: list[dict[str, Any]]

    def __init__(self) -> None:
        self.errors = []
        self.failures = []

    def add_error(self, stage: str, error: Exception) -> None:
        """Record an error."""
        self.errors.append(
            {
                "stage": stage,
                "error": str(error),
                "type": type(error).__name__,
                "timestamp": datetime.now().isoformat(),
            }
        )

    def add_failure(self, stage: str, surface: str, checks: list[str]) -> None:
        """Record verification checks that ran but did not pass."""
        self.failures.append({"stage": stage, "surface": surface, "checks": checks})

    def has_errors(self) -> bool:
        return len(self.errors) > 0

    def exit_code(self) -> int:
        if self.errors:
            return 1
        if self.failures:
            return 2
        return 0

    def get_summary(self) -> str:
        """Get a formatted error summary."""
        if not self.errors and not self.failures:
            return "No errors occurred."

        lines = [f"\n{'=' * 60}", "Error Summary:", f"{'=' * 60}"]
        for i, err in enumerate(self.errors, 1):
            lines.append(f"\n{i}. [{err['stage']}] {err['type']}: {err['error']}")
        for fail in self.failures:
            lines.append(f"\n- [{fail['stage']}] {fail['surface']}: failed {', '.join(fail['checks'])}")
        lines.append(f"{'=' * 60}\n")

        return "\n".join(lines)
