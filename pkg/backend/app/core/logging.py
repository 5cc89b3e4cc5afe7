import logfire
from .config import settings

_configured = False

def configure_logging():
    """Configure Logfire logging for the application."""
    global _configured
    if _configured:
        return

    console = logfire.ConsoleOptions(min_log_level=settings.LOG_LEVEL) if settings.LOG_CONSOLE else False
    logfire.configure(
        token=settings.LOGFIRE_TOKEN,
        send_to_logfire="if-token-present",
        service_name="likeminded-bench",
        console=console,
    )
    _configured = True

    logfire.debug("Logging configured for {app_name}", app_name=settings.APP_NAME)

def get_logger():
    """Get a configured logger instance."""
    return logfire
