import sys

from app.cli.router import main
from app.core.logging import configure_logging, get_logger

# Configure logging
configure_logging()
logger = get_logger()

if __name__ == "__main__":
    sys.exit(main())
