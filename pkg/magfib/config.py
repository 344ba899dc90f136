
import logging
import os
from pathlib import Path
from dotenv import load_dotenv

load_dotenv()

BASE_DIR = Path(__file__).parent.parent.resolve()

LOG_LEVEL = os.getenv('MAGFIB_LOG_LEVEL', 'WARNING')
JOBS = int(os.getenv('MAGFIB_JOBS', '1'))
OUTPUT_FORMAT = os.getenv('MAGFIB_OUTPUT_FORMAT', 'table')
MAX_CELLS = int(os.getenv('MAGFIB_MAX_CELLS', '200000'))
CHECK_STEPS = os.getenv('MAGFIB_CHECK_STEPS', 'false').lower() in ('1', 'true', 'yes')

class Settings:
    def __init__(self):
        self.log_level = os.getenv('MAGFIB_LOG_LEVEL', LOG_LEVEL)
        self.jobs = int(os.getenv('MAGFIB_JOBS', str(JOBS)))
        self.output_format = os.getenv('MAGFIB_OUTPUT_FORMAT', OUTPUT_FORMAT)
        self.max_cells = int(os.getenv('MAGFIB_MAX_CELLS', str(MAX_CELLS)))
        self.check_steps = os.getenv('MAGFIB_CHECK_STEPS', str(CHECK_STEPS)).lower() in ('1', 'true', 'yes')

def get_settings():
    return Settings()

_configured = False

def configure_logging(level: str | None = None):
    """Route library logs to stderr; stdout is reserved for command output."""
    global _configured
    if _configured:
        return
    logging.basicConfig(
        level=(level or get_settings().log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    _configured = True
