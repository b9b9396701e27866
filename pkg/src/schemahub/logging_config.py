import logging
import os
import sys
from typing import Optional


def configure_logging(level: Optional[str] = None):
    level = (level or os.getenv('LOG_LEVEL', 'INFO')).upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format='[%(asctime)s] [%(process)d] [%(levelname)s] %(name)s: %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        stream=sys.stderr,
    )
    logging.getLogger('schemahub').setLevel(getattr(logging, level, logging.INFO))
    for name in ('gunicorn.error', 'uvicorn.error'):
        server_logger = logging.getLogger(name)
        if server_logger.handlers:
            root = logging.getLogger()
            for h in server_logger.handlers:
                root.addHandler(h)
            root.setLevel(server_logger.level)
            break
