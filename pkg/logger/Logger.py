import logging.config
from pathlib import Path
from config.Configuration import Configuration

log: logging.Logger = None


def init_logger() -> logging.Logger:
    global log
    if log:
        return log

    config = Configuration.get_configuration()
    level: int = logging.getLevelName(config.logging.level.upper())
    if not isinstance(level, int):
        level = logging.WARNING

    # Diagnostics go to stderr, results to stdout
    logging.basicConfig(level=level)

    # Removing the external loggers tracing:
    logging.getLogger("robot").setLevel(logging.WARNING)

    log = logging.getLogger(__file__)
    log.name = "Certify"
    log.setLevel(level)

    if config.logging.logs_dir:
        Path(config.logging.logs_dir).mkdir(parents=True, exist_ok=True)
        file_handler: logging.Handler = logging.FileHandler(f'{config.logging.logs_dir}/certify.log')
        file_handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
        log.addHandler(file_handler)

    return log
