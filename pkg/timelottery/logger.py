import logging

from rich.console import Console
from rich.logging import RichHandler


logger = logging.getLogger("timelottery")

logger.setLevel(logging.INFO)

if not logger.handlers:
    # stdout is reserved for command output
    rich_handler = RichHandler(
        console=Console(stderr=True),
        show_path=False,
        show_level=True,
        show_time=False,
    )
    rich_handler.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(rich_handler)

logger.propagate = False


def set_verbose(verbose: bool) -> None:
    logger.setLevel(logging.DEBUG if verbose else logging.INFO)
