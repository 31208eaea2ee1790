import sys

import click

from timelottery.cli_parser import app
from timelottery.errors import TimeLotteryError
from timelottery.logger import logger

EXIT_ERROR = 1


def run(argv: list[str] | None = None) -> int:
    """
    Runs the CLI and returns its exit code: 0 on success, 1 for usage or
    validation errors, 2 when an audit or axiom check reports failures.
    """
    try:
        result = app(args=argv, prog_name="tlot", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_ERROR
    except click.Abort:
        logger.error("CLI: Aborted.")
        return EXIT_ERROR
    except TimeLotteryError as e:
        logger.error(f"CLI: {e}")
        return EXIT_ERROR
    except OSError as e:
        logger.error(f"CLI: Could not write output: {e}")
        return EXIT_ERROR
    return result if isinstance(result, int) else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
