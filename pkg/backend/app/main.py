# backend/app/main.py
"""
padiq 命令行入口 (在 backend/ 下运行 `python -m app.main <子命令> ...`)。

退出码: 0 成功；1 领域错误或验收用例失败；2 参数错误或型描述格式错误。
报告写到 stdout，日志与诊断写到 stderr。
"""
import logging
import sys
from typing import List, Optional

from .cli import commands, render
from .core.config import log_loaded_settings
from .core.exceptions import FormFormatError, PadiqError
from .core.logging_config import setup_logging

logger = logging.getLogger(__name__)


def run(argv: Optional[List[str]] = None) -> int:
    try:
        args = commands.parse(argv)
    except SystemExit as exc:
        # argparse 的用法错误 (2) 与 --help (0)
        return exc.code if isinstance(exc.code, int) else 2

    setup_logging(args.log_level)
    log_loaded_settings()
    errors = render.make_console(sys.stderr)

    try:
        outcome = commands.dispatch(args)
    except FormFormatError as exc:
        logger.warning(f"malformed form description at {exc.field}")
        errors.print(f"error: invalid form description: {exc}")
        return 2
    except PadiqError as exc:
        errors.print(f"error: {exc}")
        return 1

    if args.json:
        sys.stdout.write(render.to_json(outcome.report) + "\n")
    else:
        outcome.renderer(render.make_console(sys.stdout), outcome.report)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(run())
