# backend/app/cli/commands.py
"""
子命令定义。每个处理函数接收解析好的参数，调用服务层，返回 (报告, 文本渲染函数, 退出码)。
"""
import argparse
import logging
from fractions import Fraction
from typing import Callable, List, NamedTuple, Optional

from app.core.config import settings
from app.services import fixture_suite
from app.services.form_description import load_form
from app.services.global_scanner import (
    almost_universality_verdict,
    enumerate_values,
    relevant_primes,
    theorem3_check,
)
from app.services.lattice_model import jordan_decompose
from app.services.local_analyzer import (
    analyze_local,
    anisotropic_gap,
    decide_representation,
    is_primitively_universal_local,
    spectrum_report,
)
from app.services.padic_core import parse_target, require_prime
from . import render

logger = logging.getLogger(__name__)


class Outcome(NamedTuple):
    report: object
    renderer: Callable
    exit_code: int = 0


def _target(text: str) -> Fraction:
    try:
        return parse_target(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid target {text!r} (expected an integer, a/b or p^e*u)")


def _prime(text: str) -> int:
    try:
        return require_prime(int(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a prime")


# --- 处理函数 ---

def cmd_analyze(args) -> Outcome:
    L = load_form(args.form)
    primes: List[int] = args.primes or list(relevant_primes(L))
    return Outcome([analyze_local(L, p) for p in primes], render.render_analysis)


def cmd_jordan(args) -> Outcome:
    return Outcome(jordan_decompose(load_form(args.form), args.prime), render.render_splitting)


def cmd_rep(args) -> Outcome:
    verdict = decide_representation(load_form(args.form), args.prime, args.target, args.primitive)
    return Outcome(verdict, render.render_rep)


def cmd_spectrum(args) -> Outcome:
    report = spectrum_report(load_form(args.form), args.prime, args.emax, args.primitive)
    return Outcome(report, render.render_spectrum)


def cmd_universal(args) -> Outcome:
    return Outcome(is_primitively_universal_local(load_form(args.form), args.prime), render.render_universality)


def cmd_gap(args) -> Outcome:
    return Outcome(anisotropic_gap(load_form(args.form), args.prime), render.render_gap)


def cmd_scan(args) -> Outcome:
    report = enumerate_values(load_form(args.form), args.bound, threads=args.threads)
    return Outcome(report, render.render_scan)


def cmd_verdict(args) -> Outcome:
    return Outcome(almost_universality_verdict(load_form(args.form)), render.render_verdict)


def cmd_theorem3(args) -> Outcome:
    return Outcome(theorem3_check(load_form(args.form)), render.render_theorem3)


def cmd_verify_fixtures(args) -> Outcome:
    results = fixture_suite.run_fixtures(args.only)
    return Outcome(results, render.render_fixtures, 0 if all(r.passed for r in results) else 1)


# --- 解析器 ---

def _add_form(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--form", required=True,
                        help='型描述: 内联 JSON (如 \'{"diag":[1,1,1,9]}\') 或 JSON 文件路径')


def _add_prime(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-p", "--prime", type=_prime, required=True, help="素数 p")


def _add_output_options(parser: argparse.ArgumentParser, default_json, default_level) -> None:
    parser.add_argument("--json", action="store_true", default=default_json, help="输出 JSON 而不是文本")
    parser.add_argument("--log-level", default=default_level, help=f"日志级别 (默认 {settings.LOG_LEVEL})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padiq", description="p-adic 二次格的局部与全局 (本原) 万有性分析")
    _add_output_options(parser, False, None)
    # 子命令之后也接受 --json / --log-level，未给出时保留子命令之前的值
    output = argparse.ArgumentParser(add_help=False)
    _add_output_options(output, argparse.SUPPRESS, argparse.SUPPRESS)
    subparsers = parser.add_subparsers(dest="command", required=True)

    def sub_add(name: str, **kwargs) -> argparse.ArgumentParser:
        return subparsers.add_parser(name, parents=[output], **kwargs)

    analyze = sub_add("analyze", help="Jordan 分解、不变量与本原万有性")
    _add_form(analyze)
    analyze.add_argument("-p", "--prime", dest="primes", type=_prime, action="append",
                         help="素数 (可重复；默认取整除 2·det 的素数)")
    analyze.set_defaults(handler=cmd_analyze)

    jordan = sub_add("jordan", help="Z_p 上的 Jordan 分解")
    _add_form(jordan)
    _add_prime(jordan)
    jordan.set_defaults(handler=cmd_jordan)

    rep = sub_add("rep", help="判定 a 是否在 Z_p 上被 (本原) 表示")
    _add_form(rep)
    _add_prime(rep)
    rep.add_argument("-a", "--target", type=_target, required=True, help="目标值: 整数、a/b 或 p^e*u")
    rep.add_argument("--primitive", action="store_true", help="要求本原表示")
    rep.set_defaults(handler=cmd_rep)

    spec = sub_add("spectrum", help="被 (本原) 表示的平方类")
    _add_form(spec)
    _add_prime(spec)
    spec.add_argument("--emax", type=int, default=4, help="平方类的最大赋值 (默认 4)")
    spec.add_argument("--primitive", action="store_true")
    spec.set_defaults(handler=cmd_spectrum)

    universal = sub_add("universal", help="Z_p 上的万有性与本原万有性判定")
    _add_form(universal)
    _add_prime(universal)
    universal.set_defaults(handler=cmd_universal)

    gap = sub_add("gap", help="各向异性格的本原值缺口")
    _add_form(gap)
    _add_prime(gap)
    gap.set_defaults(handler=cmd_gap)

    scan = sub_add("scan", help="正定型在 [1, B] 内表示的整数")
    _add_form(scan)
    scan.add_argument("-B", "--bound", type=int, required=True)
    scan.add_argument("--threads", type=int, default=None,
                      help=f"枚举线程数 (默认取 PADIQ_THREADS={settings.PADIQ_THREADS})")
    scan.set_defaults(handler=cmd_scan)

    verdict = sub_add("verdict", help="几乎万有 / 几乎本原万有判定")
    _add_form(verdict)
    verdict.set_defaults(handler=cmd_verdict)

    theorem3 = sub_add("theorem3", help="判别式条件下的几乎本原万有判据")
    _add_form(theorem3)
    theorem3.set_defaults(handler=cmd_theorem3)

    fixtures = sub_add("verify-paper", aliases=["verify-fixtures"], help="运行验收用例集")
    fixtures.add_argument("--only", nargs="+", choices=sorted(fixture_suite.FIXTURES), default=None,
                          help="只运行指定的用例")
    fixtures.set_defaults(handler=cmd_verify_fixtures)
    return parser


def dispatch(args: argparse.Namespace) -> Outcome:
    logger.debug(f"running {args.command}")
    return args.handler(args)


def parse(argv: Optional[List[str]]) -> argparse.Namespace:
    return build_parser().parse_args(argv)
