# backend/app/cli/render.py
"""
报告渲染: JSON (机器格式，与报告模型逐字段对应) 与 rich 纯文本 (给人看)。

两种格式都只依赖报告内容，同样的输入总是得到逐字节相同的输出。
"""
import json
from typing import Iterable, List, Sequence, Union

from pydantic import BaseModel
from rich.console import Console
from rich.table import Table

from app.models import (
    FixtureResult,
    GapReport,
    GlobalVerdict,
    JordanSplitting,
    LocalAnalysis,
    RepVerdict,
    ScanReport,
    SpectrumReport,
    Theorem3Report,
    UniversalityReport,
)

Report = Union[BaseModel, Sequence[BaseModel]]

# 行宽固定，输出不随终端变化
CONSOLE_WIDTH = 100


def make_console(file) -> Console:
    return Console(file=file, width=CONSOLE_WIDTH, color_system=None, markup=False, highlight=False, emoji=False)


def to_json(report: Report) -> str:
    if isinstance(report, BaseModel):
        data = report.model_dump(mode="json")
    else:
        data = [item.model_dump(mode="json") for item in report]
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False)


def _classes(classes: Iterable) -> str:
    labels = [cls.label() for cls in classes]
    return "{" + ", ".join(labels) + "}" if labels else "{}"


def _ints(values: Sequence[int], limit: int = 40) -> str:
    shown = ", ".join(str(v) for v in values[:limit])
    if len(values) > limit:
        shown += f", ... ({len(values)} total)"
    return "{" + shown + "}"


# --- 各报告的文本形式 ---

def render_splitting(console: Console, splitting: JordanSplitting) -> None:
    table = Table(title=f"Jordan splitting over Z_{splitting.prime}")
    for column in ("scale", "rank", "type", "norm", "content"):
        table.add_column(column)
    for component in splitting.components:
        kind = "proper" if component.proper else "improper"
        content = ",".join(str(u) for u in component.units) if component.proper else \
            " + ".join(tag.value for tag in component.blocks())
        table.add_row(f"{splitting.prime}^{component.scale_exp}", str(component.rank), kind,
                      f"{splitting.prime}^{component.norm_exp}", content)
    console.print(table)
    console.print(f"t = {splitting.t}, volume = {splitting.prime}^{splitting.volume_exp}")


def render_rep(console: Console, verdict: RepVerdict) -> None:
    kind = "primitive" if verdict.primitive else "non-primitive"
    console.print(f"{verdict.target} over Z_{verdict.prime} ({kind}): {verdict.decided.value}")
    if verdict.represented:
        console.print(f"  witness {verdict.witness} mod {verdict.prime}^{verdict.witness_level}, "
                      f"gradient valuation {verdict.gradient_valuation}")
    else:
        console.print(f"  no solution mod {verdict.prime}^{verdict.exhaustion_level}")


def render_spectrum(console: Console, report: SpectrumReport) -> None:
    kind = "primitive" if report.primitive else "non-primitive"
    console.print(f"{kind} spectrum over Z_{report.prime}, e <= {report.e_max}")
    console.print(f"  found:   {_classes(report.found)}")
    console.print(f"  missing: {_classes(report.missing)}")


def render_universality(console: Console, report: UniversalityReport) -> None:
    console.print(f"{report.form} over Z_{report.prime}: {report.splitting}")
    console.print(f"  universal: {'yes' if report.universal else 'no'}"
                  + (f" (missing {_classes(report.universal_missing)})" if report.universal_missing else ""))
    verdict = report.primitively_universal.value
    if report.e_max is not None:
        verdict += f" (e_max = {report.e_max})"
    console.print(f"  primitively universal: {verdict}")
    for entry in report.trace:
        console.print(f"    [{entry.rule.value}] {entry.message}")
    if report.missing:
        console.print(f"  not primitively represented: {_classes(report.missing)}")


def render_analysis(console: Console, analyses: List[LocalAnalysis]) -> None:
    for analysis in analyses:
        render_splitting(console, analysis.splitting)
        det = analysis.determinant_class
        console.print(f"det class ({det.order}, {det.unit_rep}), Hasse {analysis.hasse:+d}, "
                      f"{'isotropic' if analysis.isotropic else 'anisotropic'}")
        render_universality(console, analysis.report)
        console.print()


def render_gap(console: Console, gap: GapReport) -> None:
    console.print(f"anisotropic over Z_{gap.prime} (scaled by {gap.prime}^{gap.scale_shift}, t = {gap.t})")
    console.print(f"  bound {gap.bound}, empirical minimum {gap.empirical_min}")


def render_scan(console: Console, scan: ScanReport) -> None:
    console.print(f"{scan.form} up to {scan.bound}: {scan.represented_count} values represented")
    console.print(f"  excluded: {_ints(scan.excluded)}")
    console.print(f"  primitively excluded: {_ints(scan.primitive_excluded)}")


def render_verdict(console: Console, verdict: GlobalVerdict) -> None:
    console.print(f"{verdict.form}: relevant primes {list(verdict.relevant_primes)}")
    table = Table()
    for column in ("p", "universal", "primitively universal", "rules"):
        table.add_column(column)
    for p, report in verdict.per_prime.items():
        table.add_row(str(p), "yes" if report.universal else "no", report.primitively_universal.value,
                      ", ".join(rule.value for rule in report.fired()))
    console.print(table)
    console.print(f"almost universal: {verdict.almost_universal.value}")
    console.print(f"almost primitively universal: {verdict.almost_primitively_universal.value}")
    for witness in verdict.progression_witnesses:
        kind = "primitively " if witness.primitive else ""
        console.print(f"  no integer = {witness.residue} mod {witness.modulus} is {kind}represented "
                      f"(Z_{witness.prime}, target {witness.target})")
    for note in verdict.notes:
        console.print(f"  note: {note}")


def render_theorem3(console: Console, report: Theorem3Report) -> None:
    table = Table(title=f"discriminant criterion for {report.form}")
    for column in ("hypothesis", "status", "detail"):
        table.add_column(column)
    for hypothesis in report.hypotheses:
        table.add_row(hypothesis.name, hypothesis.status.value, hypothesis.detail)
    console.print(table)
    if report.applicable:
        console.print(f"almost primitively universal: {report.verdict.value}; local cross-check "
                      f"{'agrees' if report.cross_check else 'DISAGREES'}")
    else:
        console.print(f"not applicable: {', '.join(report.failed())}")


def render_fixtures(console: Console, results: List[FixtureResult]) -> None:
    for result in results:
        console.print(f"{'PASS' if result.passed else 'FAIL'}  {result.name}: {result.detail}")
    passed = sum(result.passed for result in results)
    console.print(f"{passed}/{len(results)} fixtures passed")
