from __future__ import annotations

from src.corrtensor.printer import format_value
from src.criterion.evaluate import CriterionReport
from src.qcore.ensemble import Ensemble


def format_ensemble(ens: Ensemble) -> str:
    """One member per line, probability first, in ket notation where axis-aligned.

    The header counts pure members apart from mixed ones, which carry the
    white-noise mass a state below its threshold has left over.
    """
    pure = len(ens.pure_members())
    mixed = [m for m in ens.members if not m.is_pure]
    header = f"{pure} pure members"
    if mixed:
        weight = sum(m.probability for m in mixed)
        header += f" + {len(mixed)} mixed (weight {weight:.3e})"
    lines = [header]
    for m in ens.members:
        lines.append(f"  {format_value(m.probability, max_den=1024):>10}  {m.label()}")
    return "\n".join(lines)


def format_report(report: CriterionReport) -> str:
    lines = [
        f"state       {report.label}",
        f"S           {format_value(report.S)}",
        f"sum_s       {format_value(report.sum_s)}",
        f"sum_s_add   {format_value(report.sum_s_add)}",
        f"verdict     {report.verdict}" + (" (boundary)" if report.boundary else ""),
        f"feasible    {report.feasibility_ok}",
    ]
    if report.noise_threshold is not None:
        lines.append(f"threshold   {report.noise_threshold:.9f}")
    a = report.analysis
    if a is not None:
        for g in a.rebuild.groups:
            lines.append(
                f"  t_add[{g.axes}] = {format_value(g.t_add)}"
                f"  (t_hat {format_value(g.t_hat)}, {len(g.consumed)} strings)"
            )
        if a.rebuild.leftovers:
            lines.append(f"  unconsumed  {format_value(a.rebuild.leftover_strength)}")
    return "\n".join(lines)
