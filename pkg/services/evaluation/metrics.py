"""
Human-like decision similarity and safety violation rate.

Similarity counts vehicle-timesteps ("matching points") whose predicted
action equals the calibrated one. Rates are reported as percentages with two
decimals.
"""
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping

from services.errors import ContractViolation
from services.evaluation.records import DecisionRecord

WHICH = ("ego", "other", "both")


def match_rate(matches: int, points: int) -> float:
    if points <= 0:
        raise ContractViolation("cannot compute a rate over zero points")
    if not 0 <= matches <= points:
        raise ContractViolation(f"matches ({matches}) must lie in [0, points={points}]")
    return matches / points


def as_percent(ratio: float) -> float:
    return round(100.0 * ratio, 2)


def count_matches(records: Iterable[DecisionRecord], which: str = "both") -> tuple[int, int]:
    if which not in WHICH:
        raise ContractViolation(f"which must be one of {WHICH}, got {which!r}")
    matches = points = 0
    for record in records:
        m, p = record.matches(which)
        matches += m
        points += p
    return matches, points


def similarity_rate(records: Iterable[DecisionRecord], which: str = "both") -> float:
    matches, points = count_matches(records, which)
    if points == 0:
        raise ContractViolation("no decision records to compare")
    return match_rate(matches, points)


@dataclass(frozen=True)
class SequenceSummary:
    sequence_id: str
    source: str
    points: int
    matches: int
    similarity: float
    dynamic: bool
    violations: int | None = None


@dataclass(frozen=True)
class EvalReport:
    sequences: int
    points: int
    matches: int
    similarity: float
    similarity_percent: float
    ego_similarity: float
    other_similarity: float
    violations: int
    violation_rate: float
    violation_rate_percent: float
    dynamic_sequences: int
    dynamic_points: int
    dynamic_matches: int
    dynamic_similarity: float | None
    per_source: dict[str, dict] = field(default_factory=dict)
    baselines: dict[str, float] = field(default_factory=dict)
    per_sequence: list[SequenceSummary] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _is_dynamic(records: list[DecisionRecord]) -> bool:
    return len({r.label0 for r in records}) > 1 or len({r.label1 for r in records}) > 1


def group_by_sequence(records: Iterable[DecisionRecord]) -> dict[str, list[DecisionRecord]]:
    grouped = defaultdict(list)
    for record in records:
        grouped[record.sequence_id].append(record)
    return {seq_id: sorted(grouped[seq_id], key=lambda r: r.frame) for seq_id in sorted(grouped)}


def build_report(
    records: Iterable[DecisionRecord],
    violations: Mapping[str, int] | None = None,
    baselines: Mapping[str, float] | None = None,
) -> EvalReport:
    """
    Aggregate per-frame records into the evaluation report.

    violations maps sequence id to the number of violating replay steps; a
    sequence counts as violating when that number is positive.
    """
    grouped = group_by_sequence(records)
    if not grouped:
        raise ContractViolation("no decision records to evaluate")

    summaries = []
    by_source = defaultdict(lambda: [0, 0, 0])
    for seq_id, seq_records in grouped.items():
        matches, points = count_matches(seq_records, "both")
        source = seq_records[0].source
        summaries.append(SequenceSummary(
            sequence_id=seq_id,
            source=source,
            points=points,
            matches=matches,
            similarity=match_rate(matches, points),
            dynamic=_is_dynamic(seq_records),
            violations=None if violations is None else int(violations.get(seq_id, 0)),
        ))
        by_source[source][0] += 1
        by_source[source][1] += points
        by_source[source][2] += matches

    all_records = [r for seq_records in grouped.values() for r in seq_records]
    matches = sum(s.matches for s in summaries)
    points = sum(s.points for s in summaries)
    dynamic = [s for s in summaries if s.dynamic]
    dynamic_points = sum(s.points for s in dynamic)
    dynamic_matches = sum(s.matches for s in dynamic)
    violating = sum(1 for s in summaries if s.violations)
    similarity = match_rate(matches, points)
    violation_rate = violating / len(summaries)

    return EvalReport(
        sequences=len(summaries),
        points=points,
        matches=matches,
        similarity=similarity,
        similarity_percent=as_percent(similarity),
        ego_similarity=similarity_rate(all_records, "ego"),
        other_similarity=similarity_rate(all_records, "other"),
        violations=violating,
        violation_rate=violation_rate,
        violation_rate_percent=as_percent(violation_rate),
        dynamic_sequences=len(dynamic),
        dynamic_points=dynamic_points,
        dynamic_matches=dynamic_matches,
        dynamic_similarity=match_rate(dynamic_matches, dynamic_points) if dynamic_points else None,
        per_source={
            source: {
                "sequences": n,
                "points": p,
                "matches": m,
                "similarity": match_rate(m, p),
                "similarity_percent": as_percent(match_rate(m, p)),
            }
            for source, (n, p, m) in sorted(by_source.items())
        },
        baselines=dict(sorted((baselines or {}).items())),
        per_sequence=summaries,
    )
