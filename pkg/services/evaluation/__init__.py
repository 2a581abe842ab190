from .records import DecisionRecord, decide_sequence, fixed_weight_baseline
from .metrics import EvalReport, SequenceSummary, as_percent, build_report, count_matches, match_rate, similarity_rate
from .replay import ReplayResult, ReplayStep, closed_loop_replay

__all__ = [
    'DecisionRecord',
    'decide_sequence',
    'fixed_weight_baseline',
    'EvalReport',
    'SequenceSummary',
    'as_percent',
    'build_report',
    'count_matches',
    'match_rate',
    'similarity_rate',
    'ReplayResult',
    'ReplayStep',
    'closed_loop_replay',
]
