"""Engine for information-flow architectures.

Finite-horizon timed streams, executable nondeterministic behaviors,
composition with black-box semantics, and a rule calculus for stepwise
architecture refactoring with machine-checked premises.
"""

from __future__ import annotations

from importlib import resources

from .archio import (
    ArchitectureDocument,
    digest,
    parse_architecture,
    parse_document,
    print_architecture,
)
from .behavior import (
    Outcome,
    Transducer,
    Verdict,
    adapt,
    chaos_machine,
    chaos_extend,
    copy_machine,
    denote,
    refines,
    silent_machine,
    summarizer_machine,
)
from .calculus import (
    CheckConfig,
    Kind,
    Mode,
    PremiseCheck,
    RuleApplication,
    RuleId,
    StepReport,
    apply_step,
)
from .dot import render_dot
from .errors import (
    ConsistencyError,
    EngineError,
    ParseError,
    PremiseViolation,
)
from .model import Component, System, assert_consistent, check_consistency
from .registry import COMBINERS, INVARIANTS, Combiner, Invariant
from .scriptio import (
    RunReport,
    ScriptDocument,
    format_run_report,
    parse_script,
    run_script,
)
from .semantics import (
    DenotationTable,
    black_box,
    black_box_oracle,
    compose,
    denotation,
    denotation_table,
    invariant_valid,
    system_refines,
)
from .streams import StreamTuple, iter_tuples, tuple_space_size

__version__ = "0.1.0"

__all__ = [
    "ArchitectureDocument",
    "COMBINERS",
    "CheckConfig",
    "Combiner",
    "Component",
    "ConsistencyError",
    "DenotationTable",
    "EngineError",
    "INVARIANTS",
    "Invariant",
    "Kind",
    "Mode",
    "Outcome",
    "ParseError",
    "PremiseCheck",
    "PremiseViolation",
    "RuleApplication",
    "RuleId",
    "RunReport",
    "ScriptDocument",
    "StepReport",
    "StreamTuple",
    "System",
    "Transducer",
    "Verdict",
    "adapt",
    "apply_step",
    "assert_consistent",
    "black_box",
    "black_box_oracle",
    "chaos_extend",
    "chaos_machine",
    "check_consistency",
    "company_architecture",
    "company_script",
    "compose",
    "copy_machine",
    "denotation",
    "denotation_table",
    "denote",
    "digest",
    "format_run_report",
    "invariant_valid",
    "iter_tuples",
    "parse_architecture",
    "parse_document",
    "parse_script",
    "print_architecture",
    "refines",
    "render_dot",
    "run_script",
    "silent_machine",
    "summarizer_machine",
    "system_refines",
    "tuple_space_size",
]


def _corpus_text(name: str) -> str:
    return resources.files(__name__).joinpath("corpus", name).read_text()


def company_architecture() -> ArchitectureDocument:
    """The three-department company shipped with the package."""
    return parse_document(_corpus_text("company.arch"))


def company_script() -> ScriptDocument:
    """The nine-step accounting refactoring for the company."""
    return parse_script(_corpus_text("company-script.refine"))
