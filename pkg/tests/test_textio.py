"""Text formats: architecture documents, refinement scripts, run reports, dot."""

from __future__ import annotations

import pytest

from flowarch.archio import (
    digest,
    parse_architecture,
    parse_document,
    print_architecture,
    show_interval,
    show_stream,
    show_tuple,
)
from flowarch.behavior import silent_machine
from flowarch.calculus import Kind, Mode, RuleId
from flowarch.dot import render_dot
from flowarch.errors import ConsistencyError, ParseError
from flowarch.model import Component, System
from flowarch.scriptio import format_run_report, parse_script, run_script
from flowarch.streams import StreamTuple

PIPE_TEXT = """\
system Pipe
alphabet a
bound 1
inputs p
outputs r

component C1
  inputs p
  outputs q
  behavior copy p -> q

component C2
  inputs q
  outputs r
  behavior copy q -> r
"""


@pytest.fixture()
def pipe():
    return parse_architecture(PIPE_TEXT)


# ----------------------------------------------------------------------
# value formatters
# ----------------------------------------------------------------------


def test_show_formatters():
    assert show_interval(()) == "<>"
    assert show_interval(("a",)) == "<a>"
    assert show_interval(("a", "b")) == "<a,b>"
    assert show_stream((("a",), (), ("b", "b"))) == "<a>|<>|<b,b>"
    t = StreamTuple.of({"y": [("b",)], "x": [("a",)]})
    assert show_tuple(t) == "x=<a> y=<b>"
    assert show_tuple(StreamTuple(())) == "(empty)"


# ----------------------------------------------------------------------
# document round-trips
# ----------------------------------------------------------------------


def test_pipe_roundtrip_is_identity(pipe):
    text = print_architecture(pipe)
    again = parse_architecture(text)
    assert again == pipe
    assert print_architecture(again) == text
    assert digest(again) == digest(pipe)


def test_company_print_reaches_fixpoint(company):
    # Machine states that are not identifiers get canonical printed names,
    # so the first print normalizes and every later round-trip is exact.
    text1 = print_architecture(company)
    reparsed = parse_architecture(text1)
    text2 = print_architecture(reparsed)
    assert text2 == text1
    assert digest(reparsed) == digest(company)
    assert parse_architecture(text2) == reparsed


def test_component_order_does_not_change_digest(pipe):
    head, c1, c2 = PIPE_TEXT.split("\n\n")
    swapped = "\n\n".join([head, c2, c1])
    assert digest(parse_architecture(swapped)) == digest(pipe)
    assert parse_architecture(swapped) == pipe


# ----------------------------------------------------------------------
# document parse errors carry line numbers
# ----------------------------------------------------------------------


def parse_error(text: str) -> ParseError:
    with pytest.raises(ParseError) as excinfo:
        parse_document(text)
    return excinfo.value


def test_document_must_start_with_system():
    err = parse_error("alphabet a\ninputs p\noutputs p")
    assert err.line == 1
    assert "must start with" in err.message


def test_unexpected_keyword_reports_line():
    err = parse_error("system X\nalphabet a\nwidget q\n")
    assert err.line == 3
    assert "unexpected keyword 'widget'" in err.message


def test_missing_alphabet_and_interface():
    assert "no alphabet" in parse_error("system X\ninputs p\noutputs q\n").message
    assert "inputs and outputs" in parse_error("system X\nalphabet a\n").message


def test_bad_bound_literal():
    err = parse_error("system X\nalphabet a\nbound many\ninputs p\noutputs q\n")
    assert err.line == 3
    assert "bound N" in err.message


def test_component_missing_behavior():
    text = PIPE_TEXT.replace("  behavior copy p -> q\n", "")
    err = parse_error(text)
    assert "missing behavior" in err.message
    assert err.line == PIPE_TEXT.splitlines().index("component C1") + 1


def test_unknown_behavior_name():
    text = PIPE_TEXT.replace("copy p -> q", "mystery")
    err = parse_error(text)
    assert "unknown behavior 'mystery'" in err.message
    assert err.line == PIPE_TEXT.splitlines().index("  behavior copy p -> q") + 1


def test_combiner_arity_mismatch():
    text = PIPE_TEXT.replace("alphabet a", "alphabet a b").replace(
        "copy p -> q", "summarize p -> q delay 1 using process"
    )
    err = parse_error(text)
    assert "takes 2 sources, got 1" in err.message


def test_bad_interval_symbol_in_transducer_block():
    text = PIPE_TEXT.replace(
        "behavior copy p -> q", "behavior jam"
    ) + """
transducer jam
  inputs p
  outputs q
  states s0
  init s0
  emit s0 q=<c> -> s0
  step s0 -> s0
"""
    err = parse_error(text)
    assert "symbol 'c' not in alphabet" in err.message
    assert err.line == text.splitlines().index("  emit s0 q=<c> -> s0") + 1


def test_interval_literal_required():
    text = PIPE_TEXT.replace(
        "behavior copy p -> q", "behavior jam"
    ) + """
transducer jam
  inputs p
  outputs q
  states s0
  init s0
  emit s0 q=a -> s0
  step s0 -> s0
"""
    assert "expected an interval literal" in parse_error(text).message


def test_duplicate_transducer_rejected():
    block = """
transducer t1
  inputs p
  outputs q
  states s0
  init s0
  emit s0 q=<> -> s0
  step s0 -> s0
"""
    text = PIPE_TEXT.replace("behavior copy p -> q", "behavior t1") + block + block
    assert "declared twice" in parse_error(text).message


def test_consistency_error_cites_condition_number():
    text = PIPE_TEXT.replace(
        "component C2\n  inputs q\n  outputs r\n  behavior copy q -> r",
        "component C2\n  inputs p\n  outputs q r\n  behavior copy p -> r",
    )
    with pytest.raises(ConsistencyError, match="condition 2") as excinfo:
        parse_document(text)
    assert "'q'" in str(excinfo.value)


# ----------------------------------------------------------------------
# script parsing
# ----------------------------------------------------------------------


def test_company_script_shape(company_steps):
    rules = [step.rule for step in company_steps.steps]
    assert rules == [
        RuleId.R6_ADD_COMPONENT_BASIC,
        RuleId.R4_ADD_INPUT,
        RuleId.R4_ADD_INPUT,
        RuleId.R2_ADD_OUTPUT,
        RuleId.R4_ADD_INPUT,
        RuleId.R11_REFINE_WITH_INVARIANT,
        RuleId.R11_REFINE_WITH_INVARIANT,
        RuleId.R5_REMOVE_INPUT,
        RuleId.R5_REMOVE_INPUT,
    ]
    assert company_steps.steps[5].invariant == "true"
    assert company_steps.steps[6].invariant == "summary"
    assert company_steps.steps[5].behavior_tokens[0] == "summarize"


def test_mode_suffix_sets_step_mode():
    doc = parse_script("add-input C1 x mode=assumed\nadd-input C1 y\n")
    assert doc.steps[0].mode is Mode.ASSUMED
    assert doc.steps[1].mode is None
    with pytest.raises(ParseError, match="unknown mode 'fast'"):
        parse_script("add-input C1 x mode=fast\n")


def test_unknown_rule_names_the_valid_ones():
    with pytest.raises(ParseError) as excinfo:
        parse_script("frobnicate C1\n")
    assert "unknown rule 'frobnicate'" in excinfo.value.message
    assert "rename-channel" in excinfo.value.message
    assert excinfo.value.line == 1


def test_refine_requires_with():
    with pytest.raises(ParseError, match="refine COMPONENT with"):
        parse_script("refine C1 copy p -> q\n")


def test_refine_under_takes_rightmost_keyword():
    doc = parse_script("refine C1 with copy under over under summary\n")
    step = doc.steps[0]
    assert step.rule is RuleId.R11_REFINE_WITH_INVARIANT
    assert step.behavior_tokens == ("copy", "under", "over")
    assert step.invariant == "summary"


def test_fold_and_rename_parsing():
    doc = parse_script(
        "fold Block from C1 C2 inputs p outputs r\n"
        "rename-channel q wire r pipe\n"
        "rename-component C1 Head\n"
    )
    fold = doc.steps[0]
    assert fold.rule is RuleId.R10_FOLD
    assert fold.members == ("C1", "C2")
    assert fold.inputs == ("p",)
    assert fold.outputs == ("r",)
    renames = doc.steps[1], doc.steps[2]
    assert renames[0].pairs == (("q", "wire"), ("r", "pipe"))
    assert renames[0].rename_kind == "channel"
    assert renames[1].pairs == (("C1", "Head"),)
    assert renames[1].rename_kind == "component"
    with pytest.raises(ParseError, match="OLD NEW"):
        parse_script("rename-channel q\n")


def test_add_component_long_form_parses():
    doc = parse_script("add-component Tap inputs q outputs t with tap\n")
    step = doc.steps[0]
    assert step.rule is RuleId.R7_ADD_COMPONENT
    assert step.inputs == ("q",)
    assert step.outputs == ("t",)
    assert step.behavior_tokens == ("tap",)


def test_subsystem_blocks_and_expand_references():
    text = (
        "expand Block with Inner\n"
        "subsystem Inner\n"
        "  inputs p\n"
        "  outputs r\n"
        "end\n"
    )
    doc = parse_script(text)
    assert doc.steps[0].subsystem == "Inner"
    assert doc.subsystem_sources[0][0] == "Inner"
    with pytest.raises(ParseError, match="unknown subsystem 'Ghost'"):
        parse_script("expand Block with Ghost\n")
    with pytest.raises(ParseError, match="missing 'end'"):
        parse_script("subsystem Open\n  inputs p\n")


# ----------------------------------------------------------------------
# script execution and report rendering
# ----------------------------------------------------------------------


def test_run_script_success_and_report_bytes(pipe, fast_config):
    doc = parse_script("rename-channel q wire\nrename-component C1 Head\n")
    final, report = run_script(pipe, doc, fast_config)
    assert report.ok
    assert report.failed_step is None
    assert len(report.steps) == 2
    assert final.has_component("Head")
    assert "wire" in final.channels
    assert report.final_digest == digest(final)
    text = format_run_report(report)
    _, report_again = run_script(pipe, doc, fast_config)
    assert format_run_report(report_again) == text
    assert "verdict: ok" in text
    assert f"final-digest: {digest(final)}" in text
    assert "  rule: rename" in text
    assert "  param.pair: q->wire" in text


def test_run_script_stops_at_first_failure(pipe, fast_config):
    doc = parse_script(
        "rename-component C1 Front\n"
        "add-output C1 extra\n"
        "remove-component C2\n"
    )
    final, report = run_script(pipe, doc, fast_config)
    assert not report.ok
    assert report.failed_step == 2
    assert len(report.steps) == 2
    assert report.failure.startswith("R2_UNKNOWN_COMPONENT")
    # The failing step must not have changed the system.
    failing = report.steps[1]
    assert not failing.ok
    assert failing.digest_after == failing.digest_before == digest(final)
    assert report.final_digest == digest(final)
    assert final.has_component("Front") and final.has_component("C2")
    text = format_run_report(report)
    assert "verdict: failed at step 2 (R2_UNKNOWN_COMPONENT" in text
    assert "| fail |" in text


def test_run_script_failure_on_first_step_keeps_original(pipe, fast_config):
    doc = parse_script("add-output C1 r\nrename-channel q wire\n")
    final, report = run_script(pipe, doc, fast_config)
    assert report.failed_step == 1
    assert final == pipe
    assert report.final_digest == digest(pipe)


def test_mode_override_marks_premise_assumed(pipe, fast_config):
    doc = parse_script("refine C1 with copy p -> q mode=assumed\n")
    _, report = run_script(pipe, doc, fast_config)
    assert report.ok
    premise = next(
        p for p in report.steps[0].premises if p.code == "R1_NOT_REFINEMENT"
    )
    assert premise.method == "assumed"
    assert premise.passed


def test_script_transducer_block_feeds_add_component(pipe, fast_config):
    text = """\
transducer tap
  inputs q
  outputs t
  states s0
  init s0
  emit s0 t=<> -> s0
  step s0 -> s0
add-component Tap inputs q outputs t with tap
"""
    final, report = run_script(pipe, parse_script(text), fast_config)
    assert report.ok
    assert final.has_component("Tap")
    assert final.component("Tap").behavior.states == ("s0",)


def test_script_transducer_errors_keep_source_lines(pipe, fast_config):
    text = """\
transducer tap
  inputs q
  outputs t
  states s0
  init s0
  emit s0 t=<c> -> s0
  step s0 -> s0
add-component Tap inputs q outputs t with tap
"""
    doc = parse_script(text)
    with pytest.raises(ParseError) as excinfo:
        run_script(pipe, doc, fast_config)
    assert excinfo.value.line == text.splitlines().index("  emit s0 t=<c> -> s0") + 1
    assert "not in alphabet" in excinfo.value.message


def test_fold_expand_script_restores_digest(pipe, fast_config):
    text = """\
fold Block from C1 C2 inputs p outputs r
subsystem Inner
  inputs p
  outputs r
  component C1
    inputs p
    outputs q
    behavior copy p -> q
  component C2
    inputs q
    outputs r
    behavior copy q -> r
end
expand Block with Inner
"""
    final, report = run_script(pipe, parse_script(text), fast_config)
    assert report.ok
    assert digest(final) == digest(pipe)
    assert all(step.kind is Kind.EQUALITY for step in report.steps)


# ----------------------------------------------------------------------
# dot rendering
# ----------------------------------------------------------------------


def test_render_dot_pipe_frozen(pipe):
    assert render_dot(pipe) == (
        'digraph "Pipe" {\n'
        "  rankdir=LR;\n"
        '  "environment" [shape=ellipse];\n'
        '  "C1" [shape=box];\n'
        '  "C2" [shape=box];\n'
        '  "C1" -> "C2" [label="q"];\n'
        '  "C2" -> "environment" [label="r"];\n'
        '  "environment" -> "C1" [label="p"];\n'
        "}\n"
    )


def test_render_dot_company_edges(company):
    text = render_dot(company)
    assert '"Production" -> "Sales" [label="progress"];' in text
    assert '"environment" -> "Production" [label="material"];' in text
    assert '"Production" -> "environment" [label="goods"];' in text


def test_render_dot_rejects_inconsistent_systems():
    def writer(name):
        machine = silent_machine(("a",), ("p",), ("r",))
        return Component(name, frozenset({"p"}), frozenset({"r"}), machine)

    bad = System(
        name="Bad",
        alphabet=("a",),
        inputs=frozenset({"p"}),
        outputs=frozenset({"r"}),
        components=(writer("C"), writer("D")),
    )
    with pytest.raises(ConsistencyError, match="condition 2"):
        render_dot(bad)
