"""
Natural-language questions and solutions, optional rewriting and answer checks
"""

from .answers import channel_secrecy_violations, extract_answer, numbers_in, verify_answer
from .backtranslate import backtranslate_pairs, relabel
from .rewriter import REWRITE_PROMPT, RewriterClient, RewriterSettings, build_prompt, rewrite, rewrite_many
from .templates import TemplateBank, default_bank
from .text import (
    answer_text,
    conclusion_text,
    describe_equation,
    quantity_phrase,
    step_sentence,
    verbalize_problem,
    verbalize_solution,
)

__all__ = [
    "REWRITE_PROMPT",
    "RewriterClient",
    "RewriterSettings",
    "TemplateBank",
    "answer_text",
    "backtranslate_pairs",
    "build_prompt",
    "channel_secrecy_violations",
    "conclusion_text",
    "default_bank",
    "describe_equation",
    "extract_answer",
    "numbers_in",
    "quantity_phrase",
    "relabel",
    "rewrite",
    "rewrite_many",
    "step_sentence",
    "verbalize_problem",
    "verbalize_solution",
    "verify_answer",
]
