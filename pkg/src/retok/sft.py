"""Instruction-tuning data formats and their loss-mask boundaries.

Five render modes for an (instruction, response) pair:

* ``chat``               -- ``<|user|>{instruction} <|assistant|>{response}``,
  loss masked up to and including the assistant marker.
* ``full_gradient``      -- same rendering, loss over everything (offset 0).
* ``qa_template``        -- ``Question: {instruction} Answer: {response}``.
* ``no_template``        -- instruction and response joined by a single space.
* ``remove_instruction`` -- the response alone, re-split so its first n
  canonical tokens play the instruction role, where n is the token count of
  the original instruction; rendered in the chat template.

The context (everything before the response part) and the response part are
tokenized separately, so the loss-mask offset always falls on a token boundary
and the prefix tokens decode exactly to the templated instruction portion.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SftFormatError
from .tokenizer import Tokenizer, encode_canonical

SFT_MODES = ("chat", "full_gradient", "qa_template", "no_template", "remove_instruction")

USER_MARKER = "<|user|>"
ASSISTANT_MARKER = "<|assistant|>"


@dataclass
class SftRecord:
    instruction: str
    response: str
    mode: str
    rendered: str
    loss_mask_offset: int
    token_ids: list[int]
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "instruction": self.instruction,
            "response": self.response,
            "mode": self.mode,
            "rendered": self.rendered,
            "loss_mask_offset": self.loss_mask_offset,
            "token_ids": self.token_ids,
            "meta": self.meta,
        }


def render_chat(instruction: str, response: str) -> tuple[str, str]:
    """(prefix, response) parts of the chat rendering; rendered = prefix + response."""
    return f"{USER_MARKER}{instruction} {ASSISTANT_MARKER}", response


def render_qa(instruction: str, response: str) -> tuple[str, str]:
    return f"Question: {instruction} Answer: ", response


def render_plain(instruction: str, response: str) -> tuple[str, str]:
    return f"{instruction} ", response


def format_sft(instruction: str, response: str, mode: str, tok: Tokenizer) -> SftRecord:
    """Render one pair in the requested mode, with tokenization and loss offset.

    ``remove_instruction`` raises SftFormatError when the response has fewer
    canonical tokens than the instruction (callers skip and count those).
    """
    if mode not in SFT_MODES:
        raise ValueError(f"unknown SFT mode {mode!r}; known: {SFT_MODES}")
    if not instruction or not response:
        raise ValueError("instruction and response must be non-empty")

    meta: dict = {}
    out_instruction, out_response = instruction, response

    if mode == "remove_instruction":
        n = len(encode_canonical(tok, instruction))
        response_ids = encode_canonical(tok, response).ids
        if len(response_ids) < n:
            raise SftFormatError(
                f"response has {len(response_ids)} tokens, fewer than the "
                f"{n}-token instruction"
            )
        head = tok.sequence_from_ids(response_ids[:n])
        tail = tok.sequence_from_ids(response_ids[n:])
        try:
            out_instruction, out_response = head.text(), tail.text()
        except UnicodeDecodeError:
            raise SftFormatError(
                f"token boundary {n} falls inside a multi-byte character"
            ) from None
        prefix, resp_part = render_chat(out_instruction, out_response)
        meta = {"instruction_token_count": n, "response_split_ids": response_ids}
    elif mode in ("chat", "full_gradient"):
        prefix, resp_part = render_chat(instruction, response)
    elif mode == "qa_template":
        prefix, resp_part = render_qa(instruction, response)
    else:
        prefix, resp_part = render_plain(instruction, response)

    prefix_ids = encode_canonical(tok, prefix).ids
    resp_ids = encode_canonical(tok, resp_part).ids
    offset = 0 if mode == "full_gradient" else len(prefix_ids)
    return SftRecord(
        instruction=out_instruction,
        response=out_response,
        mode=mode,
        rendered=prefix + resp_part,
        loss_mask_offset=offset,
        token_ids=prefix_ids + resp_ids,
        meta=meta,
    )
