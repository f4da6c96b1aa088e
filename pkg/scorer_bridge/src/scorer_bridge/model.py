"""Small trainable encoder with per-token start/end scoring heads.

Tokens are mapped to embedding ids by a stable hash (no learned vocab),
run through a single transformer encoder layer, and projected to two
logits per token. Softmax over each vector yields the start/end
probabilities the score files carry. The architecture is deliberately
tiny: it exists so the staged fine-tuning loop and the file contracts can
be exercised on a CPU in seconds; swapping in a large pretrained encoder
is a configuration change, not a code change.
"""

from __future__ import annotations

import hashlib

import torch
from torch import nn

PAD_ID = 0


def token_id(token: str, vocab_size: int) -> int:
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    return 1 + int.from_bytes(digest[:4], "big") % (vocab_size - 1)


class SpanScorerModel(nn.Module):
    def __init__(self, vocab_size: int = 4096, dim: int = 48, max_len: int = 512):
        super().__init__()
        self.vocab_size = vocab_size
        self.max_len = max_len
        self.embed = nn.Embedding(vocab_size, dim, padding_idx=PAD_ID)
        self.pos = nn.Embedding(max_len, dim)
        layer = nn.TransformerEncoderLayer(
            d_model=dim,
            nhead=4,
            dim_feedforward=2 * dim,
            dropout=0.0,
            batch_first=True,
        )
        self.encoder = nn.TransformerEncoder(layer, num_layers=1, enable_nested_tensor=False)
        self.heads = nn.Linear(dim, 2)

    def encode_tokens(self, tokens: list[str]) -> torch.Tensor:
        ids = [token_id(t, self.vocab_size) for t in tokens[: self.max_len]]
        return torch.tensor(ids, dtype=torch.long)

    def forward(
        self, ids: torch.Tensor, padding_mask: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """ids: (batch, seq); padding_mask: True where padded.

        Returns start/end logits of shape (batch, seq), padded positions
        pushed to -inf so they never win a softmax or an argmax.
        """
        positions = torch.arange(ids.shape[1], device=ids.device)
        x = self.embed(ids) + self.pos(positions)[None, :, :]
        x = self.encoder(x, src_key_padding_mask=padding_mask)
        logits = self.heads(x)
        neg = torch.finfo(logits.dtype).min
        start = logits[..., 0].masked_fill(padding_mask, neg)
        end = logits[..., 1].masked_fill(padding_mask, neg)
        return start, end


def batch_ids(model: SpanScorerModel, token_lists: list[list[str]]):
    """Pad a batch of token lists; returns (ids, padding_mask)."""
    seqs = [model.encode_tokens(tokens) for tokens in token_lists]
    width = max(len(s) for s in seqs)
    ids = torch.full((len(seqs), width), PAD_ID, dtype=torch.long)
    mask = torch.ones((len(seqs), width), dtype=torch.bool)
    for i, seq in enumerate(seqs):
        ids[i, : len(seq)] = seq
        mask[i, : len(seq)] = False
    return ids, mask
