"""Command line interface for scoring and staged fine-tuning."""

from __future__ import annotations

import argparse
import logging
import sys

from .finetune import TrainConfig, finetune_stub
from .scoring import ScorerConfig, score_corpus


def cmd_score(args) -> int:
    config = ScorerConfig(model=args.model, max_len=args.max_len, device=args.device)
    score_corpus(args.corpus, config, args.out)
    return 0


def cmd_finetune(args) -> int:
    config = TrainConfig(
        max_len=args.max_len,
        batch_size=args.batch_size,
        learning_rate=args.lr,
        epochs=args.epochs,
        seed=args.seed,
        device=args.device,
    )
    finetune_stub(args.stages, args.out, config, resume=args.resume)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scorer-bridge", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="write a score file for a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument(
        "--model",
        default="mock",
        help="'mock', 'mock-gold', or a checkpoint path",
    )
    p.add_argument("--max-len", type=int, default=256)
    p.add_argument("--device", default="cpu")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("finetune", help="run the staged training loop")
    p.add_argument("--stages", nargs="+", required=True, help="stage dirs, in order")
    p.add_argument("--out", required=True)
    p.add_argument("--max-len", type=int, default=128)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--lr", type=float, default=1e-5)
    p.add_argument("--epochs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--device", default="cpu")
    p.add_argument("--resume")
    p.set_defaults(func=cmd_finetune)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
