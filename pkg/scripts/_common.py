import argparse
from pathlib import Path

from lgtmoo.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(jobs: list[tuple[str, str]], description: str) -> int:
    """Run ``(subcommand, config file)`` jobs into ``--out/<config stem>``; return the worst exit code."""
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--out", default="results")
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args()
    codes = []
    for command, config in jobs:
        argv = [command, "--config", str(CONFIGS / config), "--out", str(Path(args.out) / Path(config).stem)]
        if args.seed is not None:
            argv += ["--seed", str(args.seed)]
        codes.append(main(argv))
        print(f"{command} {config}: exit {codes[-1]}", flush=True)
    return 1 if 1 in codes else max(codes)
