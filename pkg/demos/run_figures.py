"""Regenerate the data behind every figure from the JSON configs in figures/.

Each config is fed to the command-line driver exactly as a user would, and
the CSV plus metadata land under out/ in the current directory.  Pass name
fragments to run a subset, e.g. ``python3 demos/run_figures.py fig4 fig6``.
"""

import sys
import time
from pathlib import Path

from dipolar_quench.cli import main as cli_main

FIGURES = Path(__file__).resolve().parents[1] / "figures"


def main(argv):
    configs = sorted(FIGURES.glob("*.json"))
    if argv:
        configs = [c for c in configs if any(a in c.stem for a in argv)]
    failed = []
    for cfg in configs:
        t0 = time.perf_counter()
        code = cli_main(["--config", str(cfg)])
        print(f"{cfg.stem:<36} exit {code}  {time.perf_counter() - t0:6.2f} s")
        if code:
            failed.append(cfg.stem)
    print(f"\n{len(configs) - len(failed)}/{len(configs)} configs succeeded")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
