"""The command line front end: encode to a container, decode a prefix, export a report."""

import sys
import tempfile
from pathlib import Path

from galecodec.cli import main

with tempfile.TemporaryDirectory() as tmp:
    box = Path(tmp) / "coin.gale"
    csv = Path(tmp) / "coin.csv"
    argv = ["encode", "--source", "bernoulli:1/8:7", "--model", "kt", "--paper-schedule", "-B", "20",
            "-o", str(box)]
    print("$ galecodec", " ".join(argv[:-2]), "-o coin.gale", flush=True)
    print("exit", main(argv), f"({box.stat().st_size} bytes)")

    print("\n$ galecodec decode coin.gale -n 40", flush=True)
    code = main(["decode", str(box), "-n", "40"])
    sys.stderr.flush()
    print("exit", code)

    print("\n$ galecodec decode coin.gale -n 1000", flush=True)
    code = main(["decode", str(box), "-n", "1000"])
    sys.stderr.flush()
    print("exit", code)

    main(["analyze", "--source", "bernoulli:1/8:7", "--model", "kt", "-B", "20", "--csv", str(csv)])
    print("\n$ galecodec analyze ... --csv coin.csv  (last rows)")
    print("\n".join(csv.read_text().splitlines()[-3:]))
