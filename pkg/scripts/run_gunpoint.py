"""Run the gunpoint experiment with its defaults; extra arguments are passed to the CLI.

Results go to results/gunpoint/ unless --out is given.
"""
import sys

from vilmap.cli import main

if __name__ == "__main__":
    argv = sys.argv[1:]
    if "--out" not in argv:
        argv += ["--out", "results/gunpoint"]
    sys.exit(main(["experiment", "gunpoint", *argv]))
