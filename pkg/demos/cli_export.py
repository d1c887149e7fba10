"""Drive the command-line tool and read back its output.

Writes the first example into a temporary directory, prints the verdict and
the head of the exported invariant table.

    python demos/cli_export.py
"""
import json
import pathlib
import subprocess
import sys
import tempfile


def mhl(*args):
    return subprocess.run([sys.executable, "-m", "minkhelix", *args], capture_output=True,
                          text=True, check=False)


def main():
    with tempfile.TemporaryDirectory() as tmp:
        out = pathlib.Path(tmp)
        proc = mhl("example", "--id", "1", "--out", str(out))
        print(proc.stdout.strip())
        report = json.loads((out / "report.json").read_text())
        print("radius:", report["metrics"]["radius"])
        for line in (out / "alpha.csv").read_text().splitlines()[:4]:
            print(" ", line)

        proc = mhl("verify", "--theorem", "6", "--params", '{"m": 0.25, "n": 0.5}')
        print("theorem 6 exit code:", proc.returncode)
        print(proc.stderr.strip())


if __name__ == "__main__":
    main()
