"""Runs every ```sh block of the README, in order, in one scratch directory.

A ```text block directly after a sh block lists lines that must appear in that
block's output.
"""
import argparse
import os
import re
import subprocess
import sys
import tempfile

FENCE = re.compile(r"^```(\w*)\n(.*?)^```", re.M | re.S)


def blocks(readme):
    found = [(m.group(1), m.group(2)) for m in FENCE.finditer(readme)]
    for i, (lang, body) in enumerate(found):
        if lang != "sh":
            continue
        expected = found[i + 1][1] if i + 1 < len(found) and found[i + 1][0] == "text" else ""
        yield body, [line for line in expected.splitlines() if line.strip()]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--readme", required=True)
    args = ap.parse_args()

    with open(args.readme, encoding="utf-8") as f:
        readme = f.read()
    env = dict(os.environ)
    env["PATH"] = os.path.dirname(os.path.abspath(args.cli)) + os.pathsep + env["PATH"]
    for var in ("TICKETSCOPE_CORPUS", "TICKETSCOPE_STORE", "TICKETSCOPE_HOST", "TICKETSCOPE_PORT"):
        env.pop(var, None)

    failures = 0
    count = 0
    with tempfile.TemporaryDirectory() as work:
        prelude = ""  # exports carry over between blocks
        for body, expected in blocks(readme):
            count += 1
            script = "set -euo pipefail\n" + prelude + body
            proc = subprocess.run(["bash", "-c", script], cwd=work, env=env, capture_output=True, text=True)
            prelude += "".join(line + "\n" for line in body.splitlines() if line.startswith("export "))
            missing = [line for line in expected if line not in proc.stdout.splitlines()]
            status = "ok" if proc.returncode == 0 and not missing else "FAILED"
            print(f"[{status}] block {count}: {body.splitlines()[0]}")
            if status != "ok":
                failures += 1
                print(f"  exit {proc.returncode}")
                for line in missing:
                    print(f"  missing output line: {line}")
                print("  stdout:\n" + proc.stdout[-2000:])
                print("  stderr:\n" + proc.stderr[-2000:])
    if count == 0:
        print("no sh blocks found")
        return 1
    print(f"{count - failures}/{count} README blocks ran cleanly")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
