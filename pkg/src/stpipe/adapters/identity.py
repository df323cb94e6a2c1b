#!/usr/bin/env python
""" Echoes every input line unchanged.
"""
import io
import sys


def main():
    stdin = io.open(sys.stdin.fileno(), "r", encoding="utf-8", newline=None, closefd=False)
    stdout = io.open(sys.stdout.fileno(), "w", encoding="utf-8", newline="\n", closefd=False)
    for line in stdin:
        stdout.write(line.rstrip(u"\r\n") + u"\n")
    stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
