#!/usr/bin/env python
""" Word-by-word dictionary lookup. Words without an entry pass through.

The dictionary is a UTF-8 TSV file of "source<TAB>translation" lines.
"""
import argparse
import io
import sys


def load_dictionary(path):
    entries = {}
    with io.open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.rstrip(u"\r\n")
            if not line or line.startswith(u"#"):
                continue
            source, _, translation = line.partition(u"\t")
            if translation:
                entries[source] = translation
    return entries


def translate_line(line, entries):
    return u" ".join(entries.get(word, word) for word in line.split())


def parse_args(argv=None):
    parser = argparse.ArgumentParser(prog="stpipe-dictionary-adapter")
    parser.add_argument("--dict", dest="dictionary", required=True, help="source<TAB>translation file.")
    return parser.parse_args(argv)


def main(argv=None):
    args = parse_args(argv)
    entries = load_dictionary(args.dictionary)
    stdin = io.open(sys.stdin.fileno(), "r", encoding="utf-8", newline=None, closefd=False)
    stdout = io.open(sys.stdout.fileno(), "w", encoding="utf-8", newline="\n", closefd=False)
    for line in stdin:
        stdout.write(translate_line(line.rstrip(u"\r\n"), entries) + u"\n")
    stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
