""" Line-in/line-out subprocess protocol for external translation systems.
"""
import logging
import shlex
import subprocess
import sys

from .exceptions import AdapterFailure, AdapterProtocolViolation

DEFAULT_TIMEOUT = 600


def build_command(adapter_cmd):
    """ Splits a command template into argv. "{python}" becomes the running interpreter.
    """
    if isinstance(adapter_cmd, (list, tuple)):
        argv = list(adapter_cmd)
    else:
        argv = shlex.split(adapter_cmd)
    if not argv:
        raise AdapterFailure("Empty adapter command.")
    return [sys.executable if part == "{python}" else part for part in argv]


def _count_lines(text):
    if not text:
        return 0
    if isinstance(text, bytes):
        text = text.decode("utf-8", "replace")
    return len(text.splitlines())


def translate_external(source, adapter_cmd, timeout=DEFAULT_TIMEOUT, cwd=None):
    """ Pipes source sentences through an adapter command, one per line.

        Args:
            source (iterable): Token sequences.
            adapter_cmd (str|list): Command template.

        Kwargs:
            timeout (float): Seconds before the adapter is killed.
            cwd (str): Working directory for the adapter.

        Raises:
            AdapterFailure: Nonzero exit or timeout. Carries the number of lines
                the adapter had produced.
            AdapterProtocolViolation: Output line count differs from input.

        Returns:
            list: Translated token sequences, in input order.
    """
    sentences = [u" ".join(tokens) for tokens in source]
    argv = build_command(adapter_cmd)
    payload = u"".join(sentence + u"\n" for sentence in sentences).encode("utf-8")
    logging.info("Running adapter %s on %d sentences" % (" ".join(argv), len(sentences)))

    try:
        completed = subprocess.run(
            argv,
            input=payload,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            timeout=timeout,
            cwd=cwd,
        )
    except subprocess.TimeoutExpired as e:
        partial = _count_lines(e.output)
        raise AdapterFailure("Adapter timed out after %ss with %d lines written." % (timeout, partial),
                             partial_count=partial)
    except OSError as e:
        raise AdapterFailure("Could not start adapter %r: %s" % (argv[0], e))

    output = completed.stdout.decode("utf-8", "replace").splitlines()
    if completed.returncode != 0:
        stderr = completed.stderr.decode("utf-8", "replace").strip()
        raise AdapterFailure(
            "Adapter exited with status %d after %d lines: %s" % (completed.returncode, len(output), stderr),
            returncode=completed.returncode,
            partial_count=len(output),
        )
    if len(output) != len(sentences):
        raise AdapterProtocolViolation(
            "Adapter returned %d lines for %d inputs." % (len(output), len(sentences))
        )
    return [line.split() for line in output]
