#!/usr/bin/env python
"""
Module providing the single "stpipe" command line tool. Every toolkit
operation is a subcommand; "pipeline run" executes a config file end to end.

Text subcommands read one sentence per line from --input (default stdin) and
write one per line to --output (default stdout).
"""
import argparse
import io
import itertools
import logging
import os
import sys

from stpipe.builder.pipeline_builder import Loader, PipelineConfig
from stpipe.core import asrsim, bpe, corpus, metrics, ngramlm, recase, rerank, textnorm, utils
from stpipe.core.adapter import translate_external
from stpipe.core.engine.artifact import Artifact, KINDS
from stpipe.core.engine.context import RunContext
from stpipe.core.engine.runner import run_pipeline, validate_stage_graphs
from stpipe.core.exceptions import StpipeException
from stpipe.core.stages import all_stages
from stpipe.core.stages.nbest import PRUNE_PROFILES, prune_counts

STDIO = "-"


class StpipeCliException(StpipeException):
    """
    Exception for command line usage errors.
    """

    pass


def _print_and_raise(message):
    """
    Logs the given message and raises it as an exception.

    Args:
        message (str): The message to log + raise as an exception.
    """
    logging.error("[ERROR] %s" % message)
    raise StpipeCliException(message)


def _read_lines(path):
    if path == STDIO:
        stdin = io.open(sys.stdin.fileno(), "r", encoding="utf-8", newline=None, closefd=False)
        return (line.rstrip(u"\r\n") for line in stdin)
    return corpus.read_lines(path)


def _read_tokens(path):
    return (line.split() for line in _read_lines(path))


def _write_lines(path, lines):
    if path == STDIO:
        stdout = io.open(sys.stdout.fileno(), "w", encoding="utf-8", newline="\n", closefd=False)
        count = 0
        for line in lines:
            stdout.write(line + u"\n")
            count += 1
        stdout.flush()
        return count
    return corpus.write_lines(path, lines)


def _write_tokens(path, sentences):
    return _write_lines(path, (u" ".join(tokens) for tokens in sentences))


def _require_file(path, what):
    if path != STDIO and not os.path.isfile(path):
        _print_and_raise("No such %s file: %s" % (what, path))


##### Subcommand handlers #####

def cmd_normalize(args, settings):
    def process(line):
        tokens = textnorm.tokenize(textnorm.normalize_punct(line))
        return textnorm.lowercase(tokens) if args.lowercase else tokens
    _write_tokens(args.output, (process(line) for line in _read_lines(args.input)))


def cmd_asr_format(args, settings):
    _write_tokens(args.output, (asrsim.to_asr_format(tokens) for tokens in _read_tokens(args.input)))


def cmd_bpe_learn(args, settings):
    # One joint model over every input file, eg: source and target sides.
    for path in args.inputs:
        _require_file(path, "input")
    model = bpe.learn_bpe(
        itertools.chain.from_iterable(_read_tokens(path) for path in args.inputs),
        args.merges or settings.get("bpe.merges", 37000),
        min_frequency=args.min_frequency or settings.get("bpe.min_frequency", 2),
    )
    model.save(args.model)
    logging.info("Wrote %d merges to %s" % (len(model.merges), args.model))


def cmd_bpe_apply(args, settings):
    _require_file(args.model, "BPE model")
    model = bpe.BpeModel.load(args.model)
    _write_tokens(args.output, (bpe.apply_bpe(model, tokens) for tokens in _read_tokens(args.input)))


def cmd_bpe_revert(args, settings):
    _write_tokens(args.output, (bpe.revert_bpe(tokens) for tokens in _read_tokens(args.input)))


def cmd_asr_sim(args, settings):
    noise = asrsim.NoiseModel(
        args.wer if args.wer is not None else settings.get("asrsim.wer", 0.15),
        mix=args.mix or settings.get("asrsim.mix"),
        confusion_table=asrsim.load_confusion_table(args.confusions),
        filler_vocab=settings.get("asrsim.filler_vocab"),
        seed=args.seed,
    )
    sentences = list(_read_tokens(args.input))
    if args.calibrate:
        noise = asrsim.calibrate_noise(
            [asrsim.to_asr_format(tokens) for tokens in sentences],
            noise,
            tolerance=settings.get("asrsim.calibration_tolerance", 0.02),
            iterations=settings.get("asrsim.calibration_iterations", 10),
        )
    stats = asrsim.TransformStats()
    lists = asrsim.transform_corpus(
        sentences,
        noise,
        args.nbest or settings.get("asrsim.nbest", 50),
        workers=args.workers,
        progress_every=settings.get("asrsim.progress_every", 10000),
        stats=stats,
    )
    if args.output == STDIO:
        _write_lines(STDIO, (
            u"%s\t%d\t%s\t%s" % (nbest.utt_id, hypothesis.rank, corpus.format_score(hypothesis.score), u" ".join(hypothesis.tokens))
            for nbest in lists for hypothesis in nbest
        ))
    else:
        corpus.write_nbest(args.output, lists)


def _lm_corpus(args):
    sentences = _read_tokens(args.input)
    if args.asr:
        sentences = (asrsim.to_asr_format(tokens) for tokens in sentences)
    return sentences


def cmd_lm_train(args, settings):
    order = args.order or settings.get("ngramlm.order", 4)
    lm = ngramlm.train_lm(_lm_corpus(args), order=order, prune_counts=prune_counts(args.prune, order, settings))
    lm.save(args.lm)
    logging.info("Wrote %r to %s" % (lm, args.lm))


def _load_lm(path):
    _require_file(path, "ARPA")
    return ngramlm.NGramModel.load(path)


def cmd_lm_score(args, settings):
    lm = _load_lm(args.lm)
    _write_lines(args.output, (
        u"%.6f" % ngramlm.score(lm, tokens, bos=not args.no_bos, eos=not args.no_eos)
        for tokens in _read_tokens(args.input)
    ))


def cmd_lm_ppl(args, settings):
    lm = _load_lm(args.lm)
    _write_lines(args.output, [u"%.4f" % ngramlm.perplexity(lm, _read_tokens(args.input))])


def cmd_select(args, settings):
    strategy = rerank.SelectionStrategy.parse(args.ranks)
    pairs = rerank.build_training_pairs(corpus.read_nbest(args.nbest), _read_tokens(args.targets), strategy)
    written = corpus.write_parallel(
        corpus.ParallelCorpus("selected", args.out_source, args.out_target),
        ((u" ".join(source), u" ".join(target)) for source, target in pairs),
    )
    logging.info("Wrote %d training pairs." % written)


def _length_normalize(args, settings):
    if args.no_length_normalize:
        return False
    return bool(settings.get("rerank.length_normalize", True))


def cmd_rerank(args, settings):
    lm = _load_lm(args.lm)
    weights = rerank.RerankWeights(
        w_orig=args.w_orig if args.w_orig is not None else settings.get("rerank.w_orig", 0.0),
        w_lm=args.w_lm if args.w_lm is not None else settings.get("rerank.w_lm", 1.0),
    )
    corpus.write_nbest(args.output, (
        rerank.rerank(nbest, lm, weights, length_normalize=_length_normalize(args, settings))
        for nbest in corpus.read_nbest(args.nbest)
    ))


def cmd_pick_best(args, settings):
    lm = _load_lm(args.lm)
    _write_tokens(args.output, (
        rerank.pick_best_translation(nbest.hypotheses, lm, length_normalize=_length_normalize(args, settings))
        for nbest in corpus.read_nbest(args.nbest)
    ))


def cmd_recase_train(args, settings):
    model = recase.train_recaser(_read_tokens(args.input), order=args.order or settings.get("recase.order", 3))
    model.save(args.model)
    logging.info("Wrote %r to %s" % (model, args.model))


def cmd_recase(args, settings):
    _require_file(args.model, "recaser model")
    model = recase.RecaserModel.load(args.model)
    _write_tokens(args.output, (recase.recase(model, tokens) for tokens in _read_tokens(args.input)))


def cmd_translate(args, settings):
    translations = translate_external(
        _read_tokens(args.input),
        args.adapter,
        timeout=args.timeout or settings.get("adapter.timeout", 600),
    )
    _write_tokens(args.output, translations)


def _print_report(report, as_json):
    if as_json:
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(metrics.format_table([report]))
    sys.stdout.flush()


def cmd_eval_bleu(args, settings):
    smooth = args.smooth or bool(settings.get("metrics.smooth", False))
    report = metrics.bleu(_read_tokens(args.hyp), _read_tokens(args.ref), case_sensitive=not args.lc, smooth=smooth)
    report.name = args.name or os.path.basename(args.hyp)
    _print_report(report, args.json)


def cmd_eval_wer(args, settings):
    report = metrics.wer(_read_tokens(args.hyp), _read_tokens(args.ref))
    report.name = args.name or os.path.basename(args.hyp)
    _print_report(report, args.json)


def _pipeline_config(args, settings):
    for path in args.config:
        _require_file(path, "config")
    return PipelineConfig(
        Loader(args.config),
        seed=args.seed,
        workers=args.workers,
        out_dir=args.out,
        run_id=args.run_id,
        settings=settings,
    )


def cmd_pipeline_run(args, settings):
    result = run_pipeline(_pipeline_config(args, settings))
    if result.reports:
        sys.stdout.write(metrics.format_table(result.reports))
        sys.stdout.flush()
    logging.info("Manifest: %s" % os.path.join(result.run_dir, "manifest.json"))


def cmd_pipeline_validate(args, settings):
    config = _pipeline_config(args, settings)
    run_dir = os.path.join(config.out_dir, config.run_id or "validate")
    validate_stage_graphs([config.build_stage_graph(name, run_dir=run_dir) for name in config.run])
    logging.info("Config is valid: pipelines %s" % ", ".join(config.run))


def cmd_stage_run(args, settings, stage_args):
    """
    Runs a single stage outside of any pipeline. Stage attributes are passed
    as "--key value" pairs after the known arguments.
    """
    stage_class = all_stages.get(args.stage_type)

    # Cannot continue if we do not know what stage we are meant to be executing.
    if stage_class is None:
        _print_and_raise("Unknown stage type '%s'. Known types: %s" % (args.stage_type, ", ".join(sorted(all_stages))))

    stage_args["name"] = stage_args.get("name", args.stage_type)
    stage = stage_class.from_dict(stage_args)
    stage.validate()

    _require_file(args.source, "source")
    artifact = Artifact(args.format, args.source, args.target)
    stage.output_kind_for(artifact.kind)

    context = RunContext(args.out, seed=args.seed, workers=args.workers, settings=settings)
    stage.work_dir = context.next_stage_dir(stage)
    result = stage(context, artifact)
    for side, path in result.files().items():
        logging.info("%s: %s (%d rows)" % (side, path, result.rows))
    for report in context.reports:
        _print_report(report, False)


##### Argument parsing #####

def _add_io(parser):
    parser.add_argument("-i", "--input", default=STDIO, help="Input file, one sentence per line. Default: stdin.")
    parser.add_argument("-o", "--output", default=STDIO, help="Output file. Default: stdout.")


def _add_lm_options(parser):
    parser.add_argument("--lm", required=True, help="ARPA language model.")
    parser.add_argument("--nbest", required=True, help="N-best TSV file.")
    parser.add_argument("-o", "--output", default=STDIO)
    parser.add_argument("--no-length-normalize", action="store_true",
                        help="Score with total log probability (default: setting rerank.length_normalize).")


def _add_pipeline_options(parser):
    parser.add_argument("--config", required=True, action="append", help="Pipeline config YAML. Repeat to merge files.")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--out", help="Output directory; runs go to <out>/<run-id>/.")
    parser.add_argument("--run-id", help="Run directory name. Default: a timestamp.")


def build_parser():
    parser = argparse.ArgumentParser(prog="stpipe", description="Text-side speech translation pipeline toolkit.")
    parser.add_argument("--settings", help="Settings YAML. Default: $STPIPE_SETTINGS_FILE or the packaged settings.")
    parser.add_argument("-v", "--verbose", action="store_true")
    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True

    sub = subparsers.add_parser("normalize", help="Normalize punctuation and tokenize raw text.")
    _add_io(sub)
    sub.add_argument("--lowercase", action="store_true")
    sub.set_defaults(handler=cmd_normalize)

    sub = subparsers.add_parser("asr-format", help="Lowercase, spell out numbers, strip punctuation.")
    _add_io(sub)
    sub.set_defaults(handler=cmd_asr_format)

    sub = subparsers.add_parser("bpe-learn", help="Learn joint BPE merges from tokenized text files.")
    sub.add_argument("-i", "--in", dest="inputs", nargs="+", default=[STDIO], metavar="FILE",
                     help="Tokenized files, eg: the source and target sides. Default: stdin.")
    sub.add_argument("--out", "--model", dest="model", required=True, help="Model file to write.")
    sub.add_argument("--merges", type=int)
    sub.add_argument("--min-frequency", type=int)
    sub.set_defaults(handler=cmd_bpe_learn)

    sub = subparsers.add_parser("bpe-apply", help="Segment tokenized text with a BPE model.")
    _add_io(sub)
    sub.add_argument("--model", required=True)
    sub.set_defaults(handler=cmd_bpe_apply)

    sub = subparsers.add_parser("bpe-revert", help="Join BPE segments back into words.")
    _add_io(sub)
    sub.set_defaults(handler=cmd_bpe_revert)

    sub = subparsers.add_parser("asr-sim", help="Simulate recognizer n-best lists from clean tokenized text.")
    _add_io(sub)
    sub.add_argument("--wer", type=float)
    sub.add_argument("--nbest", type=int)
    sub.add_argument("--mix", type=float, nargs=3, metavar=("SUB", "DEL", "INS"))
    sub.add_argument("--confusions", help="Confusion table TSV. Default: the bundled table.")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--calibrate", action="store_true")
    sub.set_defaults(handler=cmd_asr_sim)

    sub = subparsers.add_parser("lm-train", help="Train a Kneser-Ney n-gram model.")
    sub.add_argument("-i", "--input", default=STDIO)
    sub.add_argument("--lm", required=True, help="ARPA file to write.")
    sub.add_argument("--order", type=int)
    sub.add_argument("--prune", choices=PRUNE_PROFILES, default="none")
    sub.add_argument("--asr", action="store_true", help="Put the training text in ASR format first.")
    sub.set_defaults(handler=cmd_lm_train)

    sub = subparsers.add_parser("lm-score", help="log10 probability of every sentence.")
    _add_io(sub)
    sub.add_argument("--lm", required=True)
    sub.add_argument("--no-bos", action="store_true")
    sub.add_argument("--no-eos", action="store_true")
    sub.set_defaults(handler=cmd_lm_score)

    sub = subparsers.add_parser("lm-ppl", help="Corpus perplexity.")
    _add_io(sub)
    sub.add_argument("--lm", required=True)
    sub.set_defaults(handler=cmd_lm_ppl)

    sub = subparsers.add_parser("select", help="Build training pairs from selected n-best ranks.")
    sub.add_argument("--nbest", required=True)
    sub.add_argument("--targets", required=True)
    sub.add_argument("--ranks", default="1-10")
    sub.add_argument("--out-source", required=True)
    sub.add_argument("--out-target", required=True)
    sub.set_defaults(handler=cmd_select)

    sub = subparsers.add_parser("rerank", help="Rerank n-best lists with a language model.")
    _add_lm_options(sub)
    sub.add_argument("--w-orig", type=float)
    sub.add_argument("--w-lm", type=float)
    sub.set_defaults(handler=cmd_rerank)

    sub = subparsers.add_parser("pick-best", help="Pick the best LM-scored candidate per utterance.")
    _add_lm_options(sub)
    sub.set_defaults(handler=cmd_pick_best)

    sub = subparsers.add_parser("recase-train", help="Train a recaser from cased tokenized text.")
    sub.add_argument("-i", "--input", default=STDIO)
    sub.add_argument("--model", required=True)
    sub.add_argument("--order", type=int, choices=range(2, ngramlm.MAX_ORDER + 1),
                     help="Context model order (default: setting recase.order).")
    sub.set_defaults(handler=cmd_recase_train)

    sub = subparsers.add_parser("recase", help="Restore case in lowercased text.")
    _add_io(sub)
    sub.add_argument("--model", required=True)
    sub.set_defaults(handler=cmd_recase)

    sub = subparsers.add_parser("translate", help="Translate through an external adapter command.")
    _add_io(sub)
    sub.add_argument("--adapter", required=True, help='eg: "{python} -m stpipe.adapters.identity"')
    sub.add_argument("--timeout", type=float)
    sub.set_defaults(handler=cmd_translate)

    for name, handler in (("eval-bleu", cmd_eval_bleu), ("eval-wer", cmd_eval_wer)):
        sub = subparsers.add_parser(name, help="Corpus %s." % name[5:].upper())
        sub.add_argument("--hyp", required=True)
        sub.add_argument("--ref", required=True)
        sub.add_argument("--name")
        sub.add_argument("--json", action="store_true", help="Print the report as JSON.")
        if name == "eval-bleu":
            sub.add_argument("--lc", action="store_true", help="Case-insensitive BLEU.")
            sub.add_argument("--smooth", action="store_true")
        sub.set_defaults(handler=handler)

    pipeline = subparsers.add_parser("pipeline", help="Run or validate pipeline configs.")
    pipeline_commands = pipeline.add_subparsers(dest="pipeline_command")
    pipeline_commands.required = True
    sub = pipeline_commands.add_parser("run")
    _add_pipeline_options(sub)
    sub.set_defaults(handler=cmd_pipeline_run)
    sub = pipeline_commands.add_parser("validate")
    _add_pipeline_options(sub)
    sub.set_defaults(handler=cmd_pipeline_validate)

    stage = subparsers.add_parser("stage", help="Run one stage; extra '--key value' pairs set its attributes.")
    stage.add_argument("stage_type", help="Stage type, eg: asr-format.")
    stage.add_argument("--source", required=True)
    stage.add_argument("--target")
    stage.add_argument("--format", choices=KINDS, default="tokens")
    stage.add_argument("--out", required=True, help="Directory for the stage output.")
    stage.add_argument("--seed", type=int, default=0)
    stage.add_argument("--workers", type=int, default=1)
    stage.set_defaults(handler=cmd_stage_run)

    return parser


def parse_args(argv=None):
    """
    Parses the command line. Only the "stage" subcommand accepts unknown
    arguments, read as "--key value" pairs.

    Returns:
        args, stage_args: Namespace of the known arguments, and a dictionary of
            the extra ones.
    """
    parser = build_parser()
    known, unknown = parser.parse_known_args(argv)

    stage_args = {}
    if unknown and known.command != "stage":
        parser.error("unrecognized arguments: %s" % " ".join(unknown))

    # Extra args come in like this:
    #
    #   "--key1 value1 --key2 value2 etc..."
    if len(unknown) % 2:
        parser.error("stage attributes must come in '--key value' pairs")
    for index in range(0, len(unknown), 2):
        key = unknown[index]
        if not key.startswith("--"):
            parser.error("expected '--key', got %r" % key)
        stage_args[key[2:].replace("-", "_")] = unknown[index + 1]

    return known, stage_args


def configure_logging(settings, verbose=False):
    level = logging.DEBUG if verbose else getattr(logging, str(settings.get("logging.level", "INFO")).upper(), logging.INFO)
    logging.basicConfig(level=level, format=settings.get("logging.format", "%(levelname)s %(message)s"))


def main(argv=None):
    """
    Main entry point for the script.

    Returns:
        int: 0 on success, 1 on any toolkit error.
    """
    args, stage_args = parse_args(argv)
    try:
        settings = utils.StpipeSettings(settings_file=args.settings)
    except (IOError, OSError) as e:
        sys.stderr.write("[ERROR] Could not read settings: %s\n" % e)
        return 1
    configure_logging(settings, args.verbose)

    try:
        if args.handler is cmd_stage_run:
            args.handler(args, settings, stage_args)
        else:
            args.handler(args, settings)
    except StpipeCliException:
        return 1
    except StpipeException as e:
        logging.error("[ERROR] %s" % e)
        return 1
    except (IOError, OSError) as e:
        logging.error("[ERROR] %s" % e)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
