""" Runs every pipeline of a config in order inside one run directory:

    <out_dir>/<run_id>/
        inputs/<pipeline>/...        copies of (or links to) the pipeline inputs
        NN-<stage>/...               one directory per stage run, numbered across pipelines
        corpora/<label>.{src,tgt}    corpora written by emit stages
        report.json, report.txt      evaluation reports (unless report_path is set)
        manifest.json, timings.json
"""
import collections
import datetime
import json
import logging
import os
import shutil

from stpipe import __version__
from stpipe.core import utils
from stpipe.core.engine.artifact import Artifact
from stpipe.core.engine.context import RunContext
from stpipe.core.engine.manifest import Manifest, write_timings
from stpipe.core.exceptions import PipelineValidationException, StpipeException
from stpipe.core.metrics import format_table

RunResult = collections.namedtuple("RunResult", ["run_dir", "manifest", "reports", "final_artifacts"])


def default_run_id():
    return datetime.datetime.now().strftime("%Y%m%d-%H%M%S")


def validate_stage_graphs(graphs):
    """ Validates every graph, then checks that references to other pipelines
        point at stages of pipelines that run earlier.

        Raises:
            PipelineValidationException
    """
    seen = set()
    for graph in graphs:
        if graph.name in seen:
            raise PipelineValidationException("Pipeline '%s' is listed twice in the run order." % graph.name)
        graph.validate_stage_graph()
        for reference in graph.external_references():
            pipeline, _, stage_name = reference.rpartition(":")
            earlier = [other for other in graphs if other.name == pipeline and other.name in seen]
            if not earlier or earlier[0].get_stage(stage_name) is None:
                raise PipelineValidationException(
                    "Pipeline '%s' references '%s', which is not a stage of an earlier pipeline."
                    % (graph.name, reference)
                )
        seen.add(graph.name)


def _stage_inputs(graph, context, manifest, link_inputs):
    """ Copies (or links) the pipeline inputs into the run directory.
    """
    original = graph.input_artifact()
    directory = os.path.join(context.run_dir, "inputs", graph.name)
    utils.ensure_dir(directory)

    staged = {}
    for side, path in original.files().items():
        if not os.path.isfile(path):
            raise PipelineValidationException("Pipeline '%s': %s input %s does not exist." % (graph.name, side, path))
        destination = os.path.join(directory, side + (".nbest" if side == "source" and original.kind == "nbest" else ".txt"))
        if os.path.lexists(destination):
            os.remove(destination)
        if link_inputs:
            os.symlink(os.path.abspath(path), destination)
        else:
            shutil.copyfile(path, destination)
        staged[side] = destination

    artifact = Artifact(original.kind, staged["source"], staged.get("target"))
    for side, path in artifact.files().items():
        rows = artifact.rows if side == "source" else None
        manifest.add_input(graph.name, side, context.relpath(path), original.files()[side], rows)
    return artifact


def _write_reports(context, report_path, manifest):
    if not context.reports:
        return None
    report_path = report_path or os.path.join(context.run_dir, "report.json")
    table_path = os.path.splitext(report_path)[0] + ".txt"

    data = [report.to_dict() for report in context.reports]
    utils.atomic_write_text(report_path, json.dumps(data, indent=2, sort_keys=True) + "\n")
    utils.atomic_write_text(table_path, format_table(context.reports))

    manifest.reports["json"] = {"path": context.relpath(report_path)}
    manifest.reports["table"] = {"path": context.relpath(table_path)}
    logging.info("Reports written to %s" % report_path)
    return report_path


def run_pipeline(config, run_id=None):
    """ Validates and executes every pipeline of config.

        Args:
            config (PipelineConfig): Loaded configuration.

        Kwargs:
            run_id (str): Run directory name. Defaults to config.run_id, then a timestamp.

        Raises:
            PipelineValidationException: Before anything runs.
            StageFailure: The first failing stage. The manifest records how far the run got.

        Returns:
            RunResult
    """
    run_id = run_id or config.run_id or default_run_id()
    run_dir = os.path.join(config.out_dir, run_id)

    graphs = [config.build_stage_graph(name, run_dir=run_dir) for name in config.run]
    validate_stage_graphs(graphs)

    utils.ensure_dir(run_dir)
    context = RunContext(run_dir, seed=config.seed, workers=config.workers, settings=config.settings)
    manifest = Manifest(__version__, config.seed, config.snapshot)
    timings = []
    final_artifacts = collections.OrderedDict()

    logging.info("Running pipelines %s in %s" % (", ".join(config.run), run_dir))
    try:
        for graph in graphs:
            artifact = _stage_inputs(graph, context, manifest, config.link_inputs)
            final_artifacts[graph.name] = graph.execute(context, artifact, manifest, timings)
        _write_reports(context, config.report_path_for(run_dir), manifest)
    except StpipeException as e:
        manifest.status = "failed"
        manifest.error = str(e)
        manifest.write(run_dir)
        write_timings(run_dir, run_id, timings)
        raise

    manifest.status = "complete"
    manifest.write(run_dir)
    write_timings(run_dir, run_id, timings)
    logging.info("Run complete: %s" % run_dir)
    return RunResult(run_dir, manifest, list(context.reports), final_artifacts)
