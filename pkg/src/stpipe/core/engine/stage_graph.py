""" StageGraph Module for chaining stages of one pipeline and executing them.
"""
import collections
import logging
import time

import networkx

from stpipe.core.engine.artifact import KINDS, NBEST, Artifact
from stpipe.core.exceptions import PipelineException, PipelineValidationException, StageFailure


class StageGraph(object):
    """ Provides an interface to build, validate and execute the chain of stages
        of one pipeline.
    """

    def __init__(self, name, inputs=None, replacements=None):
        """ Initializes StageGraph object.

            Args:
                name (str): The pipeline name. Used to qualify stage ids as "pipeline:stage".

            Kwargs:
                inputs (dict): {format, source, target, nbest} describing the pipeline input.
                replacements (dict): Replacements the stages were resolved with.
        """
        self._graph = networkx.DiGraph()
        self._stages = collections.OrderedDict()
        self.name = name
        self.inputs = inputs or {}
        self.replacements = replacements or {}

    def __repr__(self):
        return "StageGraph(%r, stages=%s)" % (self.name, list(self._stages))

    @property
    def stages(self):
        return list(self._stages.values())

    def get_stage(self, name):
        return self._stages.get(name)

    def _local_name(self, reference):
        pipeline, sep, stage_name = reference.rpartition(":")
        if sep and pipeline == self.name:
            return stage_name
        return reference

    def add_stage(self, stage):
        """ Appends a stage to the chain.

            Note: Referenced stages are added to the graph as nodes whether or
            not they exist. Validation checks them.

            Raises:
                PipelineException: Stage name is not unique.
        """
        if stage.name in self._stages:
            raise PipelineException("Stage Name is not Unique: %s." % stage.name)

        previous = list(self._stages)[-1] if self._stages else None
        self._stages[stage.name] = stage
        self._graph.add_node(stage.name)

        # Edges run from the stage depended on to the dependent stage, so a
        # topological sort gives the execution order.
        if previous is not None:
            self._graph.add_edge(previous, stage.name)
        for reference in list(stage.dependencies) + list(stage.references()):
            self._graph.add_edge(self._local_name(reference), stage.name)

    def add_stages(self, stages):
        for stage in stages:
            self.add_stage(stage)

    def external_references(self):
        """ Qualified "pipeline:stage" names this pipeline reads from other pipelines.
        """
        return sorted(node for node in self._graph.nodes() if node not in self._stages and ":" in node)

    @property
    def input_kind(self):
        return self.inputs.get("format", "raw")

    def validate_stage_graph(self):
        """ Validates the current Stage graph.

            Raises:
                PipelineValidationException: Invalid Stage graph.
        """
        if not self._stages:
            raise PipelineValidationException("Pipeline '%s' has no stages." % self.name)

        if not networkx.is_directed_acyclic_graph(self._graph):
            raise PipelineValidationException("Pipeline '%s' contains circular dependencies." % self.name)

        for node in self._graph.nodes():
            if node not in self._stages and ":" not in node:
                raise PipelineValidationException(
                    "Pipeline '%s' references unknown stage '%s'." % (self.name, node)
                )

        kind = self.input_kind
        if kind not in KINDS:
            raise PipelineValidationException(
                "Pipeline '%s': unknown input format '%s'. Expected one of %s" % (self.name, kind, KINDS)
            )
        for stage in self._stages.values():
            stage.validate()
            kind = stage.output_kind_for(kind)

    def input_artifact(self):
        """ Raises:
                PipelineValidationException: The inputs do not match the format.
        """
        kind = self.input_kind
        source = self.inputs.get("nbest") if kind == NBEST else self.inputs.get("source")
        if not source:
            raise PipelineValidationException(
                "Pipeline '%s' needs an '%s' input." % (self.name, "nbest" if kind == NBEST else "source")
            )
        return Artifact(kind, source, self.inputs.get("target") or None)

    def execute(self, context, artifact, manifest, timings):
        """ Runs every stage in order, feeding each the previous output.

            Args:
                context (RunContext): Run wide state.
                artifact (Artifact): Pipeline input.
                manifest (Manifest): Receives one record per stage run.
                timings (list): Receives one duration entry per stage run.

            Returns:
                Artifact: Output of the last stage.

            Raises:
                StageFailure: The first failing stage. Its record is marked failed.
        """
        context.pipeline_name = self.name

        for stage_name in networkx.topological_sort(self._graph):
            stage = self._stages.get(stage_name)
            if stage is None:
                logging.debug("Skipping '%s' because it belongs to another pipeline." % stage_name)
                continue

            stage.work_dir = context.next_stage_dir(stage)
            record = collections.OrderedDict([
                ("index", context.stage_index),
                ("pipeline", self.name),
                ("stage", stage.name),
                ("stage_type", stage.stage_type),
                ("status", "running"),
                ("input_kind", artifact.kind),
                ("output_kind", stage.output_kind_for(artifact.kind)),
                ("rows_in", None),
                ("rows_out", None),
                ("outputs", collections.OrderedDict()),
                ("notes", collections.OrderedDict()),
            ])
            manifest.add_stage(record)

            logging.info("Stage '%s' (%s) starting." % (context.qualified_name(stage.name), stage.stage_type))
            start = time.time()
            try:
                record["rows_in"] = artifact.rows
                result = stage(context, artifact)
                record["rows_out"] = result.rows
            except StageFailure as e:
                self._finish_record(context, record, stage, None, "failed", e)
                timings.append(_timing(context, stage, start))
                raise
            except PipelineException as e:
                self._finish_record(context, record, stage, None, "failed", e)
                timings.append(_timing(context, stage, start))
                raise StageFailure(stage.name, e)

            self._finish_record(context, record, stage, result, "complete")
            timings.append(_timing(context, stage, start))
            context.register_output(stage, result)
            logging.info("Stage '%s' Successfully completed: %d rows in, %d rows out."
                         % (context.qualified_name(stage.name), record["rows_in"], record["rows_out"]))
            artifact = result

        return artifact

    def _finish_record(self, context, record, stage, result, status, error=None):
        record["status"] = status
        if error is not None:
            record["error"] = str(getattr(error, "cause", error))
        if result is not None:
            for side, path in result.files().items():
                record["outputs"][side] = {"path": context.relpath(path)}
        for key, path in stage.extra_outputs.items():
            record["outputs"][key] = {"path": context.relpath(path)}
        record["notes"].update(stage.notes)


def _timing(context, stage, start):
    return collections.OrderedDict([
        ("stage", context.qualified_name(stage.name)),
        ("seconds", round(time.time() - start, 3)),
    ])
