import unittest

import networkx

from stpipe.core.engine.runner import validate_stage_graphs
from stpipe.core.engine.stage_graph import StageGraph
from stpipe.core.exceptions import PipelineException, PipelineValidationException
from stpipe.core.stages.corpora import Emit, Mix
from stpipe.core.stages.evaluate import Evaluate
from stpipe.core.stages.nbest import Select
from stpipe.core.stages.noise import Noise
from stpipe.core.stages.text import AsrFormat, Lowercase, Normalize

from .stpipe_testcase import StpipeTestCase


class TestStageGraph(StpipeTestCase):

    def _chain(self, name="ted", inputs=None):
        graph = StageGraph(name, inputs=inputs or {"format": "raw", "source": "ted.en", "target": "ted.de"})
        graph.add_stages([
            Normalize(name="normalize"),
            AsrFormat(name="asr_format"),
            Noise(name="simulate_asr"),
            Select(name="top10"),
            Emit(name="emit", label="TED-ASR-top10"),
        ])
        return graph

    def test_chain(self):
        graph = self._chain()
        graph.validate_stage_graph()
        self.assertEqual([stage.name for stage in graph.stages], ["normalize", "asr_format", "simulate_asr", "top10", "emit"])
        self.assertEqual(list(networkx.topological_sort(graph._graph)), [stage.name for stage in graph.stages])
        self.assertEqual(graph.external_references(), [])

    def test_duplicate_stage(self):
        graph = self._chain()
        self.assertRaises(PipelineException, graph.add_stage, Lowercase(name="asr_format"))

    def test_empty_graph(self):
        self.assertRaises(PipelineValidationException, StageGraph("empty").validate_stage_graph)

    def test_circular_dependencies(self):
        graph = StageGraph("loop", inputs={"source": "x"})
        graph.add_stages([
            Normalize(name="normalize"),
            Lowercase(name="lowercase", dependencies=["asr_format"]),
            AsrFormat(name="asr_format"),
        ])
        self.assertRaises(PipelineValidationException, graph.validate_stage_graph)

    def test_unknown_reference(self):
        graph = StageGraph("missing", inputs={"source": "x"})
        graph.add_stages([Normalize(name="normalize"), Evaluate(name="evaluate", reference_stage="nowhere")])
        self.assertRaises(PipelineValidationException, graph.validate_stage_graph)

    def test_kind_mismatch(self):
        graph = StageGraph("kinds", inputs={"format": "raw", "source": "x"})
        graph.add_stages([Normalize(name="normalize"), Select(name="top10")])
        with self.assertRaises(PipelineValidationException) as context:
            graph.validate_stage_graph()
        self.assertIn("nbest", str(context.exception))

        graph = StageGraph("raw_lowercase", inputs={"format": "raw", "source": "x"})
        graph.add_stage(Lowercase(name="lowercase"))
        self.assertRaises(PipelineValidationException, graph.validate_stage_graph)

    def test_unknown_input_format(self):
        graph = StageGraph("odd", inputs={"format": "audio", "source": "x"})
        graph.add_stage(Normalize(name="normalize"))
        self.assertRaises(PipelineValidationException, graph.validate_stage_graph)

    def test_input_artifact(self):
        graph = self._chain()
        artifact = graph.input_artifact()
        self.assertEqual((artifact.kind, artifact.source_path, artifact.target_path), ("raw", "ted.en", "ted.de"))

        nbest = StageGraph("nbest", inputs={"format": "nbest", "source": "ignored"})
        self.assertRaises(PipelineValidationException, nbest.input_artifact)

    def test_required_attributes(self):
        graph = StageGraph("emit", inputs={"format": "tokens", "source": "x"})
        graph.add_stage(Emit(name="emit"))
        self.assertRaises(PipelineValidationException, graph.validate_stage_graph)

    def test_cross_pipeline_references(self):
        subs = StageGraph("subs", inputs={"format": "raw", "source": "subs.en", "target": "subs.de"})
        subs.add_stages([Normalize(name="normalize"), AsrFormat(name="asr_format")])

        ted = self._chain()
        ted.add_stage(Mix(name="mix", include_input=False, parts=[{"stage": "subs:asr_format"}, {"stage": "ted:top10"}]))
        self.assertEqual(ted.external_references(), ["subs:asr_format"])

        validate_stage_graphs([subs, ted])
        self.assertRaises(PipelineValidationException, validate_stage_graphs, [ted, subs])
        self.assertRaises(PipelineValidationException, validate_stage_graphs, [subs, ted, subs])

        missing = StageGraph("other", inputs={"format": "tokens", "source": "x", "target": "y"})
        missing.add_stage(Mix(name="mix", parts=[{"stage": "subs:lowercase"}]))
        self.assertRaises(PipelineValidationException, validate_stage_graphs, [subs, missing])

    def test_loaded_pipelines(self):
        loader = self.get_default_test_loader()
        loader.parse_pipeline("ted").validate_stage_graph()
        for name in ("wrong_kind", "missing_reference", "circular"):
            self.assertRaises(PipelineValidationException, loader.parse_pipeline(name).validate_stage_graph)


if __name__ == "__main__":
    unittest.main()
