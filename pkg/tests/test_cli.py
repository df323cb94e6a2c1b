import io
import json
import os
import unittest
from unittest import mock

import yaml

from stpipe.core import bpe, corpus, ngramlm, recase, rerank, textnorm
from stpipe.core.asrsim import to_asr_format
from stpipe.scripts import stpipe_cli

from .stpipe_testcase import StpipeTestCase


class TestCli(StpipeTestCase):

    def setUp(self):
        super(TestCli, self).setUp()
        self.english, self.german = self.write_test_corpora(count=60, seed=60)

    def cli(self, *argv):
        return stpipe_cli.main(["--settings", self.get_test_settings_file()] + list(argv))

    def cli_output(self, *argv):
        with mock.patch("sys.stdout", new_callable=io.StringIO) as stdout:
            code = self.cli(*argv)
        return code, stdout.getvalue()

    def temp(self, name):
        return self.get_test_temp_file(name)

    def tokenized(self):
        self.assertEqual(self.cli("normalize", "-i", self.english, "-o", self.temp("tok.en")), 0)
        return self.temp("tok.en")

    def test_normalize_and_asr_format(self):
        tokens = self.tokenized()
        expected = [u" ".join(textnorm.tokenize(textnorm.normalize_punct(line))) for line in self.read_temp_lines(self.english)]
        self.assertEqual(self.read_temp_lines(tokens), expected)

        self.assertEqual(self.cli("asr-format", "-i", tokens, "-o", self.temp("asr.en")), 0)
        self.assertEqual(self.read_temp_lines(self.temp("asr.en")),
                         [u" ".join(to_asr_format(line.split())) for line in expected])

        self.assertEqual(self.cli("normalize", "--lowercase", "-i", self.english, "-o", self.temp("lc.en")), 0)
        self.assertEqual(self.read_temp_lines(self.temp("lc.en")), [line.lower() for line in expected])

    def test_bpe(self):
        tokens = self.tokenized()
        model = self.temp("joint.bpe")
        self.assertEqual(self.cli("bpe-learn", "-i", tokens, "--model", model, "--merges", "40"), 0)
        self.assertEqual(len(bpe.BpeModel.load(model).merges), 40)

        self.assertEqual(self.cli("bpe-apply", "-i", tokens, "-o", self.temp("bpe.en"), "--model", model), 0)
        self.assertEqual(self.cli("bpe-revert", "-i", self.temp("bpe.en"), "-o", self.temp("plain.en")), 0)
        self.assertEqual(self.read_bytes(self.temp("plain.en")), self.read_bytes(tokens))

    def test_bpe_learn_joint(self):
        tokens = self.tokenized()
        self.assertEqual(self.cli("normalize", "-i", self.german, "-o", self.temp("tok.de")), 0)
        joint = self.temp("joint.bpe")
        self.assertEqual(self.cli("bpe-learn", "--merges", "60", "--in", tokens, self.temp("tok.de"), "--out", joint), 0)

        sentences = [line.split() for path in (tokens, self.temp("tok.de")) for line in self.read_temp_lines(path)]
        expected = bpe.learn_bpe(sentences, 60, min_frequency=2)
        self.assertEqual(bpe.BpeModel.load(joint).merges, expected.merges)

        english_only = self.temp("english.bpe")
        self.assertEqual(self.cli("bpe-learn", "--merges", "60", "--in", tokens, "--out", english_only), 0)
        self.assertNotEqual(bpe.BpeModel.load(english_only).merges, expected.merges)

        self.assertEqual(self.cli("bpe-apply", "-i", self.temp("tok.de"), "-o", self.temp("bpe.de"), "--model", joint), 0)
        self.assertEqual(self.cli("bpe-revert", "-i", self.temp("bpe.de"), "-o", self.temp("plain.de")), 0)
        self.assertEqual(self.read_bytes(self.temp("plain.de")), self.read_bytes(self.temp("tok.de")))

        self.assertEqual(self.cli("bpe-learn", "--in", tokens, self.temp("missing.de"), "--out", joint), 1)

    def test_bad_model_files(self):
        tokens = self.tokenized()
        self.assertEqual(self.cli("bpe-apply", "-i", tokens, "-o", self.temp("x"), "--model", self.temp("missing.bpe")), 1)

        broken = self.write_temp_lines("broken.bpe", [u"no header"])
        self.assertEqual(self.cli("bpe-apply", "-i", tokens, "-o", self.temp("x"), "--model", broken), 1)
        self.assertEqual(self.cli("lm-score", "-i", tokens, "-o", self.temp("x"), "--lm", broken), 1)

    def test_asr_sim_select_and_lm(self):
        tokens = self.tokenized()
        nbest = self.temp("asr.nbest")
        self.assertEqual(self.cli("asr-sim", "-i", tokens, "-o", nbest, "--nbest", "5", "--seed", "3", "--wer", "0.2"), 0)
        lists = list(corpus.read_nbest(nbest))
        self.assertEqual(len(lists), 60)
        self.assertTrue(all(len(nbest_list) == 5 for nbest_list in lists))

        german_tokens = self.write_temp_lines("tok.de", [u" ".join(textnorm.tokenize(line)) for line in self.read_temp_lines(self.german)])
        self.assertEqual(self.cli("select", "--nbest", nbest, "--targets", german_tokens, "--ranks", "1-3",
                                  "--out-source", self.temp("sel.en"), "--out-target", self.temp("sel.de")), 0)
        self.assertEqual(corpus.count_lines(self.temp("sel.en")), 180)

        lm = self.temp("asr.arpa")
        self.assertEqual(self.cli("lm-train", "-i", tokens, "--lm", lm, "--order", "3", "--asr"), 0)
        self.assertEqual(ngramlm.NGramModel.load(lm).order, 3)

        self.assertEqual(self.cli("lm-score", "-i", self.temp("sel.en"), "-o", self.temp("scores.txt"), "--lm", lm), 0)
        scores = [float(line) for line in self.read_temp_lines(self.temp("scores.txt"))]
        self.assertEqual(len(scores), 180)
        self.assertTrue(all(score < 0 for score in scores))

        self.assertEqual(self.cli("lm-ppl", "-i", self.temp("sel.en"), "-o", self.temp("ppl.txt"), "--lm", lm), 0)
        self.assertGreater(float(self.read_temp_lines(self.temp("ppl.txt"))[0]), 1.0)

        self.assertEqual(self.cli("rerank", "--lm", lm, "--nbest", nbest, "-o", self.temp("reranked.nbest"), "--w-orig", "0.5"), 0)
        self.assertEqual(len(list(corpus.read_nbest(self.temp("reranked.nbest")))), 60)

        self.assertEqual(self.cli("pick-best", "--lm", lm, "--nbest", nbest, "-o", self.temp("best.en")), 0)
        self.assertEqual(corpus.count_lines(self.temp("best.en")), 60)

        self.assertEqual(self.cli("rerank", "--lm", lm, "--nbest", nbest, "-o", self.temp("x"), "--w-orig", "-1"), 1)

    def test_recase(self):
        tokens = self.tokenized()
        model = self.temp("recaser.model")
        self.assertEqual(self.cli("recase-train", "-i", tokens, "--model", model), 0)
        self.assertEqual(recase.RecaserModel.load(model).context_lm.order, 2)

        lowered = self.write_temp_lines("lowered.en", [line.lower() for line in self.read_temp_lines(tokens)])
        self.assertEqual(self.cli("recase", "-i", lowered, "-o", self.temp("recased.en"), "--model", model), 0)
        recased = self.read_temp_lines(self.temp("recased.en"))
        self.assertEqual([line.lower() for line in recased], self.read_temp_lines(lowered))
        self.assertEqual(recased[0][:1], recased[0][:1].upper())

    def test_recase_order(self):
        tokens = self.tokenized()
        model = self.temp("recaser4.model")
        self.assertEqual(self.cli("recase-train", "-i", tokens, "--model", model, "--order", "4"), 0)
        self.assertEqual(recase.RecaserModel.load(model).context_lm.order, 4)
        with mock.patch("sys.stderr", new_callable=io.StringIO):
            self.assertRaises(SystemExit, self.cli, "recase-train", "-i", tokens, "--model", model, "--order", "1")

    def test_length_normalize_setting(self):
        tokens = self.tokenized()
        nbest = self.temp("asr.nbest")
        self.assertEqual(self.cli("asr-sim", "-i", tokens, "-o", nbest, "--nbest", "8", "--seed", "5", "--wer", "0.3"), 0)
        lm_path = self.temp("asr.arpa")
        self.assertEqual(self.cli("lm-train", "-i", tokens, "--lm", lm_path, "--order", "2"), 0)
        lm = ngramlm.NGramModel.load(lm_path)
        lists = list(corpus.read_nbest(nbest))

        with open(self.get_test_settings_file()) as handle:
            values = yaml.safe_load(handle)
        values["rerank"]["length_normalize"] = False
        unnormalized = self.temp("unnormalized.yaml")
        with open(unnormalized, "w") as handle:
            yaml.safe_dump(values, handle)

        self.assertEqual(self.cli("pick-best", "--lm", lm_path, "--nbest", nbest, "-o", self.temp("default.en")), 0)
        self.assertEqual(stpipe_cli.main(["--settings", unnormalized, "pick-best", "--lm", lm_path, "--nbest", nbest,
                                          "-o", self.temp("setting.en")]), 0)
        self.assertEqual(self.cli("pick-best", "--lm", lm_path, "--nbest", nbest, "-o", self.temp("flag.en"),
                                  "--no-length-normalize"), 0)

        for name, normalize in (("default.en", True), ("setting.en", False), ("flag.en", False)):
            expected = [u" ".join(rerank.pick_best_translation(nbest_list.hypotheses, lm, length_normalize=normalize))
                        for nbest_list in lists]
            self.assertEqual(self.read_temp_lines(self.temp(name)), expected, name)

        self.assertEqual(stpipe_cli.main(["--settings", unnormalized, "rerank", "--lm", lm_path, "--nbest", nbest,
                                          "-o", self.temp("setting.nbest")]), 0)
        self.assertEqual(self.cli("rerank", "--lm", lm_path, "--nbest", nbest, "-o", self.temp("flag.nbest"),
                                  "--no-length-normalize"), 0)
        self.assertEqual(self.read_bytes(self.temp("setting.nbest")), self.read_bytes(self.temp("flag.nbest")))

    def test_translate(self):
        tokens = self.tokenized()
        self.assertEqual(self.cli("translate", "-i", tokens, "-o", self.temp("out.en"),
                                  "--adapter", "{python} -m stpipe.adapters.identity"), 0)
        self.assertEqual(self.read_bytes(self.temp("out.en")), self.read_bytes(tokens))

        self.assertEqual(self.cli("translate", "-i", tokens, "-o", self.temp("out.en"),
                                  "--adapter", "{python} -c 'import sys; sys.exit(3)'"), 1)

    def test_eval(self):
        tokens = self.tokenized()
        code, output = self.cli_output("eval-bleu", "--hyp", tokens, "--ref", tokens, "--json")
        self.assertEqual(code, 0)
        report = json.loads(output)
        self.assertEqual(report["bleu"], 100.0)
        self.assertEqual(report["name"], "tok.en")

        lowered = self.write_temp_lines("lowered.en", [line.lower() for line in self.read_temp_lines(tokens)])
        code, output = self.cli_output("eval-bleu", "--hyp", lowered, "--ref", tokens, "--lc", "--json", "--name", "lc")
        self.assertEqual(json.loads(output)["bleu_lc"], 100.0)

        code, output = self.cli_output("eval-wer", "--hyp", lowered, "--ref", tokens)
        self.assertEqual(code, 0)
        self.assertTrue(output.startswith("System"))
        self.assertIn("lowered.en", output)

        short = self.write_temp_lines("short.en", [u"only one line"])
        code, _ = self.cli_output("eval-wer", "--hyp", short, "--ref", tokens)
        self.assertEqual(code, 1)

    def test_pipeline_validate(self):
        valid = ["pipeline", "validate",
                 "--config", self.get_test_config_file("test_config_file.yaml"),
                 "--config", self.get_test_config_file("test_config_file2.yaml")]
        self.assertEqual(self.cli(*valid), 0)
        self.assertEqual(self.cli("pipeline", "validate", "--config", self.get_test_config_file("test_pipeline.yaml")), 0)

        run_order = self.get_test_temp_file("circular.yaml")
        with open(run_order, "w") as handle:
            yaml.safe_dump({"run": ["circular"]}, handle)
        self.assertEqual(self.cli(*(valid + ["--config", run_order])), 1)
        self.assertEqual(self.cli("pipeline", "validate", "--config", self.temp("missing.yaml")), 1)
        self.assertEqual(self.cli(*(valid + ["--seed", "-1"])), 1)

    def test_pipeline_run(self):
        self.write_test_corpora(count=30, seed=61, stem="subs")
        out = self.get_test_temp_file("cli_runs")
        code, output = self.cli_output("pipeline", "run",
                                       "--config", self.get_test_config_file("test_config_file.yaml"),
                                       "--config", self.get_test_config_file("test_config_file2.yaml"),
                                       "--out", out, "--run-id", "cli", "--seed", "9")
        self.assertEqual(code, 0)
        with open(os.path.join(out, "cli", "manifest.json")) as handle:
            manifest = json.load(handle)
        self.assertEqual(manifest["seed"], 9)
        self.assertEqual(manifest["status"], "complete")
        self.assertTrue(os.path.isfile(os.path.join(out, "cli", "corpora", "ted-second.src")))
        self.assertTrue(os.path.isfile(os.path.join(out, "cli", "corpora", "subs-second.tgt")))

    def test_stage(self):
        tokens = self.tokenized()
        out = self.temp("stage_out")
        self.assertEqual(self.cli("stage", "asr-format", "--source", tokens, "--target", self.german,
                                  "--out", out, "--sides", "both"), 0)
        result = os.path.join(out, "01-asr-format")
        self.assertEqual(self.read_temp_lines(os.path.join(result, "source.txt")),
                         [u" ".join(to_asr_format(line.split())) for line in self.read_temp_lines(tokens)])
        self.assertEqual(corpus.count_lines(os.path.join(result, "target.txt")), 60)

        self.assertEqual(self.cli("stage", "noise", "--source", tokens, "--out", self.temp("noise_out"),
                                  "--nbest", "3", "--seed", "2"), 0)
        self.assertEqual(len(list(corpus.read_nbest(os.path.join(self.temp("noise_out"), "01-noise", "source.nbest")))), 60)

        self.assertEqual(self.cli("stage", "no-such-stage", "--source", tokens, "--out", out), 1)
        self.assertEqual(self.cli("stage", "lowercase", "--source", tokens, "--out", out, "--colour", "red"), 1)
        self.assertEqual(self.cli("stage", "select", "--source", tokens, "--out", out), 1)

    def test_argument_errors(self):
        with mock.patch("sys.stderr", new_callable=io.StringIO):
            self.assertRaises(SystemExit, self.cli, "normalize", "--colour", "red")
            self.assertRaises(SystemExit, self.cli, "stage", "lowercase", "--source", "x", "--out", "y", "--odd")


if __name__ == "__main__":
    unittest.main()
