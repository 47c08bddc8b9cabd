import os
import shutil
import tempfile
import unittest
from unittest import mock

import numpy as np

from fdp_bands.config.settings_loader import PROFILE_ENV, TABLE_ENV, SettingsLoader
from fdp_bands.core.competition import CompetitionSequence
from fdp_bands.core.errors import InputFormatError, ParameterError
from fdp_bands.utils.io_utils import IOUtils


class TestSettingsLoader(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        env = mock.patch.dict(os.environ)
        env.start()
        self.addCleanup(env.stop)
        os.environ.pop(TABLE_ENV, None)
        os.environ.pop(PROFILE_ENV, None)

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def test_default_profile(self):
        loader = SettingsLoader(use_dotenv=False)
        settings = loader.get_settings()
        self.assertEqual(settings["profile"], "desk")
        self.assertEqual(settings["calibration"]["n_paths"], 100000)
        self.assertEqual(settings["calibration"]["R"], 0.5)
        self.assertNotIn("profiles", settings)
        self.assertEqual(sorted(loader.list_profiles()), ["desk", "full"])

    def test_profile_selection(self):
        self.assertEqual(SettingsLoader(profile="full", use_dotenv=False).get_section("experiment")["n_reps"], 20000)
        os.environ[PROFILE_ENV] = "full"
        self.assertEqual(SettingsLoader(use_dotenv=False).profile, "full")
        with self.assertRaises(ParameterError):
            SettingsLoader(profile="huge", use_dotenv=False).get_settings()

    def test_user_file_overrides(self):
        path = os.path.join(self.tmp, "user.yaml")
        with open(path, "w", encoding="utf-8") as f:
            f.write("mixture:\n  m: 300\nprofiles:\n  desk:\n    experiment:\n      n_reps: 7\n")
        settings = SettingsLoader(config_path=path, use_dotenv=False).get_settings()
        self.assertEqual(settings["mixture"]["m"], 300)
        self.assertEqual(settings["mixture"]["pi0"], 0.5)
        self.assertEqual(settings["experiment"]["n_reps"], 7)
        self.assertEqual(settings["experiment"]["kinds"], ["sb", "ub", "kr"])

    def test_table_path(self):
        self.assertIsNone(SettingsLoader.table_path())
        os.environ[TABLE_ENV] = "/tmp/from-env.csv"
        self.assertEqual(SettingsLoader.table_path(), "/tmp/from-env.csv")
        self.assertEqual(SettingsLoader.table_path("given.csv"), "given.csv")


class TestCompetitionFiles(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def write(self, text):
        path = os.path.join(self.tmp, "input.txt")
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    def test_tab_separated_scores(self):
        seq = IOUtils.read_competition(self.write("1.5\t-1\n4.0\t1\n\n2.5\t0\n"), rng=0)
        np.testing.assert_array_equal(seq.labels, [1, 0, -1])
        np.testing.assert_array_equal(seq.scores, [4.0, 2.5, 1.5])

    def test_header_case_and_order(self):
        seq = IOUtils.read_competition(self.write("Label,Score\n-1,1.0\n1,2.0\n"), rng=0)
        np.testing.assert_array_equal(seq.labels, [1, -1])

    def test_format_errors(self):
        with self.assertRaises(InputFormatError):
            IOUtils.read_competition(self.write("score,kind\n1,1\n"))
        with self.assertRaises(InputFormatError):
            IOUtils.read_competition(self.write("1,2,3\n"))
        with self.assertRaises(InputFormatError):
            IOUtils.read_competition(self.write("label\n1\nx\n"))
        with self.assertRaises(InputFormatError):
            IOUtils.read_competition(os.path.join(self.tmp, "absent.txt"))

    def test_multi_decoy_columns(self):
        targets, decoys = IOUtils.read_multi_decoy(self.write("3,1,2\n0,5,1\n"), 2)
        np.testing.assert_array_equal(targets, [3.0, 0.0])
        self.assertEqual(decoys.shape, (2, 2))
        with self.assertRaises(InputFormatError):
            IOUtils.read_multi_decoy(self.write("target,decoy1\n1,2\n"), 2)

    def test_written_competition_reads_back(self):
        seq = CompetitionSequence.from_scores([0.1, 2.0 / 3.0, 5.0], [1, -1, 1], rng=0)
        path = IOUtils.write_competition(seq, os.path.join(self.tmp, "out", "seq.csv"))
        again = IOUtils.read_competition(path)
        np.testing.assert_array_equal(again.scores, seq.scores)
        np.testing.assert_array_equal(again.labels, seq.labels)

    def test_jsonable(self):
        data = IOUtils.to_jsonable({"a": np.int64(3), "b": np.array([0.5, 1.0]), 4: (np.float64(2.0),)})
        self.assertEqual(data, {"a": 3, "b": [0.5, 1.0], "4": [2.0]})
        self.assertIsInstance(data["a"], int)


if __name__ == '__main__':
    unittest.main()
