import os
import tempfile
import unittest
from unittest.mock import patch

from halfwave.config import DEFAULTS, RunConfig, build_run_config, load_config
from halfwave.errors import ConfigError, UsageError


class TestLoadConfig(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = os.path.join(self.tmp.name, "run.env")

    def tearDown(self):
        self.tmp.cleanup()

    def _write(self, text):
        with open(self.path, "w") as f:
            f.write(text)

    @patch("builtins.print")
    def test_typed_values(self, mock_print):
        self._write("m=3\nv=0.25\nformat=csv\n# comment\nout=\n")
        config = load_config(self.path)
        self.assertEqual(config, {"m": 3, "v": 0.25, "format": "csv"})
        mock_print.assert_called_once_with("Configuration file loaded successfully")

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            load_config(os.path.join(self.tmp.name, "absent.env"))

    def test_unknown_key(self):
        self._write("colour=blue\n")
        with self.assertRaises(ConfigError):
            load_config(self.path)

    def test_bad_value(self):
        self._write("steps=many\n")
        with self.assertRaises(ConfigError):
            load_config(self.path)


class TestBuildRunConfig(unittest.TestCase):
    def test_defaults(self):
        config = build_run_config("spectrum", {})
        self.assertIsInstance(config, RunConfig)
        self.assertEqual(config.m, DEFAULTS["m"])
        self.assertEqual(config.n, 4096)
        self.assertEqual(config.K, 2047)
        self.assertEqual(config.format, "json")

    def test_command_defaults(self):
        self.assertEqual(build_run_config("evolve", {}).n, 256)
        lattice = build_run_config("lattice", {})
        self.assertEqual((lattice.n, lattice.steps), (64, 100))
        self.assertEqual(build_run_config("coerce", {"m": 3}).K, 14)

    def test_coerce_band_ignores_the_grid(self):
        self.assertEqual(build_run_config("coerce", {"m": 5, "n": 16}).K, 18)
        self.assertEqual(build_run_config("coerce", {"K": 40, "n": 16}).K, 40)
        with self.assertRaises(UsageError):
            build_run_config("coerce", {"K": 0})

    def test_precedence(self):
        config = build_run_config("soliton", {"m": 4, "v": None}, {"m": 2, "v": 0.5})
        self.assertEqual(config.m, 4)
        self.assertEqual(config.v, 0.5)

    def test_usage_errors(self):
        bad = [
            ("spectrum", {"m": 0}),
            ("soliton", {"v": 1.0}),
            ("evolve", {"v": -1.5}),
            ("soliton", {"n": 100}),
            ("soliton", {"n": 4}),
            ("soliton", {"K": 5000}),
            ("soliton", {"s": 0}),
            ("soliton", {"format": "xml"}),
            ("evolve", {"dt": 0.0}),
            ("evolve", {"steps": 0}),
            ("spectrum", {"tol": -1.0}),
            ("plot", {}),
        ]
        for command, values in bad:
            with self.subTest(command=command, values=values):
                with self.assertRaises(UsageError):
                    build_run_config(command, values)

    def test_lattice_accepts_degree_zero(self):
        self.assertEqual(build_run_config("lattice", {"m": 0}).m, 0)


if __name__ == "__main__":
    unittest.main()
