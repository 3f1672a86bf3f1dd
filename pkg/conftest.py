"""Pytest wiring: absltest expects parsed flags (e.g. --test_tmpdir)."""

from absl import flags


def pytest_configure(config):
    if not flags.FLAGS.is_parsed():
        flags.FLAGS.mark_as_parsed()
