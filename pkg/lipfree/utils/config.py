# The MIT License (MIT)
# Copyright © 2024 lipfree developers

# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the “Software”), to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.

# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.


import os
import argparse
import bittensor as bt
from loguru import logger

from lipfree.base.flow import PIVOT_ENV, PIVOT_RULES
from lipfree.spaces import DEFAULT_MAX_POINTS


_events_sink = None


def check_config(config: "bt.Config"):
    r"""Checks/validates the config namespace object."""
    global _events_sink
    bt.logging.check_config(config)

    if config.solver.pivot_rule not in PIVOT_RULES:
        raise ValueError(f"--solver.pivot_rule must be one of {PIVOT_RULES}")
    os.environ[PIVOT_ENV] = config.solver.pivot_rule

    if config.gen.max_points < 2:
        raise ValueError("--gen.max_points must be at least 2")

    config.run.full_path = os.path.expanduser(config.run.dir)
    if config.run.save_events:
        os.makedirs(config.run.full_path, exist_ok=True)
        # Add custom event logger for the events.
        try:
            logger.level("EVENTS")
        except ValueError:
            logger.level("EVENTS", no=38, icon="📝")
        if _events_sink is not None:
            logger.remove(_events_sink)
        _events_sink = logger.add(
            os.path.join(config.run.full_path, "events.log"),
            rotation=config.run.events_retention_size,
            serialize=True,
            enqueue=True,
            backtrace=False,
            diagnose=False,
            level="EVENTS",
            format="{time:YYYY-MM-DD at HH:mm:ss} | {level} | {message}",
        )


def log_event(config: "bt.Config", message: str, **fields):
    """One structured record per written report; a no-op unless events are saved."""
    if config.run.save_events and _events_sink is not None:
        logger.bind(**fields).log("EVENTS", message)


def close_events():
    global _events_sink
    if _events_sink is not None:
        logger.complete()
        logger.remove(_events_sink)
        _events_sink = None


def add_args(parser):
    """
    Adds relevant arguments to the parser for operation.
    """

    parser.add_argument(
        "--solver.pivot_rule",
        type=str,
        choices=PIVOT_RULES,
        help="Sink selection rule of the transport solver. Affects speed and certificates, never values.",
        default=os.environ.get(PIVOT_ENV, "nearest"),
    )

    parser.add_argument(
        "--run.dir",
        type=str,
        help="Directory for the events log.",
        default="~/.lipfree/runs",
    )

    parser.add_argument(
        "--run.save_events",
        action="store_true",
        help="If set, one structured record per report is appended to run.dir/events.log.",
        default=False,
    )

    parser.add_argument(
        "--run.events_retention_size",
        type=str,
        help="Events retention size.",
        default="2 GB",
    )

    parser.add_argument(
        "--out",
        type=str,
        help="Write the report here instead of stdout.",
        default=None,
    )

    parser.add_argument(
        "--gen.max_points",
        type=int,
        help="Largest random space the generators will build.",
        default=DEFAULT_MAX_POINTS,
    )


def config(parser: argparse.ArgumentParser, argv=None) -> "bt.Config":
    """
    Returns the configuration object for a fully built parser.
    """
    return bt.config(parser, args=argv)
