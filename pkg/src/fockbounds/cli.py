#!/usr/bin/env python
# -*- coding: utf-8 -*-

import argparse
import logging
import sys
import time

from fockbounds import __version__
from fockbounds.report import write_rows
from fockbounds.runner import Runner
from fockbounds.util.config import FORMATS
from fockbounds.util.config import SUBCOMMANDS
from fockbounds.util.config import build_run_config
from fockbounds.util.config import load_config_module
from fockbounds.util.exceptions import EXIT_BAD_CONFIG
from fockbounds.util.exceptions import FockBoundsError

# Module level logger.
logger = logging.getLogger(__name__)


class ArgumentParser(argparse.ArgumentParser):
    """
    Rejects bad flags with the configuration exit code.
    """

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_BAD_CONFIG, "%s: error: %s\n" % (self.prog, message))


def build_parser():
    parser = ArgumentParser(prog="fockbounds")
    parser.add_argument('-d', action='store_true', dest="debug",
                        help="Enable debug mode.")
    parser.add_argument('-v', action='store_true', dest="verbose",
                        help="Log progress at INFO level.")
    parser.add_argument(dest="subcommand", choices=SUBCOMMANDS,
                        help="What to compute.")
    parser.add_argument('--a', dest="A", type=float, nargs='+',
                        help="Lattice spacing(s).")
    parser.add_argument('--a-min', dest="A_MIN", type=float)
    parser.add_argument('--a-max', dest="A_MAX", type=float)
    parser.add_argument('--steps', dest="STEPS", type=int,
                        help="Equally spaced points in [a-min, a-max].")
    parser.add_argument('--n', dest="N", type=int,
                        help="Gram matrix dimension.")
    parser.add_argument('--rho', dest="RHO", type=float,
                        help="Lattice truncation radius.")
    parser.add_argument('--c0', dest="C0", type=float,
                        help="Sampling prefactor.")
    parser.add_argument('--eps', dest="EPS", type=float,
                        help="Exclusion distance around zeros.")
    parser.add_argument('--grid', dest="GRID", type=float,
                        help="Radial step of the planar quadrature.")
    parser.add_argument('--margin', dest="MARGIN", type=float,
                        help="Extent beyond R for the extremal norms.")
    parser.add_argument('--out', dest="OUT",
                        help="Output file, '-' for stdout.")
    parser.add_argument('--format', dest="FORMAT", choices=FORMATS)
    parser.add_argument('--workers', dest="WORKERS", type=int)
    parser.add_argument('--seed', dest="SEED", type=int)
    parser.add_argument('--config', dest="config",
                        help="Configuration module, as a path or dotted name.")
    parser.add_argument('--quick', dest="QUICK", action='store_const',
                        const=True, help="Smaller sizes.")
    return parser


def _emit(rows, cfg, started):
    metadata = {
        "version": __version__,
        "config": cfg.echo(),
        "wall_time": time.time() - started,
    }
    if cfg.out == "-":
        write_rows(rows, cfg.subcommand, cfg.fmt, sys.stdout, metadata)
        sys.stdout.flush()
        return
    with open(cfg.out, "w", newline="") as stream:
        write_rows(rows, cfg.subcommand, cfg.fmt, stream, metadata)


def main(argv=None):
    args = build_parser().parse_args(argv)
    level = logging.WARNING
    if args.debug:
        level = logging.DEBUG
    elif args.verbose:
        level = logging.INFO
    logging.basicConfig(level=level,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")

    flags = dict((key, value) for key, value in vars(args).items()
                 if key.isupper())
    started = time.time()
    try:
        module_settings = load_config_module(args.config) if args.config else None
        cfg = build_run_config(args.subcommand, flags, module_settings,
                               args.debug)
        logger.debug("config: %s" % cfg.echo())
        rows, exit_code = Runner(cfg).run()
        _emit(rows, cfg, started)
    except FockBoundsError as err:
        if args.debug:
            raise
        logger.error("%s" % err)
        print("fockbounds: %s" % err, file=sys.stderr)
        return err.exit_code
    except OSError as err:
        if args.debug:
            raise
        logger.exception("%s" % err)
        return EXIT_BAD_CONFIG
    return exit_code


if __name__ == '__main__':
    sys.exit(main())
