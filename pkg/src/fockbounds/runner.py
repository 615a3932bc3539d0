# -*- coding: utf-8 -*-
"""
Subcommand dispatch: one result row per lattice spacing, run serially or in
a worker pool, errors turned into row annotations and exit codes.
"""

import functools
import logging
import multiprocessing

from fockbounds.extremal import run_extremal
from fockbounds.frame_bounds import build_gram
from fockbounds.frame_bounds import canonical_dual
from fockbounds.frame_bounds import default_radius
from fockbounds.frame_bounds import estimate_frame_bounds
from fockbounds.frame_bounds import lambda_extremes
from fockbounds.frame_bounds import reconstruction_error
from fockbounds.selftest import run_selftest
from fockbounds.sigma import sigma_check_row
from fockbounds.util.exceptions import EXIT_OK
from fockbounds.util.exceptions import FockBoundsError

# Module level logger.
logger = logging.getLogger(__name__)

QUICK_N = 60


def _dimension(cfg):
    return min(cfg.N, QUICK_N) if cfg.quick else cfg.N


def bounds_row(cfg, a):
    N = _dimension(cfg)
    report = estimate_frame_bounds(a, N, cfg.rho, cfg.c0, seed=cfg.seed)
    return {
        "a": a, "N": N, "rho": report.rho, "A_est": report.A_est,
        "B_est": report.B_est, "ratio_A": report.ratio_A,
        "walnut_upper": report.walnut_upper,
        "b_lower_probe": report.b_lower_probe,
        "dual_lower": report.dual_lower, "conv_A_halfN": report.A_half_N,
        "conv_A_smallrho": report.A_rho_minus_1,
        "condition": report.condition, "instability": report.instability,
    }


def dual_row(cfg, a):
    N = _dimension(cfg)
    rho = cfg.rho if cfg.rho is not None else default_radius(N)
    gram = build_gram(a, N, rho, cfg.c0)
    A_est, _ = lambda_extremes(gram, seed=cfg.seed)
    dual = canonical_dual(a, N, rho, gram=gram)
    error = reconstruction_error(dual, a)
    return {
        "a": a, "N": N, "rho": rho, "A_est": A_est,
        "kappa_fit": dual.kappa_fit,
        "kappa_over_gap": dual.kappa_fit / (1.0 - a * a),
        "w_norm": dual.w_norm, "dual_lower": dual.dual_lower,
        "envelope_lower": dual.envelope_lower,
        "reconstruction_error": error,
    }


def extremal_row(cfg, a):
    report = run_extremal(a, margin=cfg.margin, dr=cfg.grid, eps=cfg.eps)
    return report.as_row()


def sigma_row(cfg, a):
    test_radius = 2.0 if cfg.quick else 4.0
    rho_sigma = cfg.rho
    return sigma_check_row(a, cfg.eps, test_radius, rho_sigma)


ROW_BUILDERS = {
    "bounds": bounds_row,
    "sweep": bounds_row,
    "dual": dual_row,
    "extremal": extremal_row,
    "sigma-check": sigma_row,
}


def run_point(cfg, a):
    """
    Result row for one spacing.

    :param cfg: RunConfig
    :param a: lattice spacing
    :return: (row, exit_code)
    """
    builder = ROW_BUILDERS[cfg.subcommand]
    try:
        row = builder(cfg, a)
    except FockBoundsError as err:
        if cfg.debug:
            raise
        logger.error("%s at a=%g: %s" % (cfg.subcommand, a, err))
        return {"a": a, "error": "%s: %s" % (type(err).__name__, err)}, \
            err.exit_code
    row["error"] = None
    return row, EXIT_OK


class Runner(object):
    def __init__(self, cfg):
        self.cfg = cfg

    def _points(self):
        cfg = self.cfg
        work = functools.partial(run_point, cfg)
        if cfg.workers > 1 and len(cfg.a_values) > 1 and not cfg.debug:
            processes = min(cfg.workers, len(cfg.a_values))
            logger.debug("running %d points on %d workers"
                         % (len(cfg.a_values), processes))
            with multiprocessing.Pool(processes) as pool:
                return list(pool.imap(work, cfg.a_values))
        return [work(a) for a in cfg.a_values]

    def run(self):
        """
        Rows in input order and the highest exit code among them.

        :return: (rows, exit_code)
        """
        if self.cfg.subcommand == "selftest":
            return run_selftest(self.cfg)
        results = self._points()
        rows = [row for row, _ in results]
        exit_code = max([code for _, code in results] + [EXIT_OK])
        return rows, exit_code
