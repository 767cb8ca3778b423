"""Cointegration and VECM analysis: unit roots, Johansen trace test, diagnostics and structural analysis."""

from .dataset import TimeSeriesTable, TransformSpec, apply_transforms, descriptive_stats, first_difference, load_table, save_table
from .diagnostics import TestResult, granger_short_run, lm_autocorrelation, stability, weak_exogeneity
from .johansen import VecmFit, VecmSpec, estimate_vecm, normalize_beta, restrict_beta, trace_test
from .structural import Ordering, bootstrap_bands, fevd, irf, vecm_to_var
from .synthetic import VecmDgp, random_walk, simulate
from .unitroot import adf_test, integration_order
from .varbase import fit_var, lag_order_table

__version__ = "0.1.0"
