"""Batch rendering of morsedeco CSV outputs into PNG figures.

This package is a pure view layer: every plotted number is read from the
input CSV and fit-manifest files, never recomputed.
"""

from .io import SchemaError, read_fit_manifest, read_sweep_csv, read_wigner_csv
from .render import render_decay, render_wigner

__all__ = ["SchemaError", "read_wigner_csv", "read_sweep_csv",
           "read_fit_manifest", "render_wigner", "render_decay"]
