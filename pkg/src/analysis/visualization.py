"""Figures: transform comparison panels and ROC curves."""

from dataclasses import replace
from pathlib import Path
from typing import Optional, Union

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from src.analysis.report import MetricsReport
from src.models.spectrum import RamanSpectrum
from src.transforms import TransformSettings, compute_map
from src.transforms.maps import TFMap


def _show_map(ax, tfmap: TFMap, title: str, ylabel: str, log_rows: bool = False):
    values = tfmap.values
    if tfmap.kind == 'stft_power':
        values = 10.0 * np.log10(values + values.max() * 1e-10 + 1e-300)
    extent = [tfmap.col_axis[0], tfmap.col_axis[-1], tfmap.row_axis[0], tfmap.row_axis[-1]]
    ax.imshow(values, aspect='auto', origin='lower', extent=extent, cmap='viridis')
    if log_rows:
        ax.set_yscale('log')
    ax.set_title(title)
    ax.set_xlabel('Sample')
    ax.set_ylabel(ylabel)


def plot_transform_comparison(
    spectrum: RamanSpectrum,
    path: Optional[Union[str, Path]] = None,
    settings: TransformSettings = TransformSettings()
) -> Figure:
    """Four panels: the spectrum and its STFT, WVD and CWT maps.

    Args:
        spectrum: Spectrum to transform
        path: PNG path to save to (not saved if None)
        settings: Transform parameters (kind is ignored, all three are drawn)

    Returns:
        The matplotlib Figure
    """
    figure = Figure(figsize=(10, 8), dpi=100)
    FigureCanvasAgg(figure)
    axes = figure.subplots(2, 2)

    ax = axes[0, 0]
    ax.plot(spectrum.axis.values, spectrum.intensity, color='steelblue', linewidth=0.8)
    ax.set_title(f"Spectrum {spectrum.label} ({spectrum.label.display_name()})", fontsize=9)
    ax.set_xlabel('Raman shift (cm$^{-1}$)')
    ax.set_ylabel('Intensity')
    ax.grid(True, alpha=0.3)

    x = spectrum.intensity
    stft_map = compute_map(x, replace(settings, kind='stft'))
    wvd_map = compute_map(x, replace(settings, kind='wvd'))
    cwt_map = compute_map(x, replace(settings, kind='cwt'))

    _show_map(axes[0, 1], stft_map, 'STFT power (dB)', 'Frequency (cycles/sample)')
    _show_map(axes[1, 0], wvd_map, 'Wigner-Ville', 'Frequency (cycles/sample)')
    _show_map(axes[1, 1], cwt_map, 'CWT magnitude', 'Scale (samples)', log_rows=True)

    figure.tight_layout()
    if path is not None:
        figure.savefig(path)
    return figure


def plot_roc_curves(report: MetricsReport, path: Optional[Union[str, Path]] = None) -> Figure:
    """One ROC curve per label with its AUC in the legend."""
    figure = Figure(figsize=(6, 6), dpi=100)
    FigureCanvasAgg(figure)
    ax = figure.add_subplot(111)

    for name, curve in report.roc.items():
        ax.plot(curve.fpr, curve.tpr, linewidth=1.5, label=f"{name} (AUC {report.auc[name]:.3f})")
    ax.plot([0, 1], [0, 1], color='gray', linestyle='--', linewidth=1)
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.01)
    ax.set_xlabel('False positive rate')
    ax.set_ylabel('True positive rate')
    ax.set_title('ROC per label')
    if report.roc:
        ax.legend(loc='lower right')
    ax.grid(True, alpha=0.3)

    figure.tight_layout()
    if path is not None:
        figure.savefig(path)
    return figure
