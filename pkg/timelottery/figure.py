"""
Scatter of the RATL share against the growth-rate gap, with the OLS line and
its confidence band.
"""

from enum import Enum
from typing import BinaryIO

import matplotlib
import pandas as pd
from matplotlib.figure import Figure

from timelottery.errors import ValidationError
from timelottery.logger import logger
from timelottery.models import BandPoint, ChoiceProblemRecord, OLSFit

SVG_RC = {
    "svg.hashsalt": "timelottery",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
}
FIGURE_SIZE = (6.0, 4.5)
CSV_COLUMNS = ["kind", "label", "x", "y", "y_hat", "half_width"]


class FigureFormat(str, Enum):
    SVG = "svg"
    CSV = "csv"


def _write_svg(
    records: list[ChoiceProblemRecord],
    fit: OLSFit,
    band: list[BandPoint],
    sink: BinaryIO,
    title: str | None,
) -> None:
    band = sorted(band, key=lambda b: b.x)
    with matplotlib.rc_context(SVG_RC):
        figure = Figure(figsize=FIGURE_SIZE)
        ax = figure.add_subplot()
        if band:
            ax.fill_between(
                [b.x for b in band],
                [b.lower for b in band],
                [b.upper for b in band],
                color="0.85",
                linewidth=0,
                gid="confidence-band",
            )
            ax.plot(
                [b.x for b in band],
                [b.y_hat for b in band],
                color="black",
                label=f"OLS fit (R² = {fit.r_squared:.2f})",
                gid="ols-fit",
            )
        ax.plot(
            [r.gap for r in records],
            [r.ratl_fraction for r in records],
            linestyle="none",
            marker="o",
            color="tab:blue",
            label="choice problems",
            gid="ratl-scatter",
        )
        ax.set_xlabel(f"Ensemble-average minus time-average growth rate ({records[0].unit_label})")
        ax.set_ylabel("RATL subjects (%)")
        if title:
            ax.set_title(title)
        ax.legend(loc="upper left")
        figure.subplots_adjust(left=0.12, right=0.96, bottom=0.13, top=0.92)
        figure.savefig(sink, format="svg", metadata={"Date": None})


def _write_csv(
    records: list[ChoiceProblemRecord],
    fit: OLSFit,
    band: list[BandPoint],
    sink: BinaryIO,
) -> None:
    rows = [
        {
            "kind": "point",
            "label": r.label,
            "x": r.gap,
            "y": r.ratl_fraction,
            "y_hat": fit.predict(r.gap),
            "half_width": None,
        }
        for r in records
    ]
    rows += [
        {
            "kind": "band",
            "label": "",
            "x": b.x,
            "y": None,
            "y_hat": b.y_hat,
            "half_width": b.half_width,
        }
        for b in band
    ]
    frame = pd.DataFrame(rows, columns=CSV_COLUMNS)
    sink.write(frame.to_csv(index=False, lineterminator="\n").encode("utf-8"))


def emit_figure(
    records: list[ChoiceProblemRecord],
    fit: OLSFit,
    band: list[BandPoint],
    sink: BinaryIO,
    fmt: FigureFormat = FigureFormat.SVG,
    title: str | None = None,
) -> None:
    """
    Writes the figure to a binary sink.

    SVG output is byte-identical for identical inputs. CSV output lists one
    ``point`` row per record and one ``band`` row per band point.
    """
    if not records:
        raise ValidationError("Cannot draw a figure without records")
    if fmt is FigureFormat.SVG:
        _write_svg(records, fit, band, sink, title)
    else:
        _write_csv(records, fit, band, sink)
    logger.debug(f"[Figure] Wrote {fmt.value} figure with {len(records)} points")
