"""Row schema shared by experiment curves and the CSV persistence layer.

One row per (n, replicate) cell. `value` is the normalized statistic that
converges to the theoretical target (M_n / log n, or -log m_n / log n);
`aux` is the raw regression ordinate (M_n, or -log m_n). `flag` is one of
"ok", "floor" (reading at or below the precision floor, excluded from fits)
and "resampled" (an endpoint collision forced a redraw; value still valid).
"""

from __future__ import annotations

from dataclasses import dataclass

FLAGS = ("ok", "floor", "resampled")


@dataclass(frozen=True)
class CurveRow:
    n: int
    replicate: int
    seed: int
    value: float
    aux: float
    flag: str = "ok"

    def __post_init__(self):
        if self.flag not in FLAGS:
            raise ValueError(f"flag must be one of {FLAGS}")
