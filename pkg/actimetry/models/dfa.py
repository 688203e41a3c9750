from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from actimetry.core.exceptions import InvalidParameterError
from actimetry.models._arrays import frozen_array

DEFAULT_SCALE_EXPONENTS = tuple(4.0 + 0.25 * i for i in range(17))


@dataclass(frozen=True)
class DfaConfig:
    """Scale schedule S = round(2**i) for the configured exponents.

    Only first-order (linear) detrending is supported.
    """

    scale_exponents: tuple[float, ...] = DEFAULT_SCALE_EXPONENTS
    detrend_order: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "scale_exponents", tuple(float(i) for i in self.scale_exponents))
        if self.detrend_order != 1:
            raise InvalidParameterError("only linear detrending (order 1) is supported")
        if not self.scale_exponents:
            raise InvalidParameterError("at least one scale exponent is required")
        if min(self.scales) < 4:
            raise InvalidParameterError("every DFA scale must be at least 4 samples")

    @property
    def scales(self) -> tuple[int, ...]:
        """Rounded, deduplicated and ascending segment lengths."""
        rounded = {int(np.floor(2.0**i + 0.5)) for i in self.scale_exponents}
        return tuple(sorted(rounded))

    @classmethod
    def from_range(cls, start: float, stop: float, step: float) -> "DfaConfig":
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return cls(scale_exponents=tuple(start + step * i for i in range(count)))


@dataclass(frozen=True)
class DfaFit:
    """Fluctuation function and its log2-log2 regression line."""

    scales: np.ndarray
    fluctuations: np.ndarray
    alpha: float
    intercept: float
    r_squared: float
    n_samples: int = 0
    splices: int = 0
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "scales", frozen_array(self.scales, dtype=np.int64))
        object.__setattr__(self, "fluctuations", frozen_array(self.fluctuations))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "log2_S": np.log2(self.scales),
                "log2_F": np.log2(self.fluctuations),
            }
        )
