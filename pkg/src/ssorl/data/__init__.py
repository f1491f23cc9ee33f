from ssorl.data.splits import (
    SplitDataset,
    coupled_split,
    decoupled_split,
    merge_with_proxy,
    nearest_rank_threshold,
    resample_balanced,
    tercile_groups,
)
from ssorl.data.windows import TransitionWindow, extract_windows, window_length, windows_to_arrays

__all__ = [
    "SplitDataset",
    "coupled_split",
    "decoupled_split",
    "tercile_groups",
    "resample_balanced",
    "merge_with_proxy",
    "nearest_rank_threshold",
    "TransitionWindow",
    "extract_windows",
    "window_length",
    "windows_to_arrays",
]
