from .frame import CASE_B_POSITIONS, FrameConfig, IqBuffer
from .grid import Region, SsbGrid, dmrs_subcarriers, extract_dmrs, grid_assemble, region_map
from .ofdm import demodulate_ssb, modulate_ssb, ofdm_demodulate, ofdm_modulate
from .pbch import (
    EqualizationError,
    PbchPayload,
    channel_estimate,
    crc24a,
    crc_mask,
    equalize,
    pbch_recover,
)

__all__ = [
    "CASE_B_POSITIONS",
    "EqualizationError",
    "FrameConfig",
    "IqBuffer",
    "PbchPayload",
    "Region",
    "SsbGrid",
    "channel_estimate",
    "crc24a",
    "crc_mask",
    "demodulate_ssb",
    "dmrs_subcarriers",
    "equalize",
    "extract_dmrs",
    "grid_assemble",
    "modulate_ssb",
    "ofdm_demodulate",
    "ofdm_modulate",
    "pbch_recover",
    "region_map",
]
