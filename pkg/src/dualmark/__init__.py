"""Dual-domain audio text watermarking.

One watermark is carried in the DWT-SVD domain and a second in the DCT-SVD
domain of the same signal. Extraction is informed (needs the key file written
at embed time) and can use a fixed threshold or thresholds tuned on a known
character embedded ahead of each payload.
"""
from .codec import (
    DomainKey,
    KeyFile,
    bits_to_text,
    embed_domain,
    embed_multilevel,
    invert_domain,
    text_to_bits,
)
from .detect import DetectionResult, Detector, Mode, ThresholdReport, aot_threshold, aotx_threshold, extract
from .errors import (
    CorruptFile,
    DegenerateFrame,
    InvalidInput,
    InvalidKey,
    LikelyDesync,
    UnsupportedFormat,
)
from .kernels import BACKEND

__version__ = "0.1.0"
