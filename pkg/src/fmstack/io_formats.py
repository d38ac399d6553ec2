"""WAV (RIFF PCM / IEEE float) and spectrum CSV writers.

Mono only; output bytes are a pure function of the input so renders are
reproducible file-for-file.
"""

import logging
import struct
from dataclasses import dataclass

import numpy as np

from .analysis import MeasuredSpectrum
from .spectrum import LineSpectrum

log = logging.getLogger(__name__)


@dataclass
class WavSpec:
    sample_rate: int
    bit_depth: int = 32  # 16 = integer PCM, 32 = IEEE float
    channels: int = 1

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample rate must be positive")
        if self.bit_depth not in (16, 32):
            raise ValueError("bit depth must be 16 or 32")
        if self.channels != 1:
            raise ValueError("only mono files are written")


def write_wav(path, samples, spec: WavSpec) -> None:
    """Write samples (nominal [-1, 1]) as a RIFF/WAVE file.

    Values outside [-1, 1] are clipped (count goes to the log). The 16-bit
    path rounds to nearest with +1.0 stored as 32767; the float path is
    lossless.
    """
    samples = np.asarray(samples, dtype=np.float64)
    clipped = int(np.count_nonzero((samples < -1.0) | (samples > 1.0)))
    if clipped:
        log.warning("write_wav: clipped %d of %d samples to [-1, 1]", clipped, len(samples))
    samples = np.clip(samples, -1.0, 1.0)
    if spec.bit_depth == 16:
        fmt_tag = 1
        data = np.rint(samples * 32767.0).astype("<i2").tobytes()
    else:
        fmt_tag = 3
        data = samples.astype("<f4").tobytes()
    bytes_per_sample = spec.bit_depth // 8
    byte_rate = spec.sample_rate * spec.channels * bytes_per_sample
    header = b"RIFF" + struct.pack("<I", 36 + len(data)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH",
        16,
        fmt_tag,
        spec.channels,
        spec.sample_rate,
        byte_rate,
        spec.channels * bytes_per_sample,
        spec.bit_depth,
    )
    header += b"data" + struct.pack("<I", len(data))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(data)


def write_spectrum_csv(path, spec: LineSpectrum | MeasuredSpectrum) -> None:
    """Write `freq_hz,amplitude` rows with 9 significant digits.

    LineSpectrum rows carry signed amplitudes, MeasuredSpectrum rows carry
    magnitudes. Output bytes are deterministic for identical inputs.
    """
    if isinstance(spec, LineSpectrum):
        rows = zip(spec.freqs, spec.amps)
    elif isinstance(spec, MeasuredSpectrum):
        rows = zip(spec.freqs, spec.mags)
    else:
        raise TypeError(f"cannot export {type(spec).__name__} as a spectrum CSV")
    with open(path, "w", newline="\n") as fh:
        fh.write("freq_hz,amplitude\n")
        for f, a in rows:
            fh.write(f"{f:.9g},{a:.9g}\n")
