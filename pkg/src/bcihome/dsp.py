"""Signal-processing primitives used by the SSVEP and blink detectors.

Everything here is a pure function of its arguments. The per-sample loops
live in :mod:`bcihome.kernels`, which picks the compiled or fallback backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .errors import InvalidInputError, ParseError

DEFAULT_FS = 512
# Bins must be at most this wide so a +/-0.05 Hz band holds at least two of them.
MAX_BIN_WIDTH_HZ = 0.05


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SignalWindow:
    """A single-channel segment sampled at a fixed rate."""

    samples: np.ndarray
    sample_rate: int = DEFAULT_FS
    channel: str = ""
    start_time: float = 0.0

    def __post_init__(self):
        samples = _frozen_array(self.samples)
        if samples.ndim != 1 or samples.size == 0:
            raise InvalidInputError("signal window must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(samples)):
            raise InvalidInputError("signal window contains non-finite samples")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise InvalidInputError(f"sample_rate must be a positive integer, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return self.n / self.sample_rate

    @property
    def end_time(self) -> float:
        return self.start_time + self.duration

    def scaled(self, alpha: float) -> SignalWindow:
        return SignalWindow(self.samples * alpha, self.sample_rate, self.channel, self.start_time)

    def segment(self, start_s: float, end_s: float) -> SignalWindow:
        """Sub-window covering ``[start_s, end_s)`` in session time."""
        i0 = int(round((start_s - self.start_time) * self.sample_rate))
        i1 = int(round((end_s - self.start_time) * self.sample_rate))
        if i0 < 0 or i1 > self.n or i1 <= i0:
            raise InvalidInputError(
                f"segment [{start_s}, {end_s}) s outside window "
                f"[{self.start_time}, {self.end_time}) s"
            )
        return SignalWindow(
            self.samples[i0:i1],
            self.sample_rate,
            self.channel,
            self.start_time + i0 / self.sample_rate,
        )

    def tail(self, seconds: float, end_s: float | None = None) -> SignalWindow:
        end = self.end_time if end_s is None else end_s
        return self.segment(end - seconds, end)


@dataclass(frozen=True, eq=False)
class PowerSpectrum:
    bin_width: float
    magnitudes: np.ndarray
    source_length: int

    def __post_init__(self):
        object.__setattr__(self, "magnitudes", _frozen_array(self.magnitudes))

    @property
    def fft_length(self) -> int:
        return self.magnitudes.shape[0]

    @property
    def nyquist(self) -> float:
        return self.bin_width * self.fft_length / 2

    @property
    def frequencies(self) -> np.ndarray:
        return np.arange(self.fft_length) * self.bin_width


@dataclass(frozen=True)
class FilterSpec:
    order: int
    low_cut: float
    high_cut: float
    sample_rate: float
    b: tuple[float, ...] = field(repr=False)
    a: tuple[float, ...] = field(repr=False)

    @property
    def poles(self) -> np.ndarray:
        return np.roots(self.a)

    def response(self, freqs) -> np.ndarray:
        """Complex frequency response evaluated on the unit circle."""
        z = np.exp(1j * 2 * np.pi * np.asarray(freqs, dtype=np.float64) / self.sample_rate)
        # b and a are in descending powers of z**-1
        num = np.polyval(self.b[::-1], 1 / z)
        den = np.polyval(self.a[::-1], 1 / z)
        return num / den


@dataclass(frozen=True)
class Peak:
    start_index: int
    end_index: int
    width_ms: float
    apex_value: float


def autocorrelate(w: SignalWindow) -> SignalWindow:
    """One-sided biased autocorrelation ``r[l] = sum(x[t] x[t+l]) / L``."""
    r = kernels.autocorr_biased(np.ascontiguousarray(w.samples))
    return SignalWindow(r, w.sample_rate, w.channel + "+acf", w.start_time)


def fft_length_for(n: int, sample_rate: float) -> int:
    """Smallest power of two that covers ``n`` samples with bins <= 0.05 Hz."""
    need = max(n, math.ceil(sample_rate / MAX_BIN_WIDTH_HZ))
    return 1 << (need - 1).bit_length()


def power_spectrum(w: SignalWindow, fft_length: int | None = None) -> PowerSpectrum:
    if fft_length is None:
        fft_length = fft_length_for(w.n, w.sample_rate)
    if fft_length < w.n:
        raise InvalidInputError(f"fft_length {fft_length} shorter than window length {w.n}")
    if fft_length <= 0 or fft_length & (fft_length - 1):
        raise InvalidInputError(f"fft_length must be a power of two, got {fft_length}")
    mags = np.abs(np.fft.fft(w.samples, n=fft_length))
    return PowerSpectrum(w.sample_rate / fft_length, mags, w.n)


def band_bins(p: PowerSpectrum, center: float, half_width: float) -> slice:
    if half_width < 0:
        raise InvalidInputError("half_width must be non-negative")
    if center + half_width >= p.nyquist:
        raise InvalidInputError(
            f"band {center}+/-{half_width} Hz reaches Nyquist ({p.nyquist} Hz)"
        )
    # relative slack so that endpoints landing on a bin survive rounding
    eps = 1e-9
    lo = max(0, math.ceil((center - half_width) / p.bin_width - eps))
    hi = math.floor((center + half_width) / p.bin_width + eps)
    return slice(lo, hi + 1)


def band_power(p: PowerSpectrum, center: float, half_width: float) -> float:
    """Sum of magnitudes of bins inside ``[center - half_width, center + half_width]``."""
    return float(p.magnitudes[band_bins(p, center, half_width)].sum())


def design_bandpass(order: int = 4, low: float = 1.0, high: float = 10.0,
                    fs: float = DEFAULT_FS) -> FilterSpec:
    """Butterworth band-pass of total order ``order`` via the bilinear transform.

    The low-pass prototype has ``order // 2`` poles; each maps to a pole pair
    of the band-pass, so the result has ``order`` poles. Both corners are
    pre-warped so the digital response is exactly -3 dB there.
    """
    if order <= 0 or order % 2:
        raise InvalidInputError(f"band-pass order must be a positive even integer, got {order}")
    if not (0 < low < high < fs / 2):
        raise InvalidInputError(
            f"corner frequencies must satisfy 0 < low < high < fs/2, got {low}, {high}, fs={fs}"
        )
    n_proto = order // 2
    k = np.arange(1, n_proto + 1)
    proto = np.exp(1j * np.pi * (2 * k + n_proto - 1) / (2 * n_proto))

    fs2 = 2.0 * fs
    w_lo = fs2 * math.tan(math.pi * low / fs)
    w_hi = fs2 * math.tan(math.pi * high / fs)
    bw = w_hi - w_lo
    w0 = math.sqrt(w_lo * w_hi)

    # s^2 - p*bw*s + w0^2 = 0 for each prototype pole p
    pb = proto * bw / 2
    disc = np.sqrt(pb**2 - w0**2)
    analog_poles = np.concatenate([pb + disc, pb - disc])
    analog_gain = bw**n_proto

    digital_poles = (fs2 + analog_poles) / (fs2 - analog_poles)
    # n_proto zeros at s=0 map to z=1, the ones at infinity to z=-1
    digital_zeros = np.concatenate([np.ones(n_proto), -np.ones(n_proto)])
    gain = analog_gain * np.real(fs2**n_proto / np.prod(fs2 - analog_poles))

    b = gain * np.real(np.poly(digital_zeros))
    a = np.real(np.poly(digital_poles))
    if np.any(np.abs(digital_poles) >= 1.0):
        raise InvalidInputError("designed filter is unstable")
    return FilterSpec(order, float(low), float(high), float(fs), tuple(b), tuple(a))


def apply_filter(spec: FilterSpec, w: SignalWindow) -> SignalWindow:
    """Causal single pass from zero initial state."""
    if spec.sample_rate != w.sample_rate:
        raise InvalidInputError(
            f"filter designed for {spec.sample_rate} Hz applied to {w.sample_rate} Hz window"
        )
    a = np.asarray(spec.a, dtype=np.float64)
    b = np.asarray(spec.b, dtype=np.float64) / a[0]
    a = a / a[0]
    y = kernels.lfilter(b, a, np.ascontiguousarray(w.samples))
    return SignalWindow(y, w.sample_rate, w.channel, w.start_time)


def impulse_response(spec: FilterSpec, n: int) -> np.ndarray:
    x = np.zeros(n)
    x[0] = 1.0
    return apply_filter(spec, SignalWindow(x, int(spec.sample_rate))).samples


def extract_peaks(w: SignalWindow, threshold: float) -> list[Peak]:
    """One peak per maximal run of samples strictly above ``threshold``."""
    if not math.isfinite(threshold):
        raise InvalidInputError("threshold must be finite")
    x = np.ascontiguousarray(w.samples)
    starts, ends = kernels.above_runs(x, float(threshold))
    return [
        Peak(int(s), int(e), (e - s + 1) / w.sample_rate * 1000.0, float(x[s:e + 1].max()))
        for s, e in zip(starts, ends)
    ]


def write_signal(path, w: SignalWindow) -> None:
    lines = [f"# fs={w.sample_rate} channel={w.channel}"]
    lines.extend(repr(float(v)) for v in w.samples)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_signal(path, start_time: float = 0.0) -> SignalWindow:
    try:
        return _parse_signal(Path(path).read_text(encoding="utf-8"), start_time)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc.message}", exc.offset, exc.line) from None


def _parse_signal(text: str, start_time: float) -> SignalWindow:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ParseError("missing '# fs=<int> channel=<label>' header", 0)
    header = dict(tok.split("=", 1) for tok in lines[0][2:].split() if "=" in tok)
    try:
        fs = int(header["fs"])
    except (KeyError, ValueError):
        raise ParseError("header lacks an integer fs=", 2, lines[0]) from None
    channel = header.get("channel", "")
    values = []
    offset = len(lines[0].encode()) + 1
    for line in lines[1:]:
        stripped = line.strip()
        if stripped:
            try:
                values.append(float(stripped))
            except ValueError:
                raise ParseError(f"not a decimal amplitude: {stripped!r}", offset, line) from None
        offset += len(line.encode()) + 1
    if not values:
        raise ParseError("signal file has no samples", offset)
    return SignalWindow(values, fs, channel, start_time)
