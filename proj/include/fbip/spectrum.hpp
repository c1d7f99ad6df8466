#pragma once

#include <complex>
#include <string>
#include <vector>

namespace fbip {

// One-sided magnitude spectrum on a uniform frequency grid [0, fs/2].
struct Spectrum {
    std::vector<double> freqs;      // Hz
    std::vector<double> magnitude;  // amplitude units (window-gain compensated)
    double sample_rate = 0.0;       // Hz
    std::string window_name;
    double window_sum = 0.0;        // sum of window samples (normalization record)
    double window_sq_sum = 0.0;     // sum of squared window samples
};

struct SpectralPeak {
    double freq = 0.0;       // Hz, parabolic-refined
    double magnitude = 0.0;
};

// In-place DFT of arbitrary length: radix-2 when the size is a power of two,
// Bluestein otherwise.
void fft(std::vector<std::complex<double>>& data, bool inverse = false);

// Mean-removed, windowed (Hann by default; "rect" disables), one-sided
// magnitude spectrum. Requires at least 16 samples.
Spectrum fft_spectrum(const std::vector<double>& samples, double sample_rate,
                      const std::string& window = "hann");

// Local maxima above min_prominence * max(magnitude), refined by three-point
// parabolic interpolation, sorted by frequency.
std::vector<SpectralPeak> detect_peaks(const Spectrum& s, double min_prominence);

}  // namespace fbip
