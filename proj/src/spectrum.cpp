#include "fbip/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fbip/errors.hpp"

namespace fbip {

namespace {

bool is_power_of_two(std::size_t n) { return n && (n & (n - 1)) == 0; }

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1 : -1);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

// Bluestein's chirp-z reduction of an arbitrary-length DFT to a power-of-two
// circular convolution.
void fft_bluestein(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    std::size_t m = 1;
    while (m < 2 * n + 1) m <<= 1;

    std::vector<std::complex<double>> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the phase argument small.
        const std::size_t k2 = (k * k) % (2 * n);
        const double ang = std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n) *
                           (inverse ? 1 : -1);
        chirp[k] = std::complex<double>(std::cos(ang), std::sin(ang));
    }

    std::vector<std::complex<double>> x(m, {0.0, 0.0}), y(m, {0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * chirp[k];
    for (std::size_t k = 0; k < n; ++k) {
        y[k] = std::conj(chirp[k]);
        if (k) y[m - k] = std::conj(chirp[k]);
    }
    fft_radix2(x, false);
    fft_radix2(y, false);
    for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
    fft_radix2(x, true);
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    if (inverse)
        for (auto& v : a) v /= static_cast<double>(n);
}

}  // namespace

void fft(std::vector<std::complex<double>>& data, bool inverse) {
    if (data.empty()) return;
    if (is_power_of_two(data.size()))
        fft_radix2(data, inverse);
    else
        fft_bluestein(data, inverse);
}

Spectrum fft_spectrum(const std::vector<double>& samples, double sample_rate,
                      const std::string& window) {
    if (samples.size() < 16)
        throw ValidationError("fft_spectrum: need at least 16 samples, got " +
                              std::to_string(samples.size()));
    if (!(sample_rate > 0)) throw ValidationError("fft_spectrum: sample_rate must be positive");

    const std::size_t n = samples.size();
    const double mean = [&] {
        double acc = 0.0;
        for (double v : samples) acc += v;
        return acc / static_cast<double>(n);
    }();

    Spectrum out;
    out.sample_rate = sample_rate;
    out.window_name = window;

    std::vector<std::complex<double>> buf(n);
    for (std::size_t i = 0; i < n; ++i) {
        double w = 1.0;
        if (window == "hann") {
            w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(n - 1));
        } else if (window != "rect") {
            throw ValidationError("fft_spectrum: unknown window '" + window + "'");
        }
        out.window_sum += w;
        out.window_sq_sum += w * w;
        buf[i] = {(samples[i] - mean) * w, 0.0};
    }
    fft(buf, false);

    const std::size_t half = n / 2;
    out.freqs.resize(half + 1);
    out.magnitude.resize(half + 1);
    for (std::size_t k = 0; k <= half; ++k) {
        out.freqs[k] = sample_rate * static_cast<double>(k) / static_cast<double>(n);
        // Amplitude normalization: a full-scale sine lands at its amplitude.
        const double scale = (k == 0 || (n % 2 == 0 && k == half)) ? 1.0 : 2.0;
        out.magnitude[k] = scale * std::abs(buf[k]) / out.window_sum;
    }
    return out;
}

std::vector<SpectralPeak> detect_peaks(const Spectrum& s, double min_prominence) {
    if (s.magnitude.empty()) throw ValidationError("detect_peaks: empty spectrum");
    if (!(min_prominence >= 0.0)) throw ValidationError("detect_peaks: bad min_prominence");

    const double peak_floor =
        min_prominence * *std::max_element(s.magnitude.begin(), s.magnitude.end());
    std::vector<SpectralPeak> peaks;
    const std::size_t n = s.magnitude.size();
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double m = s.magnitude[k];
        if (m < peak_floor || m <= 0.0) continue;
        if (!(m >= s.magnitude[k - 1] && m > s.magnitude[k + 1])) continue;
        // Three-point parabolic refinement in bin units.
        const double ym = s.magnitude[k - 1], y0 = m, yp = s.magnitude[k + 1];
        const double denom = ym - 2.0 * y0 + yp;
        double delta = 0.0;
        if (denom != 0.0) delta = 0.5 * (ym - yp) / denom;
        delta = std::clamp(delta, -0.5, 0.5);
        const double bin_width = s.freqs[1] - s.freqs[0];
        SpectralPeak peak;
        peak.freq = s.freqs[k] + delta * bin_width;
        peak.magnitude = y0 - 0.25 * (ym - yp) * delta;
        peaks.push_back(peak);
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const SpectralPeak& a, const SpectralPeak& b) { return a.freq < b.freq; });
    return peaks;
}

}  // namespace fbip
