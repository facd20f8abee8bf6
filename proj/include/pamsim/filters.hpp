#ifndef PAMSIM_FILTERS_HPP
#define PAMSIM_FILTERS_HPP

#include <complex>
#include <vector>

namespace pamsim {

// Symmetric FIR taps for a Gaussian-magnitude low-pass:
// |H(f)| = exp(−ln2/2 · (f/f3db)²), so the −3 dB point sits at f3db.
// The impulse response of a Gaussian is itself a Gaussian, sampled here at
// rate fs and truncated where it falls below ~1e−12; taps sum to 1 (unity DC).
// An infinite f3db yields the identity (single unit tap).
std::vector<double> gaussian_lowpass_taps(double f3db, double fs);

// Hamming-windowed-sinc low-pass of the given order (order+1 taps, linear
// phase), cutoff fc at sample rate fs; taps normalized to unity DC gain.
std::vector<double> windowed_sinc_taps(int order, double fc, double fs);

// Convolution with group delay compensated: output[i] lines up with input[i].
// Edges are zero-padded. Taps must have odd length (symmetric design).
std::vector<double> fir_filter_same(const std::vector<double>& x,
                                    const std::vector<double>& taps);

// Complex frequency response H(f) = Σ h[k]·e^{−j2πfk/fs} of a tap set.
std::complex<double> fir_response(const std::vector<double>& taps, double f, double fs);

} // namespace pamsim

#endif
