#include "eegart/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "eegart/error.hpp"

namespace eegart {

FilterCascade design_butterworth_lowpass(int order, double cutoff_hz, double sample_rate_hz) {
  if (order < 1) fail(ErrorCode::ConfigError, "filter order must be >= 1");
  if (!(sample_rate_hz > 0.0) || !(cutoff_hz > 0.0) || !(cutoff_hz < sample_rate_hz / 2.0)) {
    fail(ErrorCode::InvalidCutoff, "cutoff " + std::to_string(cutoff_hz) +
                                       " Hz must lie in (0, fs/2) for fs=" +
                                       std::to_string(sample_rate_hz));
  }
  using std::numbers::pi;
  const double two_fs = 2.0 * sample_rate_hz;
  const double warped = two_fs * std::tan(pi * cutoff_hz / sample_rate_hz);

  // Upper-half-plane analog poles; the conjugates are implied.
  std::vector<std::complex<double>> upper;
  bool has_real_pole = false;
  for (int k = 0; k < order; ++k) {
    const double theta = pi * (2.0 * k + order + 1) / (2.0 * order);
    const std::complex<double> p = warped * std::polar(1.0, theta);
    if (std::abs(p.imag()) < 1e-12 * warped) {
      has_real_pole = true;
    } else if (p.imag() > 0.0) {
      upper.push_back(p);
    }
  }

  const auto to_digital = [&](std::complex<double> s) { return (two_fs + s) / (two_fs - s); };
  std::vector<std::complex<double>> zpoles;
  for (const auto& p : upper) zpoles.push_back(to_digital(p));
  std::sort(zpoles.begin(), zpoles.end(),
            [](const auto& a, const auto& b) { return std::arg(a) < std::arg(b); });

  FilterCascade cascade;
  cascade.cutoff_hz = cutoff_hz;
  cascade.sample_rate_hz = sample_rate_hz;
  cascade.order = order;
  for (const auto& z : zpoles) {
    SecondOrderSection s;
    s.a1 = -2.0 * z.real();
    s.a2 = std::norm(z);
    // Zeros at z = -1 give numerator g (1 + 2 z^-1 + z^-2); H(1) = 1 fixes g.
    const double g = (1.0 + s.a1 + s.a2) / 4.0;
    s.b0 = g;
    s.b1 = 2.0 * g;
    s.b2 = g;
    cascade.sections.push_back(s);
  }
  if (has_real_pole) {
    const double z = to_digital({-warped, 0.0}).real();
    SecondOrderSection s;
    s.a1 = -z;
    const double g = (1.0 - z) / 2.0;
    s.b0 = g;
    s.b1 = g;
    cascade.sections.push_back(s);
  }
  return cascade;
}

std::complex<double> frequency_response(const FilterCascade& cascade, double freq_hz) {
  const double omega = 2.0 * std::numbers::pi * freq_hz / cascade.sample_rate_hz;
  const std::complex<double> z1 = std::polar(1.0, -omega);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h = 1.0;
  for (const auto& s : cascade.sections) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return h;
}

std::vector<std::complex<double>> cascade_poles(const FilterCascade& cascade) {
  std::vector<std::complex<double>> poles;
  for (const auto& s : cascade.sections) {
    if (s.a2 == 0.0) {
      poles.emplace_back(-s.a1, 0.0);
      continue;
    }
    // Roots of z^2 + a1 z + a2.
    const std::complex<double> disc = std::sqrt(std::complex<double>(s.a1 * s.a1 - 4.0 * s.a2));
    poles.push_back((-s.a1 + disc) / 2.0);
    poles.push_back((-s.a1 - disc) / 2.0);
  }
  return poles;
}

std::vector<double> filter_signal(const FilterCascade& cascade, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  for (const auto& s : cascade.sections) {
    double s1 = 0.0;
    double s2 = 0.0;
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + s1;
      s1 = s.b1 * in - s.a1 * out + s2;
      s2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

std::vector<double> decimate(std::span<const double> x, std::size_t factor) {
  if (factor == 0 || x.size() % factor != 0) {
    fail(ErrorCode::NotDivisible, std::to_string(x.size()) + " samples are not divisible by " +
                                      std::to_string(factor));
  }
  std::vector<double> out(x.size() / factor);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = x[k * factor];
  return out;
}

}  // namespace eegart
