#include "distwave/wavelet_basis.hpp"

#include <Eigen/Dense>

#include <array>
#include <cctype>

namespace distwave {

namespace {

constexpr int kMaxVanishingMoments = 10;
constexpr int kHaarMaxLevel = 30;

// Minimum-phase Daubechies lowpass filters, sum h_k = sqrt(2). Index N - 1.
const std::array<std::vector<double>, kMaxVanishingMoments> kLowpass = {{
    // N = 1
    {0.7071067811865475244, 0.7071067811865475244},
    // N = 2
    {0.48296291314453414337, 0.83651630373780790558, 0.22414386804201338103, -0.12940952255126038117},
    // N = 3
    {0.332670552950082616, 0.80689150931109257649, 0.4598775021184915701, -0.1350110200102545887, -0.085441273882026661693, 0.035226291885709536603},
    // N = 4
    {0.23037781330889650086, 0.71484657055291564709, 0.63088076792985890788, -0.027983769416859854211, -0.18703481171909308408, 0.030841381835560763627, 0.032883011666885199735, -0.010597401785069032105},
    // N = 5
    {0.16010239797419291448, 0.60382926979718967054, 0.72430852843777292773, 0.13842814590132073151, -0.24229488706638203186, -0.032244869584638374648, 0.077571493840045713523, -0.0062414902127982742742, -0.012580751999081999469, 0.003335725285473771278},
    // N = 6
    {0.11154074335010946362, 0.49462389039845308568, 0.75113390802109535068, 0.31525035170919762909, -0.22626469396543982008, -0.12976686756726193556, 0.097501605587323049102, 0.027522865530305728626, -0.031582039317486029565, 0.00055384220116149613925, 0.0047772575109455106396, -0.0010773010853084795649},
    // N = 7
    {0.07785205408500917902, 0.39653931948191730654, 0.72913209084623511992, 0.46978228740519312247, -0.14390600392856497541, -0.22403618499387498264, 0.071309219266830264751, 0.080612609151083071913, -0.03802993693501441358, -0.016574541630666880654, 0.012550998556099840613, 0.00042957797292136652113, -0.0018016407040474909153, 0.00035371379997452024845},
    // N = 8
    {0.054415842243104009955, 0.31287159091429997066, 0.67563073629728980681, 0.58535468365420671277, -0.015829105256349305667, -0.28401554296154692652, 0.00047248457391328277036, 0.12874742662047845886, -0.01736930100180754617, -0.044088253930794751507, 0.013981027917398281649, 0.0087460940474057767164, -0.0048703529934515743104, -0.0003917403733769470463, 0.00067544940645056936637, -0.00011747678412476953373},
    // N = 9
    {0.038077947363878346589, 0.24383467461259035373, 0.6048231236901111119, 0.65728807805130053808, 0.13319738582500757619, -0.29327378327917490881, -0.096840783222976460514, 0.14854074933810638014, 0.030725681479333379212, -0.067632829061329973676, 0.00025094711483145195759, 0.022361662123679097205, -0.0047232047577513972779, -0.0042815036824634298345, 0.0018476468830562264766, 0.00023038576352319596721, -0.00025196318894271013697, 0.000039347320316271599481},
    // N = 10
    {0.026670057900555553587, 0.18817680007769148902, 0.52720118893172558648, 0.68845903945360356574, 0.28117234366057746075, -0.24984642432731537942, -0.1959462743773770435, 0.12736934033579326008, 0.09305736460357235116, -0.071394147166397087145, -0.029457536821875812858, 0.03321267405934100174, 0.0036065535669561696554, -0.010733175483330575044, 0.0013953517470529011658, 0.0019924052951850561172, -0.00068585669495971162656, -0.00011646685512928545095, 0.000093588670320069591334, -0.000013264202894521244812},
}};

// Scaling function at the integers 0..W from the eigenvector of the
// two-scale relation, normalised to unit sum.
std::vector<double> scaling_at_integers(const std::vector<double>& h) {
  const int width = static_cast<int>(h.size()) - 1;  // support [0, W]
  const int interior = width - 1;                   // phi(1..W-1)
  std::vector<double> phi(static_cast<std::size_t>(width) + 1, 0.0);
  if (interior <= 0) return phi;

  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(interior, interior);
  for (int i = 1; i <= interior; ++i) {
    for (int l = 1; l <= interior; ++l) {
      const int tap = 2 * i - l;
      if (tap >= 0 && tap <= width) system(i - 1, l - 1) = std::sqrt(2.0) * h[tap];
    }
    system(i - 1, i - 1) -= 1.0;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(interior);
  system.row(interior - 1).setOnes();
  rhs(interior - 1) = 1.0;
  const Eigen::VectorXd values = system.fullPivLu().solve(rhs);
  for (int i = 1; i <= interior; ++i) phi[static_cast<std::size_t>(i)] = values(i - 1);
  return phi;
}

// Mother wavelet on the grid x = i / 2^R, i = 0..W * 2^R.
std::vector<double> cascade_mother(int vanishing_moments, int depth) {
  const std::vector<double>& h = kLowpass[static_cast<std::size_t>(vanishing_moments - 1)];
  const int taps = static_cast<int>(h.size());
  const int width = taps - 1;
  const std::int64_t unit = std::int64_t{1} << depth;
  const std::int64_t last = width * unit;

  std::vector<double> phi(static_cast<std::size_t>(last) + 1, 0.0);
  const std::vector<double> integers = scaling_at_integers(h);
  for (int i = 0; i <= width; ++i) phi[static_cast<std::size_t>(i * unit)] = integers[i];

  auto phi_at = [&](std::int64_t idx) {
    return (idx < 0 || idx > last) ? 0.0 : phi[static_cast<std::size_t>(idx)];
  };

  for (int r = 1; r <= depth; ++r) {
    const std::int64_t step = std::int64_t{1} << (depth - r);
    for (std::int64_t idx = step; idx <= last; idx += 2 * step) {
      double acc = 0.0;
      for (int k = 0; k < taps; ++k) acc += h[k] * phi_at(2 * idx - k * unit);
      phi[static_cast<std::size_t>(idx)] = std::sqrt(2.0) * acc;
    }
  }

  std::vector<double> psi(static_cast<std::size_t>(last) + 1, 0.0);
  for (std::int64_t idx = 0; idx <= last; ++idx) {
    double acc = 0.0;
    for (int k = 0; k < taps; ++k) {
      const double g = ((k % 2 == 0) ? 1.0 : -1.0) * h[static_cast<std::size_t>(width - k)];
      acc += g * phi_at(2 * idx - k * unit);
    }
    psi[static_cast<std::size_t>(idx)] = std::sqrt(2.0) * acc;
  }
  return psi;
}

}  // namespace

WaveletBasis::WaveletBasis(Family family, int vanishing_moments, int refinement_depth,
                           std::shared_ptr<const std::vector<double>> table)
    : family_(family),
      vanishing_moments_(vanishing_moments),
      refinement_depth_(refinement_depth),
      max_level_(family == Family::Haar ? kHaarMaxLevel : refinement_depth - 2),
      table_scale_(std::ldexp(1.0, refinement_depth)),
      table_(std::move(table)) {}

WaveletBasis WaveletBasis::haar() {
  return WaveletBasis(Family::Haar, 1, 0, nullptr);
}

WaveletBasis WaveletBasis::daubechies(int vanishing_moments, int refinement_depth) {
  if (vanishing_moments < 2 || vanishing_moments > kMaxVanishingMoments) {
    fail(ErrorCode::InvalidArgument,
         "Daubechies vanishing moments must be in [2, 10], got " + std::to_string(vanishing_moments));
  }
  if (refinement_depth < 4 || refinement_depth > 24) {
    fail(ErrorCode::InvalidArgument,
         "refinement depth must be in [4, 24], got " + std::to_string(refinement_depth));
  }
  auto table = std::make_shared<const std::vector<double>>(
      cascade_mother(vanishing_moments, refinement_depth));
  return WaveletBasis(Family::Daubechies, vanishing_moments, refinement_depth, std::move(table));
}

WaveletBasis WaveletBasis::from_name(const std::string& name, int refinement_depth) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "haar") return haar();
  const std::string prefix = "daubechies";
  if (lower.rfind(prefix, 0) == 0 && lower.size() > prefix.size()) {
    const std::string digits = lower.substr(prefix.size());
    if (digits.find_first_not_of("0123456789") == std::string::npos) {
      return daubechies(std::stoi(digits), refinement_depth);
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown wavelet family '" + name + "'");
}

std::string WaveletBasis::name() const {
  if (family_ == Family::Haar) return "haar";
  return "daubechies" + std::to_string(vanishing_moments_);
}

void WaveletBasis::check_level(int level) const {
  if (level < 0 || level > max_level_) {
    fail(ErrorCode::LevelTooDeep, "level " + std::to_string(level) + " exceeds max level " +
                                      std::to_string(max_level_) + " of " + name() +
                                      " basis (refinement depth " +
                                      std::to_string(refinement_depth_) + ")");
  }
}

double WaveletBasis::mother(double x) const noexcept {
  if (family_ == Family::Haar) {
    if (x < 0.0 || x >= 1.0) return 0.0;
    return x < 0.5 ? 1.0 : -1.0;
  }
  const double width = static_cast<double>(support_width());
  if (!(x > 0.0) || !(x < width)) return 0.0;
  const double pos = x * table_scale_;
  const auto idx = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(idx);
  const std::vector<double>& table = *table_;
  if (idx + 1 >= table.size()) return table.back();
  return table[idx] + frac * (table[idx + 1] - table[idx]);
}

double WaveletBasis::periodized(double x, double period) const noexcept {
  double reduced = x - period * std::floor(x / period);
  const double width = static_cast<double>(support_width());
  double total = 0.0;
  for (; reduced < width; reduced += period) total += mother(reduced);
  return total;
}

double WaveletBasis::psi(int level, std::int64_t shift, double t) const {
  check_level(level);
  const std::int64_t period = std::int64_t{1} << level;
  if (shift < 0 || shift >= period) {
    fail(ErrorCode::InvalidArgument, "shift " + std::to_string(shift) + " outside [0, 2^" +
                                         std::to_string(level) + ")");
  }
  const double scale = std::exp2(0.5 * level);
  const double x = std::ldexp(t, level) - static_cast<double>(shift);
  if (family_ == Family::Haar) return scale * mother(x);
  return scale * periodized(x, static_cast<double>(period));
}

double WaveletBasis::evaluate(const CoeffField& field, double t) const {
  double total = 0.0;
  for (int j = 0; j <= field.max_level(); ++j) {
    const std::span<const double> coeffs = field.level(j);
    for_each_nonzero(j, t, [&](std::int64_t k, double value) {
      total += coeffs[static_cast<std::size_t>(k)] * value;
    });
  }
  return total;
}

std::vector<double> WaveletBasis::synthesize(const CoeffField& field,
                                             std::size_t grid_size) const {
  const std::size_t minimum = std::size_t{1} << (field.max_level() + 1);
  if (grid_size < minimum || (grid_size & (grid_size - 1)) != 0) {
    fail(ErrorCode::InvalidArgument, "grid size must be a power of two >= 2^(J+1) = " +
                                         std::to_string(minimum));
  }
  std::vector<double> out(grid_size);
  const double inv = 1.0 / static_cast<double>(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    out[i] = evaluate(field, (static_cast<double>(i) + 0.5) * inv);
  }
  return out;
}

}  // namespace distwave
