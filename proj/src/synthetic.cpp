#include "rafs/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>

#include "rafs/errors.hpp"
#include "rafs/puma560.hpp"
#include "rafs/rng.hpp"

namespace rafs {

namespace {

using std::numbers::pi;

Box uniform_box(std::size_t d, double lo, double hi) { return Box(d, Interval{lo, hi}); }

std::vector<std::string> numbered(std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= d; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

std::vector<GeneratorInfo> build_table() {
  using G = GeneratorId;
  using C = Category;
  std::vector<GeneratorInfo> t;
  t.push_back({G::HeEtAl1D, "HeEtAl1D", 1, C::T,
               {{{-2.0, -0.67}}, {{0.67, 2.0}}}, {{-6.0, 6.0}}, 0.1, 20, 50, {"x"}});
  t.push_back({G::Forrester1D, "Forrester1D", 1, C::T,
               {{{0.2, 0.4}}, {{0.65, 0.85}}}, {{0.0, 1.0}}, 0.1, 20, 50, {"x"}});
  t.push_back({G::SchafferN4_2D, "SchafferN4_2D", 2, C::MLM, {uniform_box(2, -2.0, 2.0)},
               uniform_box(2, -2.5, 2.5), 0.1, 1000, 2500, numbered(2)});
  t.push_back({G::DoublePendulum2D, "DoublePendulum2D", 2, C::PM,
               {uniform_box(2, -2.0 * pi / 3.0, pi / 6.0)}, uniform_box(2, -pi, pi), 0.1, 1000,
               2500, {"theta1", "theta2"}});
  t.push_back({G::Rastrigin3D, "Rastrigin3D", 3, C::MLM, {uniform_box(3, -5.12, 5.12)},
               uniform_box(3, -5.5, 5.5), 0.1, 200, 500, numbered(3)});
  t.push_back({G::Ishigami3D, "Ishigami3D", 3, C::T, {uniform_box(3, -pi / 2.0, pi / 2.0)},
               uniform_box(3, -2.0 * pi / 3.0, 2.0 * pi / 3.0), 0.1, 2000, 5000, numbered(3)});
  t.push_back({G::Environmental4D, "Environmental4D", 4, C::PM,
               {{{7.0, 13.0}, {0.02, 0.12}, {0.01, 3.0}, {30.01, 30.295}}},
               {{5.0, 15.0}, {0.0, 0.15}, {0.01, 3.2}, {23.71, 31.0}}, 0.1, 200, 500,
               {"M", "D", "L", "tau"}});
  t.push_back({G::Griewank4D, "Griewank4D", 4, C::MLM, {uniform_box(4, -500.0, 500.0)},
               uniform_box(4, -600.0, 600.0), 0.1, 200, 500, numbered(4)});
  t.push_back({G::RoosArnold5D, "RoosArnold5D", 5, C::O, {uniform_box(5, 0.0, 0.8)},
               uniform_box(5, 0.0, 1.0), 0.1, 200, 500, numbered(5)});
  t.push_back({G::Friedman5D, "Friedman5D", 5, C::T, {uniform_box(5, 0.0, 0.5)},
               uniform_box(5, 0.0, 1.0), 0.1, 200, 500, numbered(5)});
  t.push_back({G::PlanarArm6D, "PlanarArm6D", 6, C::PM,
               {{{-pi / 2, pi / 2}, {-pi / 2, pi / 2}, {-pi, pi}, {-pi, pi}, {-pi, pi}, {-pi, pi}}},
               {{-pi, pi}, {-pi, pi}, {-2 * pi, 2 * pi}, {-2 * pi, 2 * pi}, {-2 * pi, 2 * pi},
                {-2 * pi, 2 * pi}},
               0.1, 200, 500, {"q1", "q2", "qd1", "qd2", "qdd1", "qdd2"}});
  t.push_back({G::SumOfPowers6D, "SumOfPowers6D", 6, C::O, {uniform_box(6, -0.75, 0.75)},
               uniform_box(6, -1.0, 1.0), 0.1, 200, 500, numbered(6)});
  t.push_back({G::Ackley7D, "Ackley7D", 7, C::MLM, {uniform_box(7, -30.0, 30.0)},
               uniform_box(7, -32.768, 32.768), 0.1, 400, 1000, numbered(7)});
  t.push_back({G::Piston7D, "Piston7D", 7, C::PM,
               {{{30.0, 60.0}, {0.005, 0.020}, {0.002, 0.010}, {1000.0, 5000.0},
                 {90000.0, 110000.0}, {290.0, 296.0}, {340.0, 360.0}}},
               {{0.0, 90.0}, {0.005, 0.03}, {0.0, 0.015}, {10.0, 6000.0}, {80000.0, 120000.0},
                {285.0, 300.0}, {300.0, 400.0}},
               0.1, 200, 500, {"M", "S", "V0", "k", "P0", "Ta", "T0"}});
  t.push_back({G::RobotArm8D, "RobotArm8D", 8, C::PM,
               {{{0, pi}, {0, pi}, {0, pi}, {0, pi}, {0, 0.5}, {0, 0.5}, {0, 0.5}, {0, 0.5}}},
               {{0, 2 * pi}, {0, 2 * pi}, {0, 2 * pi}, {0, 2 * pi}, {0, 1}, {0, 1}, {0, 1}, {0, 1}},
               0.1, 200, 500, {"theta1", "theta2", "theta3", "theta4", "L1", "L2", "L3", "L4"}});
  t.push_back({G::Borehole8D, "Borehole8D", 8, C::PM,
               {{{0.05, 0.15}, {100.0, 50000.0}, {63070.0, 115600.0}, {63.1, 116.0},
                 {990.0, 1110.0}, {700.0, 820.0}, {1120.0, 1680.0}, {9855.0, 12045.0}}},
               {{0.01, 0.2}, {90.0, 50010.0}, {63020.0, 115650.0}, {60.0, 120.0}, {950.0, 1150.0},
                {650.0, 900.0}, {1100.0, 1700.0}, {9800.0, 12100.0}},
               0.1, 2000, 5000, {"rw", "r", "Tu", "Tl", "Hu", "Hl", "L", "Kw"}});
  t.push_back({G::StyblinskiTang9D, "StyblinskiTang9D", 9, C::O, {uniform_box(9, -5.0, 5.0)},
               uniform_box(9, -6.0, 6.0), 0.1, 400, 1000, numbered(9)});
  {
    const double beta = 1.2;
    Box box;
    for (int i = 0; i < 6; ++i) box.push_back({-beta * pi / 2.0, beta * pi / 2.0});
    for (int i = 0; i < 3; ++i) box.push_back({-beta * 0.5, beta * 0.5});
    t.push_back({G::PUMA560_9D, "PUMA560_9D", 9, C::PM, {box}, box, 0.4, 3693, 4499,
                 {"q1", "q2", "q3", "qd1", "qd2", "qd3", "tau1", "tau2", "tau3"}});
  }
  t.push_back({G::AdaptedWelch10D, "AdaptedWelch10D", 10, C::O, {uniform_box(10, -0.5, 0.5)},
               uniform_box(10, -1.0, 1.0), 0.1, 200, 500, numbered(10)});
  t.push_back({G::WingWeight10D, "WingWeight10D", 10, C::PM,
               {{{150, 200}, {220, 300}, {6, 10}, {-10, 10}, {16, 45}, {0.5, 1}, {0.08, 0.18},
                 {2.5, 6}, {1700, 2500}, {0.025, 0.08}}},
               {{100, 250}, {200, 320}, {0, 15}, {-20, 20}, {0, 60}, {0, 1.5}, {0.05, 0.25},
                {0.5, 8}, {1000, 3000}, {0, 0.1}},
               0.1, 2000, 5000,
               {"Sw", "Wfw", "A", "Lambda", "q", "lambda", "tc", "Nz", "Wdg", "Wp"}});
  return t;
}

const std::vector<GeneratorInfo>& table() {
  static const std::vector<GeneratorInfo> t = build_table();
  return t;
}

double he_et_al(std::span<const double> x) { return x[0] * std::sin(x[0]); }

double forrester(std::span<const double> x) {
  const double a = 6.0 * x[0] - 2.0;
  return a * a * std::sin(12.0 * x[0] - 4.0);
}

double schaffer_n4(std::span<const double> x) {
  const double x1 = x[0] * x[0], x2 = x[1] * x[1];
  const double c = std::cos(std::sin(std::abs(x1 - x2)));
  const double den = 1.0 + 0.001 * (x1 + x2);
  return 0.5 + (c * c - 0.5) / (den * den);
}

double double_pendulum(std::span<const double> x) {
  constexpr double L1 = 1.0, L2 = 1.0;
  return L1 * std::sin(x[0]) + L2 * std::sin(x[1]);
}

double rastrigin(std::span<const double> x) {
  double s = 10.0 * static_cast<double>(x.size());
  for (double v : x) s += v * v - 10.0 * std::cos(2.0 * pi * v);
  return s;
}

double ishigami(std::span<const double> x) {
  constexpr double a = 7.0, b = 0.1;
  const double s2 = std::sin(x[1]);
  return std::sin(x[0]) + a * s2 * s2 + b * std::pow(x[2], 4) * std::sin(x[0]);
}

// Pollutant concentration at s = 1, t = 40.1; the second spill only
// contributes once it has happened (tau < t).
double environmental(std::span<const double> x) {
  constexpr double s = 1.0, t = 40.1;
  const double M = x[0], D = x[1], L = x[2], tau = x[3];
  double c = M / std::sqrt(4.0 * pi * D * t) * std::exp(-s * s / (4.0 * D * t));
  if (tau < t) {
    const double dt = t - tau;
    c += M / std::sqrt(4.0 * pi * D * dt) * std::exp(-(s - L) * (s - L) / (4.0 * D * dt));
  }
  return std::sqrt(4.0 * pi) * c;
}

double griewank(std::span<const double> x) {
  double sum = 0.0, prod = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += x[i] * x[i] / 4000.0;
    prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
  }
  return sum - prod + 1.0;
}

double roos_arnold(std::span<const double> x) {
  double p = 1.0;
  for (double v : x) p *= std::abs(4.0 * v - 2.0);
  return p;
}

double friedman(std::span<const double> x) {
  return 10.0 * std::sin(pi * x[0] * x[1]) + 20.0 * (x[2] - 0.5) * (x[2] - 0.5) + 10.0 * x[3] +
         5.0 * x[4];
}

// First joint torque of a planar two-link arm, M(q) qdd + C(q, qd) qd.
double planar_arm(std::span<const double> x) {
  constexpr double a = 0.0625;
  const double q2 = x[1], qd1 = x[2], qd2 = x[3], qdd1 = x[4], qdd2 = x[5];
  const double m11 = 0.2083 + 0.1250 * std::cos(q2);
  const double m12 = 0.0417 + 0.0625 * std::cos(q2);
  const double c11 = -a * std::sin(q2) * qd2;
  const double c12 = a * std::sin(q2) * (qd1 + qd2);
  return m11 * qdd1 + m12 * qdd2 + c11 * qd1 + c12 * qd2;
}

// Product form as printed: prod |x_i|^(i+1), i = 1..d.
double sum_of_powers(std::span<const double> x) {
  double p = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) p *= std::pow(std::abs(x[i]), static_cast<double>(i + 2));
  return p;
}

double ackley(std::span<const double> x) {
  constexpr double a = 20.0, b = 0.2, c = 2.0 * pi;
  const double d = static_cast<double>(x.size());
  double sq = 0.0, cs = 0.0;
  for (double v : x) {
    sq += v * v;
    cs += std::cos(c * v);
  }
  return -a * std::exp(-b * std::sqrt(sq / d)) - std::exp(cs / d) + a + std::exp(1.0);
}

// Piston cycle time.
double piston(std::span<const double> x) {
  const double M = x[0], S = x[1], V0 = x[2], k = x[3], P0 = x[4], Ta = x[5], T0 = x[6];
  const double A = P0 * S + 19.62 * M - k * V0 / S;
  const double V = S / (2.0 * k) * (std::sqrt(A * A + 4.0 * k * P0 * V0 / T0 * Ta) - A);
  return 2.0 * pi * std::sqrt(M / (k + S * S * P0 * V0 / T0 * Ta / (V * V)));
}

double robot_arm(std::span<const double> x) {
  double u = 0.0, v = 0.0, angle = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    angle += x[i];
    u += x[4 + i] * std::cos(angle);
    v += x[4 + i] * std::sin(angle);
  }
  return std::sqrt(u * u + v * v);
}

double borehole(std::span<const double> x) {
  const double rw = x[0], r = x[1], Tu = x[2], Tl = x[3], Hu = x[4], Hl = x[5], L = x[6],
               Kw = x[7];
  const double lr = std::log(r / rw);
  return 2.0 * pi * Tu * (Hu - Hl) / (lr * (1.0 + 2.0 * L * Tu / (lr * rw * rw * Kw) + Tu / Tl));
}

double styblinski_tang(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v * v * v - 16.0 * v * v + 5.0 * v;
  return 0.5 * s;
}

double puma(std::span<const double> x) {
  const puma560::Vec3 q{x[0], x[1], x[2]}, qd{x[3], x[4], x[5]}, tau{x[6], x[7], x[8]};
  return puma560::forward_dynamics(q, qd, tau)[0];
}

// The first term is unbounded as x1 -> -1.001.
double adapted_welch(std::span<const double> x) {
  return 5.0 * x[9] / (1.001 + x[0]) + 5.0 * (x[3] - x[1]) * (x[3] - x[1]) + x[4] +
         40.0 * x[8] * x[8] * x[8] - 5.0 * x[0] + 0.08 * x[2] + 0.25 * x[5] * x[5] +
         0.03 * x[6] - 0.09 * x[7];
}

// Sweep angle Lambda is in degrees.
double wing_weight(std::span<const double> x) {
  const double Sw = x[0], Wfw = x[1], A = x[2], lambda_deg = x[3], q = x[4], taper = x[5],
               tc = x[6], Nz = x[7], Wdg = x[8], Wp = x[9];
  const double c = std::cos(lambda_deg * pi / 180.0);
  return 0.036 * std::pow(Sw, 0.758) * std::pow(Wfw, 0.0035) * std::pow(A / (c * c), 0.6) *
             std::pow(q, 0.006) * std::pow(taper, 0.04) * std::pow(100.0 * tc / c, -0.3) *
             std::pow(Nz * Wdg, 0.49) +
         Sw * Wp;
}

}  // namespace

bool box_contains(const Box& box, std::span<const double> x) {
  if (box.size() != x.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!box[i].contains(x[i])) return false;
  }
  return true;
}

bool box_contains(const Box& outer, const Box& inner) {
  if (outer.size() != inner.size()) return false;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    if (inner[i].lo < outer[i].lo || inner[i].hi > outer[i].hi) return false;
  }
  return true;
}

const std::vector<GeneratorId>& all_generators() {
  static const std::vector<GeneratorId> ids = [] {
    std::vector<GeneratorId> out;
    for (const auto& info : table()) out.push_back(info.id);
    return out;
  }();
  return ids;
}

const GeneratorInfo& generator_info(GeneratorId id) {
  return table()[static_cast<std::size_t>(id)];
}

std::optional<GeneratorId> parse_generator(std::string_view name) {
  auto norm = [](std::string_view s) {
    std::string out;
    for (char c : s) {
      if (c != '_' && c != '-' && c != ' ') {
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      }
    }
    return out;
  };
  const std::string key = norm(name);
  for (const auto& info : table()) {
    if (norm(info.name) == key) return info.id;
  }
  return std::nullopt;
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::PM: return "PM";
    case Category::MLM: return "MLM";
    case Category::T: return "T";
    case Category::O: return "O";
  }
  return "?";
}

double generator_eval(GeneratorId id, std::span<const double> x) {
  const GeneratorInfo& info = generator_info(id);
  if (x.size() != info.dim) {
    throw ShapeError(std::string(info.name) + ": " + shape_message("input dimension", info.dim, x.size()));
  }
  switch (id) {
    case GeneratorId::HeEtAl1D: return he_et_al(x);
    case GeneratorId::Forrester1D: return forrester(x);
    case GeneratorId::SchafferN4_2D: return schaffer_n4(x);
    case GeneratorId::DoublePendulum2D: return double_pendulum(x);
    case GeneratorId::Rastrigin3D: return rastrigin(x);
    case GeneratorId::Ishigami3D: return ishigami(x);
    case GeneratorId::Environmental4D: return environmental(x);
    case GeneratorId::Griewank4D: return griewank(x);
    case GeneratorId::RoosArnold5D: return roos_arnold(x);
    case GeneratorId::Friedman5D: return friedman(x);
    case GeneratorId::PlanarArm6D: return planar_arm(x);
    case GeneratorId::SumOfPowers6D: return sum_of_powers(x);
    case GeneratorId::Ackley7D: return ackley(x);
    case GeneratorId::Piston7D: return piston(x);
    case GeneratorId::RobotArm8D: return robot_arm(x);
    case GeneratorId::Borehole8D: return borehole(x);
    case GeneratorId::StyblinskiTang9D: return styblinski_tang(x);
    case GeneratorId::PUMA560_9D: return puma(x);
    case GeneratorId::AdaptedWelch10D: return adapted_welch(x);
    case GeneratorId::WingWeight10D: return wing_weight(x);
  }
  return 0.0;
}

namespace {

Dataset sample_split(const GeneratorInfo& info, const std::vector<Box>& regions, std::size_t n,
                     std::uint64_t seed, std::string_view split) {
  const std::uint64_t base = static_cast<std::uint64_t>(info.id);
  Rng x_rng = make_stream(seed, base, std::string(split) + "-x");
  Rng noise_rng = make_stream(seed, base, std::string(split) + "-noise");
  std::normal_distribution<double> noise(0.0, info.noise_sigma);

  Dataset data;
  data.name = std::string(info.name);
  data.split = std::string(split);
  data.source = "generator:" + std::string(info.name);
  data.feature_names = info.feature_names;
  data.noise_var = info.noise_sigma * info.noise_sigma;
  data.X = Matrix(n, info.dim);
  data.y.resize(n);

  const std::size_t per_region = n / regions.size();
  std::vector<double> x(info.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const Box& box = regions[std::min(i / per_region, regions.size() - 1)];
    for (std::size_t j = 0; j < info.dim; ++j) {
      std::uniform_real_distribution<double> u(box[j].lo, box[j].hi);
      x[j] = u(x_rng);
      data.X(i, j) = x[j];
    }
    data.y[i] = generator_eval(info.id, x) + noise(noise_rng);
  }
  return data;
}

}  // namespace

std::pair<Dataset, Dataset> sample_dataset(GeneratorId id, std::uint64_t seed) {
  const GeneratorInfo& info = generator_info(id);
  Dataset train = sample_split(info, info.train_regions, info.n_train, seed, "train");
  Dataset test = sample_split(info, {info.test_box}, info.n_test, seed, "test");
  return {std::move(train), std::move(test)};
}

}  // namespace rafs
