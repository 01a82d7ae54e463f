#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rafs/dataset.hpp"

namespace rafs {

enum class GeneratorId {
  HeEtAl1D,
  Forrester1D,
  SchafferN4_2D,
  DoublePendulum2D,
  Rastrigin3D,
  Ishigami3D,
  Environmental4D,
  Griewank4D,
  RoosArnold5D,
  Friedman5D,
  PlanarArm6D,
  SumOfPowers6D,
  Ackley7D,
  Piston7D,
  RobotArm8D,
  Borehole8D,
  StyblinskiTang9D,
  PUMA560_9D,
  AdaptedWelch10D,
  WingWeight10D,
};

// Physical models, many local minima, trigonometric, others.
enum class Category { PM, MLM, T, O };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

using Box = std::vector<Interval>;

bool box_contains(const Box& box, std::span<const double> x);
bool box_contains(const Box& outer, const Box& inner);

struct GeneratorInfo {
  GeneratorId id;
  std::string_view name;
  std::size_t dim;
  Category category;
  // Training inputs are split equally between these boxes (two clusters for
  // the 1-D sets, one box otherwise).
  std::vector<Box> train_regions;
  Box test_box;
  double noise_sigma;
  std::size_t n_train;
  std::size_t n_test;
  std::vector<std::string> feature_names;
};

const std::vector<GeneratorId>& all_generators();
const GeneratorInfo& generator_info(GeneratorId id);
std::optional<GeneratorId> parse_generator(std::string_view name);
std::string_view to_string(Category c);

// Noise-free function value. Throws ShapeError on a dimension mismatch.
double generator_eval(GeneratorId id, std::span<const double> x);

// Uniform inputs over the train regions / test box, targets with additive
// N(0, sigma_a^2) noise on both splits.
std::pair<Dataset, Dataset> sample_dataset(GeneratorId id, std::uint64_t seed);

}  // namespace rafs
