#pragma once

#include <functional>
#include <random>
#include <string>

#include "isobranch/tensor3.hpp"

namespace isobranch {

enum class MaterialKind { NeoHookean, MooneyRivlin };

/**
 * Incompressible stored energy extended to GL+ by subtracting k (det F - 1).
 *
 * The extension term vanishes on det F = 1; k is fixed by W_F(I) = 0.
 *   neo-Hookean:    W = mu/2 (|F|^2 - 3)                      - k (det F - 1)
 *   Mooney-Rivlin:  W = c1 (|F|^2 - 3) + c2 (|Cof F|^2 - 3)   - k (det F - 1)
 */
class MaterialModel {
public:
  static MaterialModel neo_hookean(double mu);
  static MaterialModel mooney_rivlin(double c1, double c2);

  MaterialKind kind() const { return kind_; }
  std::string name() const;

  double c1() const { return c1_; }
  double c2() const { return c2_; }
  double k() const { return k_; }

  /// Throws DomainError when det F <= 0.
  double energy(const Mat3& f) const;
  Mat3 stress(const Mat3& f) const;
  Tensor4 elasticity(const Mat3& f) const;

private:
  MaterialModel(MaterialKind kind, double c1, double c2);

  MaterialKind kind_;
  // neo-Hookean is stored as c1 = mu/2, c2 = 0.
  double c1_;
  double c2_;
  double k_;
};

/// Closed-form k with W_F(I) = 0, using d(det)/dF = Cof F.
double solve_stress_free_k(MaterialKind kind, double c1, double c2);

struct ObjectivityReport {
  int trials = 0;
  double max_deviation = 0.0;
  bool passed = false;
};

using EnergyFunction = std::function<double(const Mat3&)>;

ObjectivityReport verify_objectivity(const EnergyFunction& energy, int trials, std::uint64_t seed = 1);
ObjectivityReport verify_objectivity(const MaterialModel& m, int trials, std::uint64_t seed = 1);

/// Uniform random rotation from a normalized Gaussian quaternion.
Mat3 random_rotation(std::mt19937_64& rng);

/// I + spread * N(0,1) entries, redrawn until det > 0.1.
Mat3 random_glplus(std::mt19937_64& rng, double spread = 0.3);

}  // namespace isobranch
