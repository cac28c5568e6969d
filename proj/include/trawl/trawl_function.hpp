#pragma once

#include <span>
#include <string>
#include <vector>

namespace trawl {

enum class TrawlKind { Exponential, SupExponential, InvGaussian, Gamma };

std::string trawl_name(TrawlKind k);
TrawlKind trawl_from_name(const std::string& name);

// Parameters:
//   Exponential(lambda)
//   SupExponential(weights w_j, rates lambda_j); only the rates are free
//   InvGaussian(mu, lambda)
//   Gamma(H, delta)
class TrawlFunction {
 public:
  static TrawlFunction exponential(double lambda);
  static TrawlFunction sup_exponential(std::vector<double> weights, std::vector<double> rates);
  static TrawlFunction inv_gaussian(double mu, double lambda);
  static TrawlFunction gamma(double H, double delta);

  TrawlKind kind() const { return kind_; }
  // Number of free parameters.
  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_[i]; }
  const std::vector<double>& params() const { return p_; }
  const std::vector<double>& weights() const { return w_; }
  std::vector<std::string> param_names() const;
  TrawlFunction with_params(std::span<const double> p) const;

 private:
  TrawlFunction(TrawlKind k, std::vector<double> p, std::vector<double> w);
  TrawlKind kind_;
  std::vector<double> p_;
  std::vector<double> w_;
};

// phi(t) for t <= 0.
double phi(const TrawlFunction& tf, double t);
// Leb(A) = integral of phi over (-inf, 0].
double total_area(const TrawlFunction& tf);
std::vector<double> area_gradient(const TrawlFunction& tf);
// rho(h) = Leb(A and A_h) / Leb(A).
double acf(const TrawlFunction& tf, double h);
std::vector<double> acf_gradient(const TrawlFunction& tf, double h);

struct SliceTriple {
  double common = 0.0;  // Leb(A_s and A_t)
  double left = 0.0;    // Leb(A_s minus A_t)
  double right = 0.0;   // Leb(A_t minus A_s)
  double lag = 0.0;
};

SliceTriple pair_slices(const TrawlFunction& tf, double h);

// Gradients of the common and left areas in the trawl parameters.
struct SliceGradient {
  std::vector<double> common;
  std::vector<double> left;
};
SliceGradient pair_slices_gradient(const TrawlFunction& tf, double h);

// Areas of the pieces Q_{b,d}, 1 <= b <= d <= n, of the slice partition of
// A_tau, ..., A_{n tau}. A piece is born with set b and dies after set d.
class SliceTable {
 public:
  SliceTable(int n, std::vector<double> areas) : n_(n), a_(std::move(areas)) {}
  int n() const { return n_; }
  double area(int b, int d) const { return a_[index(b, d)]; }
  std::size_t index(int b, int d) const {
    return static_cast<std::size_t>(b - 1) * (2 * n_ - b + 2) / 2 + static_cast<std::size_t>(d - b);
  }
  const std::vector<double>& areas() const { return a_; }

 private:
  int n_;
  std::vector<double> a_;
};

SliceTable grid_slice_areas(const TrawlFunction& tf, int n, double tau);

}  // namespace trawl
