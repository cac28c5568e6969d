#pragma once

// Problem built from a kernel type K describing
//   f(z; eta) = exp(K::log_prefactor(eta)) * K::kernel(eta, z),  z ~ K::make_q(eta).
// K provides
//   static constexpr int kDim;
//   template <class T> T log_prefactor(const T* eta) const;   // T = double or Dual
//   template <class T> T kernel(const T* eta, const T& z) const;
//   Distribution make_q(const double* eta) const;
//   std::vector<double> q_jacobian(const double* eta) const;   // nq x kDim
// and optionally double log_scale_hint(const double* eta) const, an estimate of
// log kernel that is folded into log_scale() to keep values in range.

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "trawl/autodiff.hpp"
#include "trawl/error.hpp"
#include "trawl/mcgrad.hpp"

namespace trawl {

template <class K>
class KernelProblem final : public Problem {
 public:
  static constexpr int D = K::kDim;
  using G = Dual<D>;

  // scale fixes log_scale(); by default it is chosen from the prefactor.
  KernelProblem(K kernel, std::span<const double> eta, std::optional<double> scale = std::nullopt)
      : k_(std::move(kernel)), theta_(eta.begin(), eta.end()), q_(k_.make_q(theta_.data())) {
    if (static_cast<int>(eta.size()) != D) throw DomainError("KernelProblem: wrong parameter count");
    jq_ = k_.q_jacobian(theta_.data());
    for (int i = 0; i < D; ++i) eta_g_[i] = G::variable(theta_[i], i);
    const G lp = k_.template log_prefactor<G>(eta_g_.data());
    if (scale) {
      scale_ = *scale;
    } else {
      scale_ = lp.v;
      if constexpr (requires { k_.log_scale_hint(theta_.data()); }) scale_ += k_.log_scale_hint(theta_.data());
      if (!std::isfinite(scale_)) scale_ = 0.0;
    }
    pre_g_ = exp(lp - scale_);
    pre_ = pre_g_.v;
  }

  const K& kernel() const { return k_; }
  double log_scale() const override { return scale_; }
  int dim() const override { return D; }
  const std::vector<double>& theta() const override { return theta_; }
  const Distribution& q() const override { return q_; }
  const std::vector<double>& q_jacobian() const override { return jq_; }

  double f(double z) const override { return pre_ * k_.template kernel<double>(theta_.data(), z); }

  double f_dz(double z, double& dfdz) const override {
    using J1 = Jet<double, 1>;
    std::array<J1, D> e;
    for (int i = 0; i < D; ++i) e[i] = J1(theta_[i]);
    const J1 r = k_.template kernel<J1>(e.data(), J1::variable(z));
    dfdz = pre_ * r.c[1];
    return pre_ * r.c[0];
  }

  double f_grad(double z, double* grad) const override {
    const G r = k_.template kernel<G>(eta_g_.data(), G(z)) * pre_g_;
    for (int i = 0; i < D; ++i) grad[i] = r.d[i];
    return r.v;
  }

  void taylor(double z0, int m, double* c, double* cg) const override {
    if (m > kMaxCvDegree) throw UnsupportedError("Taylor degree above the supported maximum");
    using JG = Jet<G, kMaxCvDegree>;
    std::array<JG, D> e;
    for (int i = 0; i < D; ++i) e[i] = JG(eta_g_[i]);
    const JG r = k_.template kernel<JG>(e.data(), JG::variable(G(z0))) * pre_g_;
    for (int l = 0; l <= m; ++l) {
      c[l] = r.c[l].v;
      for (int i = 0; i < D; ++i) cg[l * D + i] = r.c[l].d[i];
    }
  }

  std::unique_ptr<Problem> at(std::span<const double> theta) const override {
    return std::make_unique<KernelProblem>(k_, theta, scale_);
  }

 private:
  K k_;
  std::vector<double> theta_;
  Distribution q_;
  std::vector<double> jq_;
  std::array<G, D> eta_g_;
  double scale_ = 0.0;
  double pre_ = 1.0;
  G pre_g_;
};

// Builds a value of scalar type T from a value and its gradient in eta.
template <class T, int D>
T lift(double v, const double* grad) {
  if constexpr (std::is_same_v<T, double>) {
    return v;
  } else if constexpr (is_dual<T>::value) {
    T r(v);
    for (int i = 0; i < D; ++i) r.d[i] = grad[i];
    return r;
  } else {
    using C = std::remove_cvref_t<decltype(T{}.c[0])>;
    return T(lift<C, D>(v, grad));
  }
}

// f(z, theta) with theta the native parameters of q. F is a generic callable
// f(const T& z, const T* theta) -> T.
template <int D, class F>
struct FunctionKernel {
  static constexpr int kDim = D;
  Family family;
  double upper = 0.0;  // truncation point of q, 0 if none
  F fn;

  template <class T>
  T log_prefactor(const T*) const { return T(0.0); }
  template <class T>
  T kernel(const T* eta, const T& z) const { return fn(z, eta); }
  Distribution make_q(const double* eta) const {
    SeedDistribution s(family, std::span<const double>(eta, D));
    if (upper > 0.0) return TruncatedSeed(s, upper);
    return s;
  }
  std::vector<double> q_jacobian(const double*) const {
    std::vector<double> j(D * D, 0.0);
    for (int i = 0; i < D; ++i) j[i * D + i] = 1.0;
    return j;
  }
};

template <int D, class F>
KernelProblem<FunctionKernel<D, F>> make_problem(const Distribution& q, F f) {
  const SeedDistribution& s = base_of(q);
  if (s.size() != D) throw DomainError("make_problem: parameter count does not match q");
  double upper = 0.0;
  if (auto* t = std::get_if<TruncatedSeed>(&q)) upper = t->upper;
  return KernelProblem<FunctionKernel<D, F>>(FunctionKernel<D, F>{s.family(), upper, std::move(f)}, s.params());
}

}  // namespace trawl
