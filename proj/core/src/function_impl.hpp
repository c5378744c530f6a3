#pragma once

#include <optional>
#include <string>
#include <vector>

#include "autorb/function.hpp"

namespace autorb::detail {

class FunctionImpl {
 public:
  FunctionImpl(std::string name, Family family) : name_(std::move(name)), family_(family) {}
  virtual ~FunctionImpl() = default;

  const std::string& name() const { return name_; }
  Family family() const { return family_; }

  virtual Jet jet(Complex w, int order) const = 0;
  virtual std::optional<Complex> coefficient(int n) const = 0;
  virtual std::optional<std::vector<Complex>> polynomial_coefficients() const { return std::nullopt; }
  virtual std::optional<double> known_order() const { return std::nullopt; }
  virtual std::optional<int> genus() const { return std::nullopt; }
  virtual bool has_orbit_oracle() const { return false; }
  virtual std::vector<OrbitPoint> orbit_oracle(Complex z, double R) const;

 private:
  std::string name_;
  Family family_;
};

std::shared_ptr<const FunctionImpl> make_polynomial(std::vector<Complex> coeffs, Family family,
                                                    std::string name);
std::shared_ptr<const FunctionImpl> make_exp();
std::shared_ptr<const FunctionImpl> make_cos_sqrt();
std::shared_ptr<const FunctionImpl> make_quarter_order();
std::shared_ptr<const FunctionImpl> make_poly_times_exp(std::vector<Complex> p, std::vector<Complex> g);
std::shared_ptr<const FunctionImpl> make_ng_factor(Complex c);
std::shared_ptr<const FunctionImpl> make_composition(std::vector<EntireFunction> tower);
std::shared_ptr<const FunctionImpl> make_derivative(EntireFunction f);

}  // namespace autorb::detail
