// Closed taxonomy of model positive currents: slice currents f * [z_J = 0],
// factored currents c * gamma_1 ^ ... ^ gamma_k, and scaled sums, each with
// an analytically attached dd^c. Densities reduce to mixed_wedge_coeff calls.
#pragma once

#include "lelong/forms.hpp"

#include <memory>
#include <optional>
#include <string>

namespace lelong {

enum class MonotonicityClass { Psh, Prh, Closed, None };

struct SingularityAnnotation {
    enum class Kernel { Log, Power };
    std::vector<int> locus;  // full-frame coordinate indices; singular where all vanish
    Kernel kernel = Kernel::Log;
    double alpha = 0.0;  // exponent for Power kernels (|.|^{-alpha})
};

struct FormFactor {
    enum class Type { Gradient, Hessian };  // du ^ d^c u  |  dd^c u
    Type type;
    ScalarField potential;
};

class ModelCurrent {
  public:
    enum class Kind { Zero, Slice, Factored, ScaledSum };

    static ModelCurrent zero(int n, int m, int k);
    static ModelCurrent slice(int n, int m, std::vector<int> J, ScalarField weight,
                              std::vector<FormFactor> factors = {});
    static ModelCurrent factored(int n, int m, ScalarField weight,
                                 std::vector<FormFactor> factors);
    static ModelCurrent scaledSum(std::vector<std::pair<double, ModelCurrent>> terms);

    Kind kind() const { return kind_; }
    int n() const { return n_; }
    int m() const { return m_; }
    int dim() const { return n_ + m_; }
    int bidegree() const { return k_; }
    const std::vector<int>& sliceIndices() const { return J_; }
    const std::vector<FormFactor>& factors() const { return factors_; }
    const ScalarField& weight() const { return weight_; }
    const std::vector<std::pair<double, ModelCurrent>>& terms() const { return terms_; }

    MonotonicityClass monotonicity = MonotonicityClass::None;
    bool positive = true;  // false: negative of a positive current
    bool smooth = false;   // smooth coefficients on the whole domain
    std::vector<SingularityAnnotation> annotations;
    std::string name;
    double validityEuclid = 1.0;  // largest euclidean z-radius the entry is meant for

    ModelCurrent& withDdc(ModelCurrent d) {
        ddc_ = std::make_shared<ModelCurrent>(std::move(d));
        return *this;
    }
    bool hasDdc() const { return ddc_ != nullptr; }

    // Density of T ^ (wedge of test forms) against Lebesgue measure on the
    // effective domain (the slice for slice currents, C^N otherwise), at the
    // full-frame point p (p must satisfy z_J = 0). Requires
    // count(testForms) = (n - k) + m.
    double densityAt(const CPoint& p, std::span<const HermitianForm> testForms) const;
    double densityAt(const CPoint& p, const std::vector<HermitianForm>& testForms) const;

    bool onSingularLocus(const CPoint& p) const;

  private:
    Kind kind_ = Kind::Zero;
    int n_ = 0, m_ = 0, k_ = 0;
    std::vector<int> J_;
    ScalarField weight_;
    std::vector<FormFactor> factors_;
    std::vector<std::pair<double, ModelCurrent>> terms_;
    std::shared_ptr<const ModelCurrent> ddc_;

    friend const ModelCurrent& ddc(const ModelCurrent&);
};

// The attached analytic dd^c; throws if the descriptor is missing.
const ModelCurrent& ddc(const ModelCurrent& T);

// Catalog entries: Zero, T0, T0_full, T1, T2, T3, T4, TS, TS4, H0.
ModelCurrent catalog(const std::string& name);
std::vector<std::string> catalog_names();
std::string catalog_description(const std::string& name);

}  // namespace lelong
