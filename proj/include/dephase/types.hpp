#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "dephase/detail/linalg.hpp"
#include "dephase/errors.hpp"
#include "dephase/rational.hpp"

namespace dephase {

using Cplx = std::complex<double>;

/// Coupling exponent. `exact` is set when the exponent is a genuine small
/// fraction; revival analysis requires integer exponents and is declined
/// otherwise.
struct Exponent {
    double value = 1.0;
    std::optional<Rational> exact;

    static Exponent of(const Rational& r) { return Exponent{r.value(), r}; }
    static Exponent of(double v) { return Exponent{v, Rational::from_double_exact(v)}; }

    bool is_integer() const { return exact && exact->is_integer(); }
};

/// One mode's coupling frequency. `exact` must be present for the coupling
/// to participate in commensurability (revival/recurrence) analysis.
struct Coupling {
    double value = 0.0;
    std::optional<Rational> exact;

    static Coupling of(const Rational& r) { return Coupling{r.value(), r}; }
    static Coupling of(double v) { return Coupling{v, Rational::from_double_exact(v)}; }
};

/// The dephasing model: H = H1 + H2 + H12 with all pieces mutually commuting
/// and H12 = sum_l lambda_l (hbar N1)^x (hbar N2_l)^y.
///
/// omega, g and Omega parameterize the free Hamiltonian of the oscillator
/// model; the linear entropy depends only on hbar, x, y and the couplings,
/// so the free parameters enter the oracle and recurrence analysis alone.
struct ModelSpec {
    double hbar = 1.0;
    Exponent x = Exponent::of(Rational{1, 1});
    Exponent y = Exponent::of(Rational{1, 1});
    std::vector<Coupling> couplings;  // one per mode, length M >= 1
    double omega = 0.0;               // system frequency
    double g = 0.0;                   // Kerr strength
    double Omega = 0.0;               // reservoir frequency

    int mode_count() const { return static_cast<int>(couplings.size()); }

    /// hbar^(x+y-1), the prefactor every interaction phase carries.
    double hbar_power() const { return std::pow(hbar, x.value + y.value - 1.0); }

    void validate() const {
        std::vector<std::string> issues;
        if (couplings.empty()) issues.push_back("model: at least one coupling required (M >= 1)");
        if (!(hbar > 0)) issues.push_back("model.hbar: must be > 0");
        if (!(x.value > 0)) issues.push_back("model.x: must be > 0");
        if (!(y.value > 0)) issues.push_back("model.y: must be > 0");
        for (size_t l = 0; l < couplings.size(); ++l) {
            if (!std::isfinite(couplings[l].value))
                issues.push_back("model.couplings[" + std::to_string(l) + "]: must be finite");
        }
        if (!issues.empty()) throw ConfigError(std::move(issues));
    }
};

/// System-of-interest density matrix B_{v,w} in the number basis, truncated
/// to `dim` levels. Row-major storage.
struct SystemState {
    int dim = 0;
    std::vector<Cplx> B;

    const Cplx& at(int v, int w) const { return B[static_cast<size_t>(v) * dim + w]; }
    Cplx& at(int v, int w) { return B[static_cast<size_t>(v) * dim + w]; }

    double purity() const {
        double s = 0.0;
        for (const auto& b : B) s += std::norm(b);
        return s;
    }

    bool is_pure(double tol = 1e-9) const { return std::abs(purity() - 1.0) <= tol; }

    /// Hermitian within 1e-12, unit trace within 1e-12, eigenvalues >= -1e-12.
    void validate() const {
        std::vector<std::string> issues;
        if (dim < 1) issues.push_back("system: dim must be >= 1");
        if (B.size() != static_cast<size_t>(dim) * dim)
            issues.push_back("system: matrix storage size does not match dim");
        if (!issues.empty()) throw ConfigError(std::move(issues));

        double herm_dev = 0.0;
        Cplx tr = 0.0;
        for (int v = 0; v < dim; ++v) {
            tr += at(v, v);
            for (int w = 0; w < dim; ++w)
                herm_dev = std::max(herm_dev, std::abs(at(v, w) - std::conj(at(w, v))));
        }
        if (herm_dev > 1e-12)
            issues.push_back("system: matrix not Hermitian (max deviation " + std::to_string(herm_dev) + ")");
        if (std::abs(tr - 1.0) > 1e-12)
            issues.push_back("system: trace differs from 1 by " + std::to_string(std::abs(tr - 1.0)));
        if (herm_dev <= 1e-12) {
            const auto eig = detail::hermitian_eigenvalues(B, dim);
            for (double e : eig)
                if (e < -1e-12) {
                    issues.push_back("system: negative eigenvalue " + std::to_string(e));
                    break;
                }
        }
        if (!issues.empty()) throw ConfigError(std::move(issues));
    }
};

/// One reservoir mode's diagonal number-basis occupation probabilities.
///
/// Off-diagonal elements are intentionally not stored: the linear entropy of
/// a dephasing coupling involves only the diagonal (the numeric oracle, which
/// keeps full mode matrices, verifies this is lossless).
struct ModeDistribution {
    enum class Provenance { thermal, phase_state, custom };

    int dim = 0;
    std::vector<double> probs;
    Provenance provenance = Provenance::custom;

    // thermal provenance
    double nbar = 0.0;
    double tail_epsilon = 0.0;

    // phase-state provenance; m enters only off-diagonal phases
    int r_trunc = 0;
    int m = 0;

    void validate() const {
        std::vector<std::string> issues;
        if (dim < 1) issues.push_back("mode: dim must be >= 1");
        if (probs.size() != static_cast<size_t>(dim))
            issues.push_back("mode: probs length does not match dim");
        double sum = 0.0;
        for (size_t n = 0; n < probs.size(); ++n) {
            if (!(probs[n] >= 0.0))
                issues.push_back("mode: probs[" + std::to_string(n) + "] negative");
            sum += probs[n];
        }
        if (!probs.empty() && std::abs(sum - 1.0) > 1e-12)
            issues.push_back("mode: probabilities sum to " + std::to_string(sum) + ", not 1");
        if (provenance == Provenance::phase_state) {
            if (dim != r_trunc + 1)
                issues.push_back("mode: phase state dim must equal r_trunc + 1");
            const double uniform = 1.0 / (r_trunc + 1);
            for (double p : probs)
                if (std::abs(p - uniform) > 1e-15) {
                    issues.push_back("mode: phase state probabilities must be uniform");
                    break;
                }
        }
        if (!issues.empty()) throw ConfigError(std::move(issues));
    }
};

/// Reservoir modes, positionally aligned with ModelSpec::couplings
/// (mode l is driven with coupling lambda_l).
struct ReservoirSpec {
    std::vector<ModeDistribution> modes;

    int mode_count() const { return static_cast<int>(modes.size()); }
};

/// Throws unless the reservoir has exactly one mode per model coupling.
inline void require_consistent(const ModelSpec& model, const ReservoirSpec& res) {
    if (model.mode_count() != res.mode_count())
        throw ConfigError("model has " + std::to_string(model.mode_count()) +
                          " couplings but reservoir has " + std::to_string(res.mode_count()) +
                          " modes");
}

}  // namespace dephase
