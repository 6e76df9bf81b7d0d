#include "slitstrip/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

namespace slitstrip {

namespace {

constexpr int direct_width_cap = 14;

int mode_index(HalfInt twok) { return (twok - 1) / 2; }

std::string set_to_string(const HalfIntegerSet& s) {
    std::string out = "[";
    for (int i = 0; i < s.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(s.at(i));
    }
    out += ']';
    return out;
}

double require_real(std::complex<double> z, const char* what) {
    if (std::abs(z.imag()) > 1e-10 * std::max(1.0, std::abs(z)))
        throw std::runtime_error(std::string(what) + " has a non-vanishing imaginary part");
    return z.real();
}

} // namespace

std::string FusionKey::to_string() const {
    return set_to_string(top) + ";" + set_to_string(left) + ";" + set_to_string(right);
}

HalfIntegerSet parse_half_set(const std::string& csv) {
    std::vector<int> values;
    std::stringstream stream(csv);
    std::string item;
    while (std::getline(stream, item, ',')) {
        const auto begin = item.find_first_not_of(" \t");
        if (begin == std::string::npos) continue;
        const auto end = item.find_last_not_of(" \t");
        std::size_t used = 0;
        const int value = std::stoi(item.substr(begin, end - begin + 1), &used);
        if (used != end - begin + 1)
            throw std::invalid_argument("malformed half-integer list entry '" + item + "'");
        values.push_back(value);
    }
    return HalfIntegerSet(values);
}

void validate_key(const StripGeometry& g, const FusionKey& key) {
    const auto check = [](const HalfIntegerSet& s, int width, const char* family) {
        if (!s.empty() && s.max() > 2 * width - 1)
            throw std::domain_error("mode index " + std::to_string(s.max()) +
                                    "/2 exceeds the " + std::string(family) + " index range");
    };
    check(key.top, g.width, "full-width");
    check(key.left, g.leg_left, "left-leg");
    check(key.right, g.leg_right, "right-leg");
}

FusionEngine::FusionEngine(const StripGeometry& g)
    : g_(g), in_(prepare_fusion_inputs(g)), rec_(in_.ip) {}

double FusionEngine::recursive(const FusionKey& key) const {
    validate_key(g_, key);
    return rec_.value(key, true);
}

double FusionEngine::recursive_alternate(const FusionKey& key) const {
    validate_key(g_, key);
    return rec_.value(key, false);
}

double PeelRecursion::value(const FusionKey& key, bool top_first) const {
    return eval(key.top, key.left, key.right, top_first,
                top_first ? memo_primary_ : memo_alternate_);
}

double PeelRecursion::eval(const HalfIntegerSet& top, const HalfIntegerSet& left,
                           const HalfIntegerSet& right, bool top_first, Memo& memo) const {
    if (top.empty() && left.empty() && right.empty()) return 1.0;

    MemoKey mk{top.values(), left.values(), right.values()};
    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        const auto it = memo.find(mk);
        if (it != memo.end()) return it->second;
    }

    double value = 0.0;
    if (top_first) {
        if (!top.empty())
            value = peel(Extremity::top, top.max(), top.without(top.max()), left, right, top_first, memo);
        else if (!left.empty())
            value = peel(Extremity::left, left.max(), top, left.without(left.max()), right, top_first, memo);
        else
            value = peel(Extremity::right, right.max(), top, left, right.without(right.max()), top_first, memo);
    } else {
        if (!right.empty())
            value = peel(Extremity::right, right.max(), top, left, right.without(right.max()), top_first, memo);
        else if (!left.empty())
            value = peel(Extremity::left, left.max(), top, left.without(left.max()), right, top_first, memo);
        else
            value = peel(Extremity::top, top.max(), top.without(top.max()), left, right, top_first, memo);
    }

    {
        std::lock_guard<std::mutex> lock(memo_mutex_);
        memo.emplace(mk, value);
    }
    return value;
}

// One peeling step: the coefficient indexed by the reduced sets plus the
// extracted mode (family, twok) expands over single-index removals from the
// reduced sets. Left-leg annihilation crosses the right-leg block, so
// left-removal terms carry the parity of the remaining right set; peeling
// the left family itself first moves its creation operator across that same
// block, which cancels the parity on the left sum and attaches it to the
// top and right sums instead.
double PeelRecursion::peel(Extremity family, HalfInt twok, const HalfIntegerSet& top,
                           const HalfIntegerSet& left, const HalfIntegerSet& right, bool top_first,
                           Memo& memo) const {
    const int pe = static_cast<int>(family);
    const int jk = mode_index(twok);
    const double parity = right.size() % 2 == 0 ? 1.0 : -1.0;

    double sign_left = 0.0;
    double sign_right = 0.0;
    double sign_top = 0.0;
    switch (family) {
        case Extremity::top:
            sign_left = parity;
            sign_right = 1.0;
            sign_top = -1.0;
            break;
        case Extremity::left:
            sign_left = -1.0;
            sign_right = -parity;
            sign_top = parity;
            break;
        case Extremity::right:
            sign_left = -parity;
            sign_right = -1.0;
            sign_top = 1.0;
            break;
    }

    double sum = 0.0;
    for (int i = 0; i < left.size(); ++i) {
        const HalfInt tk = left.at(i);
        const double coeff = ip_[pe][static_cast<int>(Extremity::left)](mode_index(tk), jk);
        const double sgn = signed_indicator(left, tk);
        sum += sign_left * sgn * coeff * eval(top, left.without(tk), right, top_first, memo);
    }
    for (int i = 0; i < right.size(); ++i) {
        const HalfInt tk = right.at(i);
        const double coeff = ip_[pe][static_cast<int>(Extremity::right)](mode_index(tk), jk);
        const double sgn = signed_indicator(right, tk);
        sum += sign_right * sgn * coeff * eval(top, left, right.without(tk), top_first, memo);
    }
    for (int i = 0; i < top.size(); ++i) {
        const HalfInt tk = top.at(i);
        const double coeff = ip_[pe][static_cast<int>(Extremity::top)](mode_index(tk), jk);
        const double sgn = signed_indicator(top, tk);
        sum += sign_top * sgn * coeff * eval(top.without(tk), left, right, top_first, memo);
    }
    return sum;
}

void FusionEngine::require_direct_width() const {
    if (g_.width > direct_width_cap)
        throw std::domain_error("explicit eigenstate route is capped at width " +
                                std::to_string(direct_width_cap) + ", got " +
                                std::to_string(g_.width));
}

const PerronData& FusionEngine::strip_vacuum() const {
    require_direct_width();
    std::lock_guard<std::mutex> lock(vacuum_mutex_);
    if (!strip_vacuum_) {
        t_strip_.emplace(g_, Variant::strip);
        strip_vacuum_ = perron_frobenius(*t_strip_, +1, std::nullopt);
    }
    return *strip_vacuum_;
}

const PerronData& FusionEngine::slit_vacuum() const {
    require_direct_width();
    std::lock_guard<std::mutex> lock(vacuum_mutex_);
    if (!slit_vacuum_) {
        t_slit_.emplace(g_, Variant::slit);
        slit_vacuum_ = perron_frobenius(*t_slit_, +1, +1);
    }
    return *slit_vacuum_;
}

StateVector FusionEngine::strip_state(const HalfIntegerSet& top) const {
    StateVector v = strip_vacuum().vector;
    for (int i = 0; i < top.size(); ++i) {
        const int j = mode_index(top.at(i));
        v = apply_span(g_, mode_span(in_.basis_top.f_minus.col(j)), v);
    }
    return v;
}

StateVector FusionEngine::slit_state(const HalfIntegerSet& left, const HalfIntegerSet& right) const {
    StateVector w = slit_vacuum().vector;
    for (int i = 0; i < left.size(); ++i) {
        const int j = mode_index(left.at(i));
        w = apply_span(g_, mode_span(extend_left(g_, in_.basis_left.f_minus.col(j))), w);
    }
    for (int i = 0; i < right.size(); ++i) {
        const int j = mode_index(right.at(i));
        w = apply_span(g_, mode_span(extend_right(g_, in_.basis_right.f_minus.col(j))), w);
    }
    return w;
}

double FusionEngine::direct(const FusionKey& key) const {
    validate_key(g_, key);
    require_direct_width();
    const std::complex<double> overlap = strip_state(key.top).dot(slit_state(key.left, key.right));
    return require_real(overlap, "eigenstate overlap");
}

double FusionEngine::direct_vacuum() const { return direct(FusionKey{}); }

double FusionEngine::direct_ratio(const FusionKey& key) const {
    const double vacuum = direct_vacuum();
    if (vacuum <= 0.0)
        throw std::runtime_error("vacuum overlap must be strictly positive");
    return direct(key) / vacuum;
}

RenormalizationConstants renormalization_constants(const StripGeometry& g) {
    FusionEngine engine(g);
    const StateVector ones = lift_ones(g);
    const HalfIntegerSet empty;
    const HalfIntegerSet lowest(std::vector<int>{1});

    const StateVector v0 = engine.strip_state(empty);
    const StateVector w0 = engine.slit_state(empty, empty);
    const StateVector v1 = engine.strip_state(lowest);
    const StateVector wl = engine.slit_state(lowest, empty);

    RenormalizationConstants out;
    out.z_mono = 2.0 * require_real(v0.dot(ones) * ones.dot(w0), "monochromatic constant");
    out.z_mpp = require_real(v1.dot(ones) * ones.dot(wl), "minus/plus/plus constant");
    return out;
}

double vacuum_eigenvalue_closed_form(int width) {
    double value = std::sqrt(std::sqrt(2.0) + 1.0) * std::pow(2.0 + std::sqrt(2.0), width);
    for (int j = 0; j < width; ++j) {
        const double lambda = lambda_of_omega(solve_omega(width, j));
        value *= lambda / (lambda + 1.0);
    }
    return value;
}

DiagonalizationReport verify_diagonalization(const StripGeometry& g) {
    FusionEngine engine(g);
    const FusionInputs& in = engine.inputs();
    DiagonalizationReport rep;

    const auto dim = static_cast<Eigen::Index>(v_dimension(g));
    const TransferOperator t_strip(g, Variant::strip);
    const TransferOperator t_slit(g, Variant::slit);

    {
        const double mu0 = engine.strip_vacuum().eigenvalue;
        rep.vacuum_eigenvalue = mu0;
        rep.vacuum_closed_form = vacuum_eigenvalue_closed_form(g.width);

        const std::uint32_t count = v_dimension(g);
        Eigen::MatrixXcd states(dim, static_cast<Eigen::Index>(count));
        for (std::uint32_t mask = 0; mask < count; ++mask) {
            std::vector<int> twoks;
            double mu = mu0;
            for (int j = 0; j < g.width; ++j) {
                if (mask >> j & 1u) {
                    twoks.push_back(2 * j + 1);
                    mu /= in.basis_top.lambda(j);
                }
            }
            const StateVector v = engine.strip_state(HalfIntegerSet(twoks));
            states.col(static_cast<Eigen::Index>(mask)) = v;
            const double residual = (t_strip.apply(v) - mu * v).norm() / mu;
            rep.max_residual = std::max(rep.max_residual, residual);
        }
        const Eigen::MatrixXcd gram = states.adjoint() * states;
        rep.max_gram_defect =
            (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
        for (int j = 0; j < g.width; ++j) {
            const double defect =
                apply_span(g, mode_span(in.basis_top.f_plus.col(j)), engine.strip_vacuum().vector)
                    .norm();
            rep.max_annihilation = std::max(rep.max_annihilation, defect);
        }
    }

    {
        const double lambda0 = engine.slit_vacuum().eigenvalue;
        rep.slit_vacuum_eigenvalue = lambda0;

        const std::uint32_t count_left = std::uint32_t{1} << g.leg_left;
        const std::uint32_t count_right = std::uint32_t{1} << g.leg_right;
        Eigen::MatrixXcd states(dim, static_cast<Eigen::Index>(count_left * count_right));
        Eigen::Index col = 0;
        for (std::uint32_t mask_l = 0; mask_l < count_left; ++mask_l) {
            std::vector<int> left;
            double mu_l = lambda0;
            for (int j = 0; j < g.leg_left; ++j) {
                if (mask_l >> j & 1u) {
                    left.push_back(2 * j + 1);
                    mu_l /= in.basis_left.lambda(j);
                }
            }
            for (std::uint32_t mask_r = 0; mask_r < count_right; ++mask_r) {
                std::vector<int> right;
                double mu = mu_l;
                for (int j = 0; j < g.leg_right; ++j) {
                    if (mask_r >> j & 1u) {
                        right.push_back(2 * j + 1);
                        mu /= in.basis_right.lambda(j);
                    }
                }
                const StateVector w = engine.slit_state(HalfIntegerSet(left), HalfIntegerSet(right));
                states.col(col++) = w;
                const double residual = (t_slit.apply(w) - mu * w).norm() / mu;
                rep.slit_max_residual = std::max(rep.slit_max_residual, residual);
            }
        }
        const Eigen::MatrixXcd gram = states.adjoint() * states;
        rep.slit_max_gram_defect =
            (gram - Eigen::MatrixXcd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
        const StateVector& w0 = engine.slit_vacuum().vector;
        for (int j = 0; j < g.leg_left; ++j) {
            const double defect =
                apply_span(g, mode_span(extend_left(g, in.basis_left.f_plus.col(j))), w0).norm();
            rep.slit_max_annihilation = std::max(rep.slit_max_annihilation, defect);
        }
        for (int j = 0; j < g.leg_right; ++j) {
            const double defect =
                apply_span(g, mode_span(extend_right(g, in.basis_right.f_plus.col(j))), w0).norm();
            rep.slit_max_annihilation = std::max(rep.slit_max_annihilation, defect);
        }
    }

    return rep;
}

} // namespace slitstrip
