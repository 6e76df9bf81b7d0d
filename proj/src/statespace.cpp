#include "slitstrip/statespace.hpp"

namespace slitstrip {

double row_weight(const StripGeometry& g, SpinRow row) {
    int bond_sum = 0;
    for (int i = 0; i < g.width; ++i) bond_sum += spin_at(row, i) * spin_at(row, i + 1);
    return std::exp(0.5 * beta_critical * bond_sum);
}

StateVector lift_boundary_function(const StripGeometry& g,
                                   const std::function<std::complex<double>(SpinRow)>& f) {
    const std::uint32_t dim = v_dimension(g);
    StateVector out(dim);
    for (std::uint32_t v = 0; v < dim; ++v) {
        const SpinRow row = v_row(g, v);
        out(v) = row_weight(g, row) * f(row);
    }
    return out;
}

StateVector lift_boundary_product(const StripGeometry& g,
                                  const std::function<std::complex<double>(SpinRow)>& f_left,
                                  const std::function<std::complex<double>(SpinRow)>& f_right) {
    const std::uint32_t dim = v_dimension(g);
    StateVector out(dim);
    for (std::uint32_t v = 0; v < dim; ++v) {
        const SpinRow row = v_row(g, v);
        out(v) = row_weight(g, row) * f_left(row) * f_right(row);
    }
    return out;
}

StateVector lift_ones(const StripGeometry& g) {
    return lift_boundary_function(g, [](SpinRow) { return std::complex<double>(1.0, 0.0); });
}

std::vector<std::uint32_t> sector_rows(const StripGeometry& g, int spin_a) {
    std::vector<std::uint32_t> rows;
    const std::uint32_t dim = v_dimension(g);
    const std::uint32_t want = spin_a > 0 ? 1u : 0u;
    for (std::uint32_t v = 0; v < dim; ++v)
        if ((v & 1u) == want) rows.push_back(v);
    return rows;
}

std::vector<std::uint32_t> sector_rows_slit(const StripGeometry& g, int spin_a, int spin_mid) {
    std::vector<std::uint32_t> rows;
    const std::uint32_t dim = v_dimension(g);
    const std::uint32_t want_a = spin_a > 0 ? 1u : 0u;
    const int mid = g.leg_left; // site index of column 0
    const std::uint32_t want_m = spin_mid > 0 ? 1u : 0u;
    for (std::uint32_t v = 0; v < dim; ++v) {
        const SpinRow row = v_row(g, v);
        if ((v & 1u) == want_a && (((row >> mid) & 1u)) == want_m) rows.push_back(v);
    }
    return rows;
}

namespace {

// Kahan-compensated accumulator; Boltzmann weights span many scales.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

struct EnumerationPlan {
    int n_cols = 0;
    int n_rows = 0;
    // site -> {component id or -1, free index or -1}
    std::vector<int> component_of;
    std::vector<int> free_index_of;
    int n_components = 0;
    int n_free = 0;
    std::vector<std::pair<int, int>> edges; // site index pairs

    int site(int col, int row) const { return row * n_cols + col; }
};

EnumerationPlan plan_enumeration(const StripGeometry& g, const OracleRequest& req) {
    EnumerationPlan p;
    p.n_cols = g.width + 1;
    p.n_rows = req.h_top + req.h_bottom + 1;
    const long sites = static_cast<long>(p.n_cols) * p.n_rows;
    if (sites > 24) throw std::domain_error("enumeration cap exceeded: more than 24 sites");

    p.component_of.assign(static_cast<size_t>(sites), -1);
    p.free_index_of.assign(static_cast<size_t>(sites), -1);

    const int col_left = 0;
    const int col_right = g.width;
    const int col_mid = g.leg_left;
    // Rows are indexed 0..n_rows-1 bottom to top; height = row - h_bottom.
    for (int r = 0; r < p.n_rows; ++r) {
        p.component_of[static_cast<size_t>(p.site(col_left, r))] = 0;
        p.component_of[static_cast<size_t>(p.site(col_right, r))] = 1;
        if (req.slit && r - req.h_bottom <= 0)
            p.component_of[static_cast<size_t>(p.site(col_mid, r))] = 2;
    }
    p.n_components = req.slit ? 3 : 2;
    for (int s = 0; s < sites; ++s)
        if (p.component_of[static_cast<size_t>(s)] < 0)
            p.free_index_of[static_cast<size_t>(s)] = p.n_free++;

    for (int r = 0; r < p.n_rows; ++r)
        for (int c = 0; c < p.n_cols; ++c) {
            if (c + 1 < p.n_cols) p.edges.emplace_back(p.site(c, r), p.site(c + 1, r));
            if (r + 1 < p.n_rows) p.edges.emplace_back(p.site(c, r), p.site(c, r + 1));
        }
    return p;
}

// Runs the enumeration, invoking sink(spins, weight) for every configuration.
template <typename Sink>
void enumerate(const EnumerationPlan& p, Sink&& sink) {
    const int sites = p.n_cols * p.n_rows;
    std::vector<int> spins(static_cast<size_t>(sites), +1);
    const std::uint64_t n_comp_cfg = std::uint64_t{1} << p.n_components;
    const std::uint64_t n_free_cfg = std::uint64_t{1} << p.n_free;
    for (std::uint64_t comp = 0; comp < n_comp_cfg; ++comp) {
        for (std::uint64_t free = 0; free < n_free_cfg; ++free) {
            for (int s = 0; s < sites; ++s) {
                const int c = p.component_of[static_cast<size_t>(s)];
                if (c >= 0)
                    spins[static_cast<size_t>(s)] = (comp >> c) & 1u ? +1 : -1;
                else
                    spins[static_cast<size_t>(s)] =
                        (free >> p.free_index_of[static_cast<size_t>(s)]) & 1u ? +1 : -1;
            }
            int bond_sum = 0;
            for (const auto& e : p.edges)
                bond_sum += spins[static_cast<size_t>(e.first)] * spins[static_cast<size_t>(e.second)];
            sink(spins, std::exp(beta_critical * bond_sum), /*right_plus=*/(comp >> 1) & 1u);
        }
    }
}

} // namespace

OracleResult oracle_partition(const StripGeometry& g, const OracleRequest& req) {
    const EnumerationPlan p = plan_enumeration(g, req);
    CompensatedSum z_all, z_rp;
    enumerate(p, [&](const std::vector<int>&, double w, bool right_plus) {
        z_all.add(w);
        if (right_plus) z_rp.add(w);
    });
    OracleResult out;
    out.z_conditioned = z_all.sum;
    out.z_right_plus = z_rp.sum;
    return out;
}

double oracle_correlation(const StripGeometry& g, const OracleRequest& req) {
    const EnumerationPlan p = plan_enumeration(g, req);
    std::vector<int> insertion_sites;
    for (const auto& ins : req.insertions) {
        const int col = ins.x - g.a;
        const int row = ins.y + req.h_bottom;
        if (col < 0 || col >= p.n_cols || row < 0 || row >= p.n_rows)
            throw std::domain_error("insertion outside the truncated lattice");
        insertion_sites.push_back(p.site(col, row));
    }
    CompensatedSum num, den;
    enumerate(p, [&](const std::vector<int>& spins, double w, bool) {
        int prod = 1;
        for (int s : insertion_sites) prod *= spins[static_cast<size_t>(s)];
        num.add(prod * w);
        den.add(w);
    });
    return num.sum / den.sum;
}

} // namespace slitstrip
