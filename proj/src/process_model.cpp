#include "cowu/process_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <json.hpp>

namespace cowu {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kStationaryResidualTol = 1e-10;

// phi' = phi * Z for a row vector phi.
void left_multiply(std::span<const double> phi, const TransitionMatrix& z, std::span<double> out) {
    const int m = z.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < m; ++i) {
        const double w = phi[i];
        if (w == 0.0) continue;
        const auto row = z.row(i);
        for (int j = 0; j < m; ++j) out[j] += w * row[j];
    }
}

std::vector<double> flat_multiply(const std::vector<double>& a, const std::vector<double>& b, int m) {
    std::vector<double> c(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) {
        for (int k = 0; k < m; ++k) {
            const double aik = a[static_cast<std::size_t>(i) * m + k];
            if (aik == 0.0) continue;
            const double* brow = &b[static_cast<std::size_t>(k) * m];
            double* crow = &c[static_cast<std::size_t>(i) * m];
            for (int j = 0; j < m; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

}  // namespace

TransitionMatrix::TransitionMatrix(int size, std::vector<double> entries)
    : size_(size), entries_(std::move(entries)) {}

TransitionMatrix TransitionMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const int m = static_cast<int>(rows.size());
    if (m < 1) throw std::invalid_argument("transition matrix: need at least one state");
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(m) * m);
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != m)
            throw std::invalid_argument("transition matrix: rows must form a square matrix");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    TransitionMatrix z(m, std::move(flat));
    z.validate();
    return z;
}

TransitionMatrix TransitionMatrix::birth_death(int num_states, double step_prob) {
    if (num_states < 2)
        throw std::invalid_argument("birth_death: num_states must be >= 2");
    if (!(step_prob >= 0.0 && step_prob <= 0.5))
        throw std::invalid_argument("birth_death: step_prob must lie in [0, 0.5]");
    if (step_prob == 0.0) {
        // Frozen process: the identity matrix is reducible, but it is the
        // correct q = 0 limit and its stationary behavior is handled by the
        // callers (every distribution is stationary; we use the uniform one).
        std::vector<double> flat(static_cast<std::size_t>(num_states) * num_states, 0.0);
        for (int i = 0; i < num_states; ++i) flat[static_cast<std::size_t>(i) * num_states + i] = 1.0;
        return TransitionMatrix(num_states, std::move(flat));
    }
    const int m = num_states;
    std::vector<double> flat(static_cast<std::size_t>(m) * m, 0.0);
    auto at = [&](int i, int j) -> double& { return flat[static_cast<std::size_t>(i) * m + j]; };
    for (int i = 0; i < m; ++i) {
        if (i > 0) at(i, i - 1) = step_prob;
        if (i + 1 < m) at(i, i + 1) = step_prob;
        at(i, i) = (i == 0 || i == m - 1) ? 1.0 - step_prob : 1.0 - 2.0 * step_prob;
    }
    TransitionMatrix z(m, std::move(flat));
    z.validate();
    return z;
}

double TransitionMatrix::entry(int from, int to) const {
    if (from < 0 || from >= size_ || to < 0 || to >= size_)
        throw std::out_of_range("transition matrix: index out of range");
    return entries_[static_cast<std::size_t>(from) * size_ + to];
}

std::span<const double> TransitionMatrix::row(int from) const {
    if (from < 0 || from >= size_)
        throw std::out_of_range("transition matrix: row index out of range");
    return {&entries_[static_cast<std::size_t>(from) * size_], static_cast<std::size_t>(size_)};
}

double TransitionMatrix::row_sum_drift() const noexcept {
    double drift = 0.0;
    for (int i = 0; i < size_; ++i) {
        double sum = 0.0;
        for (int j = 0; j < size_; ++j) sum += entries_[static_cast<std::size_t>(i) * size_ + j];
        drift = std::max(drift, std::abs(sum - 1.0));
    }
    return drift;
}

void TransitionMatrix::validate() const {
    for (int i = 0; i < size_; ++i) {
        double sum = 0.0;
        for (int j = 0; j < size_; ++j) {
            const double e = entries_[static_cast<std::size_t>(i) * size_ + j];
            if (!(e >= 0.0 && e <= 1.0))
                throw std::invalid_argument("transition matrix: entries must lie in [0, 1]");
            sum += e;
        }
        if (std::abs(sum - 1.0) > kRowSumTol)
            throw std::invalid_argument("transition matrix: row " + std::to_string(i + 1) +
                                        " does not sum to 1");
    }
    // Irreducibility: every state reachable from state 0 and vice versa.
    // The q = 0 identity matrix is exempted at construction.
    auto reachable = [&](bool transpose) {
        std::vector<char> seen(size_, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < size_; ++v) {
                const double e = transpose ? entries_[static_cast<std::size_t>(v) * size_ + u]
                                           : entries_[static_cast<std::size_t>(u) * size_ + v];
                if (e > 0.0 && !seen[v]) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    };
    bool identity = true;
    for (int i = 0; i < size_ && identity; ++i)
        identity = entries_[static_cast<std::size_t>(i) * size_ + i] == 1.0;
    if (!identity && (!reachable(false) || !reachable(true)))
        throw std::invalid_argument("transition matrix: chain is not irreducible");
}

std::string TransitionMatrix::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < size_; ++i) {
        const auto r = row(i);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return rows.dump();
}

TransitionMatrix TransitionMatrix::from_json(const std::string& text) {
    const auto parsed = nlohmann::json::parse(text);
    if (!parsed.is_array())
        throw std::invalid_argument("transition matrix JSON: expected an array of rows");
    std::vector<std::vector<double>> rows;
    rows.reserve(parsed.size());
    for (const auto& row : parsed) rows.push_back(row.get<std::vector<double>>());
    return from_rows(rows);
}

void RangeQuery::validate(int num_states) const {
    if (lower < 1 || upper < lower || upper > num_states)
        throw std::invalid_argument("range: need 1 <= lower <= upper <= " +
                                    std::to_string(num_states));
}

StationaryDistribution stationary(const TransitionMatrix& z) {
    const int m = z.size();
    // GTH state censoring: eliminate states from the top down using only
    // additions, multiplications and one division per elimination.
    std::vector<std::vector<double>> a(m, std::vector<double>(m));
    for (int i = 0; i < m; ++i) {
        const auto row = z.row(i);
        std::copy(row.begin(), row.end(), a[i].begin());
    }
    for (int k = m - 1; k >= 1; --k) {
        double departure = 0.0;
        for (int j = 0; j < k; ++j) departure += a[k][j];
        if (departure <= 0.0)
            throw std::runtime_error("stationary: chain has an absorbing block; "
                                     "no unique stationary distribution");
        for (int i = 0; i < k; ++i) a[i][k] /= departure;
        for (int i = 0; i < k; ++i) {
            const double via = a[i][k];
            if (via == 0.0) continue;
            for (int j = 0; j < k; ++j) a[i][j] += via * a[k][j];
        }
    }
    std::vector<double> pi(m, 0.0);
    pi[0] = 1.0;
    for (int k = 1; k < m; ++k) {
        double mass = 0.0;
        for (int i = 0; i < k; ++i) mass += pi[i] * a[i][k];
        pi[k] = mass;
    }
    double total = 0.0;
    for (double v : pi) total += v;
    for (double& v : pi) v /= total;

    // Guard: pi Z = pi componentwise. A failure here means the input chain
    // was periodic/reducible in a way construction-time checks missed.
    std::vector<double> check(m, 0.0);
    left_multiply(pi, z, check);
    for (int i = 0; i < m; ++i)
        if (std::abs(check[i] - pi[i]) > kStationaryResidualTol)
            throw std::runtime_error("stationary: residual exceeds tolerance");
    return StationaryDistribution{std::move(pi)};
}

TransitionMatrix matrix_power(const TransitionMatrix& z, std::uint64_t zeta) {
    const int m = z.size();
    std::vector<double> result(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) result[static_cast<std::size_t>(i) * m + i] = 1.0;
    std::vector<double> base(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i) {
        const auto row = z.row(i);
        std::copy(row.begin(), row.end(), base.begin() + static_cast<std::ptrdiff_t>(i) * m);
    }
    std::uint64_t e = zeta;
    while (e > 0) {
        if (e & 1ULL) result = flat_multiply(result, base, m);
        e >>= 1;
        if (e > 0) base = flat_multiply(base, base, m);
    }
    return TransitionMatrix(m, std::move(result));
}

double wake_probability(const StationaryDistribution& pi, const RangeQuery& range) {
    range.validate(static_cast<int>(pi.probs.size()));
    double mass = 0.0;
    for (int s = range.lower; s <= range.upper; ++s) mass += pi.probs[s - 1];
    return mass;
}

RangeSurvival range_survival_probs(const TransitionMatrix& z,
                                   const StationaryDistribution& pi,
                                   const RangeQuery& range,
                                   std::uint64_t zeta) {
    range.validate(z.size());
    const int m = z.size();
    const TransitionMatrix zp = matrix_power(z, zeta);

    double mass_in = 0.0, mass_out = 0.0;
    double joint_in = 0.0, joint_out = 0.0, joint_leave = 0.0;
    for (int i = 0; i < m; ++i) {
        const bool inside = range.contains(i + 1);
        double stay_in = 0.0, stay_out = 0.0;
        const auto row = zp.row(i);
        for (int j = 0; j < m; ++j) {
            if (range.contains(j + 1)) stay_in += row[j];
            else stay_out += row[j];
        }
        if (inside) {
            mass_in += pi.probs[i];
            joint_in += pi.probs[i] * stay_in;
            joint_leave += pi.probs[i] * stay_out;
        } else {
            mass_out += pi.probs[i];
            joint_out += pi.probs[i] * stay_out;
        }
    }

    RangeSurvival out;
    out.p_d = joint_in;
    out.p_e = joint_out;
    out.p_a = mass_in > 0.0 ? joint_in / mass_in : 1.0;
    out.p_b = mass_in > 0.0 ? joint_leave / mass_in : 0.0;
    // Full-range query: the outside condition is vacuous, defined as 1.
    out.p_c = mass_out > 0.0 ? joint_out / mass_out : 1.0;
    return out;
}

RangeSurvivalSweep::RangeSurvivalSweep(const TransitionMatrix& z,
                                       const StationaryDistribution& pi,
                                       const RangeQuery& range)
    : z_(&z), pi_(pi.probs) {
    range.validate(z.size());
    const int m = z.size();
    in_range_.resize(m);
    hit_range_.resize(m);
    hit_complement_.resize(m);
    scratch_.resize(m);
    for (int i = 0; i < m; ++i) {
        const bool inside = range.contains(i + 1);
        in_range_[i] = inside ? 1 : 0;
        hit_range_[i] = inside ? 1.0 : 0.0;
        hit_complement_[i] = inside ? 0.0 : 1.0;
        (inside ? mass_in_ : mass_out_) += pi_[i];
    }
}

void RangeSurvivalSweep::advance() {
    const int m = z_->size();
    // hit(zeta+1) = Z * hit(zeta), one row-dot per state.
    for (std::vector<double>* vec : {&hit_range_, &hit_complement_}) {
        for (int i = 0; i < m; ++i) {
            const auto row = z_->row(i);
            double acc = 0.0;
            for (int j = 0; j < m; ++j) acc += row[j] * (*vec)[j];
            scratch_[i] = acc;
        }
        vec->swap(scratch_);
    }
    ++zeta_;
}

RangeSurvival RangeSurvivalSweep::current() const {
    const int m = z_->size();
    double joint_in = 0.0, joint_out = 0.0, joint_leave = 0.0;
    for (int i = 0; i < m; ++i) {
        if (in_range_[i]) {
            joint_in += pi_[i] * hit_range_[i];
            joint_leave += pi_[i] * hit_complement_[i];
        } else {
            joint_out += pi_[i] * hit_complement_[i];
        }
    }
    RangeSurvival out;
    out.p_d = joint_in;
    out.p_e = joint_out;
    out.p_a = mass_in_ > 0.0 ? joint_in / mass_in_ : 1.0;
    out.p_b = mass_in_ > 0.0 ? joint_leave / mass_in_ : 0.0;
    out.p_c = mass_out_ > 0.0 ? joint_out / mass_out_ : 1.0;
    return out;
}

}  // namespace cowu
