#include "wnlab/wave1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wnlab {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t steps_in(double lo, double hi, double h, const char* what) {
    const double q = (hi - lo) / h;
    const double k = std::round(q);
    if (!(k >= 1.0) || std::abs(q - k) > 1e-9 * std::max(1.0, k))
        throw std::invalid_argument(std::string("evolve: h does not divide the ") + what + " range");
    return static_cast<std::size_t>(k);
}

// Cell-centred right-hand side of d_u d_v psi for all fields.
class CellRhs {
public:
    CellRhs(const WaveSystemSpec& spec, const WaveSource& source)
        : n_(spec.n_fields()),
          bad_(spec.bad_coeffs()),
          null_(spec.nullform_coeffs()),
          has_bad_(spec.bad_coeffs().max_abs() > 0.0),
          has_null_(spec.nullform_coeffs().max_abs() > 0.0),
          source_(source),
          dt_(n_),
          fu_(n_),
          fv_(n_) {}

    // psi, pu, pv: centre values; out: G_A.
    void operator()(double u, double v, const double* psi, const double* pu, const double* pv, double* out) {
        const double r = 0.5 * (v - u);
        const double inv_r = 1.0 / r;
        const double half_inv_r2 = 0.5 * inv_r * inv_r;
        for (std::size_t b = 0; b < n_; ++b) {
            dt_[b] = (pu[b] + pv[b]) * inv_r;
            fu_[b] = pu[b] * inv_r + psi[b] * half_inv_r2;
            fv_[b] = pv[b] * inv_r - psi[b] * half_inv_r2;
        }
        for (std::size_t a = 0; a < n_; ++a) {
            double acc = 0.0;
            if (has_bad_)
                for (std::size_t b = 0; b < n_; ++b)
                    for (std::size_t c = 0; c < n_; ++c) acc += bad_(a, b, c) * dt_[b] * dt_[c];
            // G symmetric in (b, c): G m^-1(d phi_b, d phi_c) = -4 G phi_b,u phi_c,v.
            if (has_null_)
                for (std::size_t b = 0; b < n_; ++b)
                    for (std::size_t c = 0; c < n_; ++c) acc -= 4.0 * null_(a, b, c) * fu_[b] * fv_[c];
            out[a] = 0.25 * r * acc;
            if (source_) out[a] += source_(a, u, v);
        }
    }

private:
    std::size_t n_;
    const Tensor3& bad_;
    const Tensor3& null_;
    bool has_bad_, has_null_;
    const WaveSource& source_;
    Vector dt_, fu_, fv_;
};

}  // namespace

double BumpProfile::operator()(double u) const noexcept {
    const double x = (u - center) / width;
    if (!(std::abs(x) < 1.0)) return 0.0;
    return amplitude * std::exp(1.0 - 1.0 / (1.0 - x * x));
}

void CharacteristicData::validate() const {
    if (n_fields == 0) throw std::invalid_argument("characteristic data: no fields");
    if (!(u1 > u0) || !(v1 > v0)) throw std::invalid_argument("characteristic data: empty u or v range");
    if (!(r_min() > 0.0)) throw std::invalid_argument("characteristic data: r_min = (v0 - u1)/2 must be positive");
    if (ingoing.size() != n_fields || outgoing.size() != n_fields)
        throw std::invalid_argument("characteristic data: one profile per field on each cone is required");
    for (std::size_t a = 0; a < n_fields; ++a) {
        if (!ingoing[a] || !outgoing[a]) throw std::invalid_argument("characteristic data: empty profile");
        const double p = ingoing[a](u0);
        const double q = outgoing[a](v0);
        if (!std::isfinite(p) || !std::isfinite(q) || std::abs(p - q) > 1e-12 * std::max({1.0, std::abs(p), std::abs(q)}))
            throw std::invalid_argument("characteristic data: cones disagree at the corner for field " +
                                        std::to_string(a));
    }
}

CharacteristicData bump_data(double u0, double u1, double v0, double v1, std::vector<BumpProfile> bumps) {
    CharacteristicData d;
    d.n_fields = bumps.size();
    d.u0 = u0;
    d.u1 = u1;
    d.v0 = v0;
    d.v1 = v1;
    for (const auto& b : bumps) {
        d.ingoing.emplace_back(b);
        const double corner = b(u0);
        d.outgoing.emplace_back([corner](double) { return corner; });
    }
    return d;
}

std::string to_string(GridStatus s) {
    return s == GridStatus::completed ? "completed" : "blowup";
}

CharacteristicGrid::CharacteristicGrid(std::size_t n_fields, double u0, double v0, double h, std::size_t rows,
                                       std::size_t cols, std::vector<std::size_t> stored_rows)
    : n_(n_fields),
      u0_(u0),
      v0_(v0),
      h_(h),
      rows_(rows),
      cols_(cols),
      stored_(std::move(stored_rows)),
      slot_(rows, npos),
      extent_(rows, 0),
      data_(stored_.size() * n_fields * cols, 0.0),
      blowup_u_(kNaN),
      blowup_v_(kNaN) {
    for (std::size_t k = 0; k < stored_.size(); ++k) {
        if (stored_[k] >= rows_) throw DimensionError("grid: stored row out of range");
        slot_[stored_[k]] = k;
    }
}

std::optional<std::size_t> CharacteristicGrid::row_of(double u) const noexcept {
    const double q = (u - u0_) / h_;
    const double k = std::round(q);
    if (!(k >= 0.0) || k > static_cast<double>(rows_ - 1) || std::abs(q - k) > 1e-9) return std::nullopt;
    return static_cast<std::size_t>(k);
}

bool CharacteristicGrid::has_row(std::size_t i) const noexcept { return i < rows_ && slot_[i] != npos; }

std::size_t CharacteristicGrid::extent(std::size_t i) const noexcept { return i < rows_ ? extent_[i] : 0; }

std::size_t CharacteristicGrid::slot_of(std::size_t i) const {
    if (!has_row(i)) throw std::out_of_range("grid: row " + std::to_string(i) + " not stored");
    return slot_[i];
}

double CharacteristicGrid::psi(std::size_t field, std::size_t i, std::size_t j) const {
    if (field >= n_ || j >= extent(i)) throw std::out_of_range("grid: index out of range");
    return data_[(slot_of(i) * n_ + field) * cols_ + j];
}

std::span<const double> CharacteristicGrid::row(std::size_t field, std::size_t i) const {
    if (field >= n_) throw std::out_of_range("grid: field out of range");
    return {data_.data() + (slot_of(i) * n_ + field) * cols_, extent(i)};
}

std::span<double> CharacteristicGrid::mutable_row(std::size_t field, std::size_t i) {
    return {data_.data() + (slot_of(i) * n_ + field) * cols_, cols_};
}

void CharacteristicGrid::set_extent(std::size_t i, std::size_t extent) { extent_.at(i) = extent; }

void CharacteristicGrid::mark_blowup(double u, double v) noexcept {
    status_ = GridStatus::blowup;
    blowup_u_ = u;
    blowup_v_ = v;
}

CharacteristicGrid evolve(const WaveSystemSpec& spec, const CharacteristicData& data, double h,
                          const EvolveOptions& options) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("evolve: h must be positive");
    data.validate();
    if (data.n_fields != spec.n_fields()) throw DimensionError("evolve: data and system field counts differ");
    const std::size_t n = spec.n_fields();
    const std::size_t nu = steps_in(data.u0, data.u1, h, "u");
    const std::size_t nv = steps_in(data.v0, data.v1, h, "v");
    const std::size_t rows = nu + 1, cols = nv + 1;

    std::vector<std::size_t> stored;
    if (options.keep_u.empty()) {
        stored.resize(rows);
        for (std::size_t i = 0; i < rows; ++i) stored[i] = i;
    } else {
        for (double u : options.keep_u) {
            const double q = (u - data.u0) / h;
            const double k = std::round(q);
            if (!(k >= 0.0) || k > static_cast<double>(nu) || std::abs(q - k) > 1e-9)
                throw std::invalid_argument("evolve: keep_u value off the grid");
            const auto i = static_cast<std::size_t>(k);
            for (std::size_t d = (i > 0 ? i - 1 : 0); d <= std::min(nu, i + 1); ++d) stored.push_back(d);
        }
        std::sort(stored.begin(), stored.end());
        stored.erase(std::unique(stored.begin(), stored.end()), stored.end());
    }

    CharacteristicGrid grid(n, data.u0, data.v0, h, rows, cols, std::move(stored));
    auto& stats = grid.mutable_stats();

    // The sweep runs over columns (v outer) so that the first failing diamond
    // has the smallest v. prev = column j, cur = column j + 1, both [field][row].
    std::vector<double> prev(n * rows), cur(n * rows);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t i = 0; i < rows; ++i) prev[a * rows + i] = data.ingoing[a](grid.u(i));
    for (std::size_t a = 0; a < n; ++a) prev[a * rows] = data.outgoing[a](data.v0);

    std::vector<std::vector<double*>> out_rows(n, std::vector<double*>(rows, nullptr));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t i : grid.stored_rows()) out_rows[a][i] = grid.mutable_row(a, i).data();
    auto store = [&](const std::vector<double>& col, std::size_t j, std::size_t i_end) {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t i = 0; i < i_end; ++i)
                if (double* dst = out_rows[a][i]) dst[j] = col[a * rows + i];
    };
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t a = 0; a < n; ++a)
            stats.max_phi = std::max(stats.max_phi, std::abs(prev[a * rows + i]) / grid.r(i, 0));
    store(prev, 0, rows);

    const double thr = options.blowup_threshold;
    CellRhs rhs(spec, options.source);
    Vector pc(n), pu(n), pv(n), g(n), north(n);
    const double h2 = h * h, inv_2h = 0.5 / h;

    for (std::size_t j = 0; j < nv; ++j) {
        const double v_c = grid.v(j) + 0.5 * h;
        for (std::size_t a = 0; a < n; ++a) cur[a * rows] = data.outgoing[a](grid.v(j + 1));
        for (std::size_t a = 0; a < n; ++a)
            stats.max_phi = std::max(stats.max_phi, std::abs(cur[a * rows]) / grid.r(0, j + 1));
        for (std::size_t i = 0; i < nu; ++i) {
            const double u_c = grid.u(i) + 0.5 * h;
            // S = (i, j), E = (i, j+1), W = (i+1, j), N = (i+1, j+1).
            auto centre = [&](const Vector& nn) {
                for (std::size_t a = 0; a < n; ++a) {
                    const double s = prev[a * rows + i], e = cur[a * rows + i], w = prev[a * rows + i + 1];
                    pc[a] = 0.25 * (s + e + w + nn[a]);
                    pu[a] = (nn[a] - e + w - s) * inv_2h;
                    pv[a] = (nn[a] - w + e - s) * inv_2h;
                }
                rhs(u_c, v_c, pc.data(), pu.data(), pv.data(), g.data());
            };
            auto diamond = [&](std::size_t a) {
                return prev[a * rows + i + 1] + cur[a * rows + i] - prev[a * rows + i];
            };
            for (std::size_t a = 0; a < n; ++a) north[a] = diamond(a);
            centre(north);
            for (std::size_t a = 0; a < n; ++a) north[a] = diamond(a) + h2 * g[a];
            centre(north);
            const double r_n = grid.r(i + 1, j + 1);
            bool bad = false;
            for (std::size_t a = 0; a < n; ++a) {
                const double val = diamond(a) + h2 * g[a];
                cur[a * rows + i + 1] = val;
                const double phi = std::abs(val) / r_n;
                const double du = std::abs(pu[a]), dv = std::abs(pv[a]);
                if (!(phi <= thr) || !(du <= thr) || !(dv <= thr)) {
                    bad = true;
                    continue;
                }
                stats.max_phi = std::max(stats.max_phi, phi);
                stats.max_psi_u = std::max(stats.max_psi_u, du);
                stats.max_psi_v = std::max(stats.max_psi_v, dv);
            }
            ++stats.cells;
            if (bad) {
                // Keep column j + 1 up to the last good row.
                grid.mark_blowup(grid.u(i + 1), grid.v(j + 1));
                store(cur, j + 1, i + 1);
                for (std::size_t k = 0; k < rows; ++k) grid.set_extent(k, k <= i ? j + 2 : j + 1);
                return grid;
            }
        }
        store(cur, j + 1, rows);
        std::swap(prev, cur);
    }
    for (std::size_t k = 0; k < rows; ++k) grid.set_extent(k, cols);
    return grid;
}

RadiationTrace radiation_trace(const CharacteristicGrid& grid, double u_fixed) {
    const auto row = grid.row_of(u_fixed);
    if (!row) throw std::invalid_argument("radiation_trace: u_fixed is not on a grid line");
    const std::size_t i = *row;
    const std::size_t last = grid.rows() - 1;
    if (grid.rows() < 3) throw std::invalid_argument("radiation_trace: need at least three rows");

    // Stencil rows and weights for d_u.
    std::size_t r0, r1, r2;
    double w0, w1, w2;
    if (i == 0) {
        r0 = 0, r1 = 1, r2 = 2, w0 = -1.5, w1 = 2.0, w2 = -0.5;
    } else if (i == last) {
        r0 = last, r1 = last - 1, r2 = last - 2, w0 = 1.5, w1 = -2.0, w2 = 0.5;
    } else {
        r0 = i - 1, r1 = i, r2 = i + 1, w0 = -0.5, w1 = 0.0, w2 = 0.5;
    }
    for (std::size_t k : {r0, r1, r2, i})
        if (!grid.has_row(k)) throw std::invalid_argument("radiation_trace: rows around u_fixed were not kept");
    const std::size_t extent = std::min({grid.extent(r0), grid.extent(r1), grid.extent(r2), grid.extent(i)});
    if (extent == 0) throw std::invalid_argument("radiation_trace: row u_fixed was never reached");

    const std::size_t n = grid.n_fields();
    RadiationTrace tr;
    tr.u_fixed = grid.u(i);
    tr.n_fields = n;
    tr.s.reserve(extent);
    tr.phi.reserve(extent * n);
    const double inv_h = 1.0 / grid.h();
    for (std::size_t j = 0; j < extent; ++j) {
        const double r = grid.r(i, j);
        tr.s.push_back(std::log(r));
        for (std::size_t a = 0; a < n; ++a) {
            const double du =
                (w0 * grid.psi(a, r0, j) + w1 * grid.psi(a, r1, j) + w2 * grid.psi(a, r2, j)) * inv_h;
            tr.phi.push_back(2.0 * du + grid.psi(a, i, j) / r);
        }
    }
    return tr;
}

TraceComparison compare_to_asymptotic(const RadiationTrace& trace, const AsymptoticSystem& sys, double s_start,
                                      const CompareOptions& options) {
    if (trace.n_fields != sys.n_fields()) throw DimensionError("compare_to_asymptotic: field counts differ");
    if (trace.size() < 3) throw std::invalid_argument("compare_to_asymptotic: trace too short");
    const auto begin = static_cast<std::size_t>(
        std::lower_bound(trace.s.begin(), trace.s.end(), s_start) - trace.s.begin());
    const double s_end = std::isnan(options.s_end) ? trace.s.back() : std::min(options.s_end, trace.s.back());
    if (begin >= trace.size() || !(s_end - trace.s[begin] >= options.min_window))
        throw std::invalid_argument("compare_to_asymptotic: trace shorter than the comparison window");
    const std::size_t end =
        static_cast<std::size_t>(std::upper_bound(trace.s.begin(), trace.s.end(), s_end) - trace.s.begin());

    const std::size_t n = trace.n_fields;
    const double s0 = trace.s[begin];
    TraceComparison out;
    out.s_start = s0;
    out.s_end = trace.s[end - 1];
    out.s_at_sup = s0;

    IntegrateOptions io = options.integrate;
    io.checkpoints.clear();
    for (std::size_t k = begin + 1; k < end; ++k) io.checkpoints.push_back(trace.s[k] - s0);
    const Trajectory ode = integrate(sys, trace.at(begin), out.s_end - s0, {}, io);

    double sup_trace = 0.0;
    for (std::size_t k = begin; k < end; ++k) sup_trace = std::max(sup_trace, max_norm(trace.at(k)));
    out.scale = options.epsilon + sup_trace;

    Vector a_phi(n);
    for (std::size_t k = begin; k < end; ++k) {
        const double rel = trace.s[k] - s0;
        const auto idx = ode.find(k == begin ? 0.0 : rel);
        out.s.push_back(trace.s[k]);
        double dev = std::numeric_limits<double>::infinity();
        if (idx) {
            const auto y = ode.phi(*idx);
            dev = 0.0;
            for (std::size_t a = 0; a < n; ++a) {
                dev = std::max(dev, std::abs(trace.at(k)[a] - y[a]));
                out.ode_phi.push_back(y[a]);
            }
            dev = out.scale > 0.0 ? dev / out.scale : dev;
        } else {
            // ODE stopped early (blow-up); the trace did not.
            for (std::size_t a = 0; a < n; ++a) out.ode_phi.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        out.deviation.push_back(dev);
        if (dev > out.sup_deviation) {
            out.sup_deviation = dev;
            out.s_at_sup = trace.s[k];
        }

        // Residual of the trace itself, differenced along the whole trace.
        const std::size_t lo = k > 0 ? k - 1 : k, hi = k + 1 < trace.size() ? k + 1 : k;
        const double ds = trace.s[hi] - trace.s[lo];
        sys.rhs(trace.at(k), a_phi);
        double res = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            const double d = (trace.at(hi)[a] - trace.at(lo)[a]) / ds;
            res = std::max(res, std::abs(d - a_phi[a]));
        }
        out.residual.push_back(res);
    }
    return out;
}

HamiltonianDrift hamiltonian_drift(const RadiationTrace& trace, const QuadraticHamiltonian& ham, double tail_window) {
    if (trace.n_fields != ham.dim()) throw DimensionError("hamiltonian_drift: trace and form dimensions differ");
    HamiltonianDrift out;
    out.tail_window = tail_window;
    out.s = trace.s;
    out.h.reserve(trace.size());
    for (std::size_t k = 0; k < trace.size(); ++k) out.h.push_back(ham.form().bilinear(trace.at(k), trace.at(k)));
    if (trace.size() == 0) return out;

    const double cut = trace.s.back() - tail_window;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    std::size_t cnt = 0;
    for (std::size_t k = 0; k < trace.size(); ++k) {
        if (trace.s[k] < cut) continue;
        lo = std::min(lo, out.h[k]);
        hi = std::max(hi, out.h[k]);
        sum += out.h[k];
        ++cnt;
    }
    out.tail_mean = sum / static_cast<double>(cnt);
    out.tail_oscillation = hi - lo;
    out.relative_oscillation = out.tail_oscillation == 0.0 ? 0.0 : out.tail_oscillation / std::abs(out.tail_mean);

    // |dH/ds| on a uniform s-grid of 64 intervals to keep the fit insensitive
    // to the sample density, which grows like e^s.
    constexpr std::size_t kBins = 64;
    const double s_lo = trace.s.front(), s_hi = trace.s.back();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    if (s_hi > s_lo) {
        auto h_at = [&](double s) {
            const auto it = std::lower_bound(trace.s.begin(), trace.s.end(), s);
            return out.h[static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - trace.s.begin(),
                                                                          static_cast<std::ptrdiff_t>(trace.size() - 1)))];
        };
        const double ds = (s_hi - s_lo) / kBins;
        for (std::size_t b = 0; b < kBins; ++b) {
            const double s = s_lo + (static_cast<double>(b) + 0.5) * ds;
            const double d = std::abs(h_at(s + 0.5 * ds) - h_at(s - 0.5 * ds)) / ds;
            if (!(d > 0.0)) continue;
            const double y = std::log(d);
            sx += s, sy += y, sxx += s * s, sxy += s * y;
            ++m;
        }
    }
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    out.decay_rate = (m >= 2 && denom > 0.0) ? (static_cast<double>(m) * sxy - sx * sy) / denom
                                             : std::numeric_limits<double>::quiet_NaN();
    return out;
}

}  // namespace wnlab
