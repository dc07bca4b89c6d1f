#include "chemostat/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chemostat/csv.hpp"
#include "chemostat/util.hpp"

namespace chemostat {

namespace {

// Dormand-Prince 5(4) tableau
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// step controller constants (Hairer's dopri5 defaults)
constexpr double kSafe = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo1 = 0.2 - kBeta * 0.75;
constexpr double kMaxShrink = 5.0;   // h may shrink at most by this factor
constexpr double kMaxGrow = 10.0;    // and grow at most by this one

// y = (x_1, ..., x_n, s)
void eval_rhs(const ChemostatModel& model, const std::vector<double>& y,
              std::vector<double>& f) {
    const std::size_t n = model.species_count();
    const double s = y[n];
    const double u = model.u();
    double consumption = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mu = model.kinetics().rate(i, s);
        f[i] = (mu - u) * y[i];
        consumption += mu * y[i];
    }
    const double eps = model.epsilon();
    if (n > 1 && eps > 0.0) {
        f[0] += eps * (y[1] - y[0]);
        for (std::size_t i = 1; i + 1 < n; ++i) f[i] += eps * (y[i - 1] - 2.0 * y[i] + y[i + 1]);
        f[n - 1] += eps * (y[n - 2] - y[n - 1]);
    }
    f[n] = -consumption + u * (1.0 - s);
}

double error_norm(const std::vector<double>& err, const std::vector<double>& y0,
                  const std::vector<double>& y1, double tol) {
    double sum = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double sc = tol + tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double q = err[i] / sc;
        sum += q * q;
    }
    return std::sqrt(sum / static_cast<double>(err.size()));
}

double initial_step(const ChemostatModel& model, const std::vector<double>& y0,
                    const std::vector<double>& f0, double tol, double hmax) {
    const std::size_t dim = y0.size();
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double sc = tol + tol * std::abs(y0[i]);
        d0 += (y0[i] / sc) * (y0[i] / sc);
        d1 += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / dim);
    d1 = std::sqrt(d1 / dim);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, hmax);

    std::vector<double> y1(dim), f1(dim);
    for (std::size_t i = 0; i < dim; ++i) y1[i] = y0[i] + h0 * f0[i];
    eval_rhs(model, y1, f1);
    double d2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double sc = tol + tol * std::abs(y0[i]);
        const double q = (f1[i] - f0[i]) / sc;
        d2 += q * q;
    }
    d2 = std::sqrt(d2 / dim) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = (dmax <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                      : std::pow(0.01 / dmax, 0.2);
    return std::min({100.0 * h0, h1, hmax});
}

}  // namespace

double Trajectory::max_mass_balance_error() const {
    double m = 0.0;
    for (double e : mass_balance_error) m = std::max(m, e);
    return m;
}

std::size_t Trajectory::first_index_at_or_after(double t) const {
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    return static_cast<std::size_t>(it - times.begin());
}

Trajectory integrate(const ChemostatModel& model, const State& initial, double horizon,
                     const IntegrateOptions& opts) {
    const std::size_t n = model.species_count();
    validate_state(initial, n);
    if (!(horizon > 0.0)) throw std::invalid_argument("integrate: horizon must be positive");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("integrate: tol must be positive");

    const double tol = opts.tol;
    const double hmax = opts.max_step > 0.0 ? opts.max_step : horizon / 10.0;
    const double hmin = 1e-14 * horizon;
    const double u = model.u();
    const std::size_t dim = n + 1;

    std::vector<double> y(dim), ynew(dim), ystage(dim), errv(dim);
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
    for (std::size_t i = 0; i < n; ++i) y[i] = initial.x[i];
    y[n] = initial.s;

    Trajectory traj;
    traj.b0 = initial.total_mass();

    auto record = [&](double t, const std::vector<double>& yy) {
        State st;
        st.x.assign(yy.begin(), yy.begin() + n);
        st.s = yy[n];
        double b = st.total_mass();
        const double bref = (u > 0.0) ? 1.0 + (traj.b0 - 1.0) * std::exp(-u * t) : traj.b0;
        double mn = yy[0];
        for (std::size_t i = 1; i < n; ++i) mn = std::min(mn, yy[i]);
        traj.times.push_back(t);
        traj.states.push_back(std::move(st));
        traj.mass_balance_error.push_back(std::abs(b - bref));
        traj.min_species.push_back(mn);
    };

    record(0.0, y);
    eval_rhs(model, y, k1);

    double t = 0.0;
    double h = initial_step(model, y, k1, tol, hmax);
    double facold = 1e-4;
    bool rejected = false;

    while (t < horizon) {
        h = std::min(h, horizon - t);
        if (h < hmin)
            throw IntegrationError("integrate: step size underflow at t = " + std::to_string(t),
                                   t);

        for (std::size_t i = 0; i < dim; ++i) ystage[i] = y[i] + h * a21 * k1[i];
        eval_rhs(model, ystage, k2);
        for (std::size_t i = 0; i < dim; ++i)
            ystage[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        eval_rhs(model, ystage, k3);
        for (std::size_t i = 0; i < dim; ++i)
            ystage[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        eval_rhs(model, ystage, k4);
        for (std::size_t i = 0; i < dim; ++i)
            ystage[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        eval_rhs(model, ystage, k5);
        for (std::size_t i = 0; i < dim; ++i)
            ystage[i] =
                y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        eval_rhs(model, ystage, k6);
        for (std::size_t i = 0; i < dim; ++i)
            ynew[i] =
                y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        eval_rhs(model, ynew, k7);  // FSAL
        for (std::size_t i = 0; i < dim; ++i)
            errv[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                           e7 * k7[i]);

        // positivity guard before the error test
        double mn = ynew[0];
        for (std::size_t i = 1; i < n; ++i) mn = std::min(mn, ynew[i]);
        const double s_new = ynew[n];
        if (mn < -10.0 * tol || s_new < -10.0 * tol || s_new > 1.0 + 10.0 * tol) {
            h *= 0.5;
            rejected = true;
            continue;
        }

        const double err = error_norm(errv, y, ynew, tol);
        const double fac11 = std::pow(err, kExpo1);
        if (err <= 1.0) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);
            record(t, y);

            double fac = fac11 / std::pow(facold, kBeta);
            fac = std::max(1.0 / kMaxGrow, std::min(kMaxShrink, fac / kSafe));
            double hnew = h / fac;
            if (rejected) hnew = std::min(hnew, h);
            h = std::min(hnew, hmax);
            facold = std::max(err, 1e-4);
            rejected = false;

            if (opts.adaptive_stop) {
                const double rate = norm_inf(std::span<const double>(k1.data(), dim));
                if (rate < tol / 10.0 && traj.mass_balance_error.back() <= 100.0 * tol) break;
            }
        } else {
            rejected = true;
            h = h / std::min(kMaxShrink, fac11 / kSafe);
        }
    }
    return traj;
}

ConvergenceReport convergence_check(const Trajectory& trajectory, const Equilibrium& target,
                                    double tol) {
    if (trajectory.times.empty()) throw std::invalid_argument("convergence_check: empty trajectory");
    ConvergenceReport rep;
    const std::size_t count = trajectory.times.size();
    auto dist = [&](std::size_t k) {
        const State& st = trajectory.states[k];
        double d = std::abs(st.s - target.s);
        for (std::size_t i = 0; i < st.x.size(); ++i)
            d = std::max(d, std::abs(st.x[i] - target.x[i]));
        return d;
    };
    rep.final_distance = dist(count - 1);

    // earliest sample from which the distance never exceeds tol again
    std::size_t start = count;
    for (std::size_t k = count; k-- > 0;) {
        if (dist(k) < tol)
            start = k;
        else
            break;
    }
    if (start == count) return rep;  // never settled
    const double span = trajectory.times.back() - trajectory.times.front();
    const double held = trajectory.times.back() - trajectory.times[start];
    rep.time_to_tol = trajectory.times[start];
    rep.converged = held >= 0.1 * span;
    return rep;
}

PersistenceMetrics persistence_metrics(const Trajectory& trajectory, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw std::invalid_argument("persistence_metrics: tail_fraction must be in (0,1)");
    if (trajectory.times.empty())
        throw std::invalid_argument("persistence_metrics: empty trajectory");
    const double t0 = trajectory.times.front();
    const double t1 = trajectory.times.back();
    PersistenceMetrics m;
    m.tail_begin = t1 - tail_fraction * (t1 - t0);
    const std::size_t from = trajectory.first_index_at_or_after(m.tail_begin);
    const std::size_t n = trajectory.states.front().x.size();
    m.per_species_floor.assign(n, std::numeric_limits<double>::infinity());
    m.biomass_floor = std::numeric_limits<double>::infinity();
    m.substrate_min = std::numeric_limits<double>::infinity();
    m.substrate_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = from; k < trajectory.states.size(); ++k) {
        const State& st = trajectory.states[k];
        double biomass = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            m.per_species_floor[i] = std::min(m.per_species_floor[i], st.x[i]);
            biomass += st.x[i];
        }
        m.biomass_floor = std::min(m.biomass_floor, biomass);
        m.substrate_min = std::min(m.substrate_min, st.s);
        m.substrate_max = std::max(m.substrate_max, st.s);
    }
    return m;
}

BatchModeReport batch_mode_check(const ChemostatModel& model, const State& initial,
                                 double horizon, const IntegrateOptions& opts) {
    if (model.u() != 0.0) throw std::invalid_argument("batch_mode_check: requires u = 0");
    if (!(model.epsilon() > 0.0))
        throw std::invalid_argument("batch_mode_check: requires epsilon > 0");
    const std::size_t n = model.species_count();
    validate_state(initial, n);

    BatchModeReport rep;
    const double b0 = initial.total_mass();
    rep.predicted_x.assign(n, b0 / static_cast<double>(n));
    rep.predicted_s = 0.0;

    const Trajectory traj = integrate(model, initial, horizon, opts);
    rep.final = traj.final_state();
    rep.mass_drift = traj.max_mass_balance_error();
    rep.distance = std::abs(rep.final.s - rep.predicted_s);
    for (std::size_t i = 0; i < n; ++i)
        rep.distance = std::max(rep.distance, std::abs(rep.final.x[i] - rep.predicted_x[i]));
    return rep;
}

State sample_initial_condition(std::size_t n, SplitMix64& rng, bool off_manifold) {
    std::vector<double> p(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double g = -std::log(1.0 - rng.uniform01());
        if (g < 1e-12) g = 1e-12;
        p[i] = g;
        total += g;
    }
    for (double& c : p) c /= total;

    const double floor = 1e-3;
    const double reserved = floor * static_cast<double>(n);
    State st;
    st.x.resize(n);
    if (!off_manifold) {
        const double mass = rng.uniform(std::max(0.2, 2.0 * reserved), 0.99);
        for (std::size_t i = 0; i < n; ++i) st.x[i] = floor + (mass - reserved) * p[i];
        st.s = 1.0 - mass;
    } else {
        const double b0 = rng.uniform(0.5, 1.5);
        const double s_hi = std::min(0.95, b0 - 2.0 * reserved - 0.05);
        st.s = rng.uniform(0.05, std::max(0.06, s_hi));
        const double mass = b0 - st.s;
        for (std::size_t i = 0; i < n; ++i) st.x[i] = floor + (mass - reserved) * p[i];
    }
    return st;
}

void write_trajectory_csv(const std::filesystem::path& file, const Trajectory& trajectory) {
    const std::size_t n = trajectory.states.empty() ? 0 : trajectory.states.front().x.size();
    std::vector<std::string> cols = {"t"};
    for (std::size_t i = 1; i <= n; ++i) cols.push_back("x_" + std::to_string(i));
    cols.push_back("s");
    cols.push_back("b_err");
    csv::Table table(file, cols);
    for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
        std::vector<std::string> fields;
        fields.reserve(cols.size());
        fields.push_back(csv::field(trajectory.times[k]));
        for (std::size_t i = 0; i < n; ++i) fields.push_back(csv::field(trajectory.states[k].x[i]));
        fields.push_back(csv::field(trajectory.states[k].s));
        fields.push_back(csv::field(trajectory.mass_balance_error[k]));
        table.add_row(fields);
    }
    table.close();
}

void write_ensemble_csv(const std::filesystem::path& file, std::size_t species_count,
                        std::span<const EnsembleRow> rows) {
    std::vector<std::string> cols = {"seed", "converged", "final_dist", "time_to_tol"};
    for (std::size_t i = 1; i <= species_count; ++i) cols.push_back("floor_" + std::to_string(i));
    csv::Table table(file, cols);
    for (const EnsembleRow& row : rows) {
        std::vector<std::string> fields;
        fields.reserve(cols.size());
        fields.push_back(csv::field(row.seed));
        fields.push_back(row.converged ? "1" : "0");
        fields.push_back(csv::field(row.final_dist));
        fields.push_back(csv::field(row.time_to_tol));
        for (std::size_t i = 0; i < species_count; ++i) fields.push_back(csv::field(row.floors[i]));
        table.add_row(fields);
    }
    table.close();
}

}  // namespace chemostat
