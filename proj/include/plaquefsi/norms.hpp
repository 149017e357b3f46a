#pragma once

#include "plaquefsi/fe.hpp"

#include <span>
#include <vector>

namespace plaquefsi {

/// Field snapshots on a uniform time grid t_0 = 0 < ... < t_N = T.
template <class T>
struct Trajectory {
    std::vector<double> times;
    std::vector<T> snapshots;

    [[nodiscard]] int num_steps() const { return static_cast<int>(times.size()) - 1; }
    [[nodiscard]] double dt() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
    [[nodiscard]] double final_time() const { return times.empty() ? 0.0 : times.back(); }
};

/// Uniform grid with N steps of size T / N.
std::vector<double> uniform_time_grid(double final_time, int steps);

enum class NormKind { Lebesgue, Sobolev, SlobodeckijSeminorm, Anisotropic };

/// Spatial index s in [0, 2], integrability q > 1, temporal index r in [0, 1].
struct NormSpec {
    double s = 0.0;
    double q = 2.0;
    double r = 0.0;
    NormKind kind = NormKind::Lebesgue;

    void validate() const;
};

/// (int |f|^q)^{1/q} with |.| the Euclidean norm of the components.
double lq_norm(const Field& f, double q);
/// W^s_q norm for s in [0, 2]: integer orders use broken derivatives,
/// fractional orders add the Slobodeckij seminorm of the next-lower derivative.
double sobolev_norm(const Field& f, double s, double q);

/// Slobodeckij seminorm of order s in (0, 1) from cell values, midpoint rule
/// over pairs of distinct cells:
///   ( sum_{K != K'} |f_K - f_K'|^q / |x_K - x_K'|^{d + s q} |K| |K'| )^{1/q}.
/// `values` holds one row per cell, one column per component.
double slobodeckij_seminorm(std::span<const Vec2> barycenters, std::span<const double> measures,
                            const Eigen::MatrixXd& values, double s, double q);

/// Field version: values at cell barycentres of the field's space.
double slobodeckij_seminorm(const Field& f, double s, double q);

/// Temporal Slobodeckij seminorm of order r of the L^q(space)-valued
/// function t -> f(t), with trapezoid weights on the time grid.
double temporal_seminorm(const Trajectory<Field>& w, double r, double q, double spatial_s = 0.0);

/// Discrete norm of a trajectory as selected by `spec`:
///   LEBESGUE    (sum_k w_k ||f_k||_{L^q}^q)^{1/q}
///   SOBOLEV     (sum_k w_k ||f_k||_{W^s_q}^q)^{1/q}
///   SLOBODECKIJ temporal seminorm of order r with values in L^q
///   ANISOTROPIC max(SOBOLEV, SLOBODECKIJ): surrogate of
///               W^r_q(0,T; L^q) cap L^q(0,T; W^s_q).
/// w_k are trapezoid weights, so the value is monotone under truncation.
double trajectory_norm(const Trajectory<Field>& w, const NormSpec& spec);
double trajectory_norm(const Trajectory<TwoSidedField>& w, const NormSpec& spec);

/// Trapezoid weights of a time grid.
std::vector<double> trapezoid_weights(std::span<const double> times);

}  // namespace plaquefsi
