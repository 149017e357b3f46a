#include "plaquefsi/coupling.hpp"

#include "plaquefsi/kinematics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace plaquefsi {

namespace {

const Mat2 kI = Mat2::Identity();

Field minus(const Field& a, const Field& b)
{
    Field r = a;
    r.values -= b.values;
    return r;
}

/// I_0 = offset, I_n = I_{n-1} + dt/2 (f_{n-1} + f_n).
std::vector<Field> cumulative_integral(const std::vector<Field>& f, const std::vector<double>& t,
                                       const Field& offset)
{
    std::vector<Field> out;
    out.reserve(f.size());
    out.push_back(offset);
    for (std::size_t n = 1; n < f.size(); ++n) {
        Field next = out.back();
        next.values += 0.5 * (t[n] - t[n - 1]) * (f[n - 1].values + f[n].values);
        out.push_back(std::move(next));
    }
    return out;
}

std::vector<Field> solid_concentrations(const Trajectory<TwoSidedField>& c)
{
    std::vector<Field> out;
    out.reserve(c.snapshots.size());
    for (const auto& s : c.snapshots) {
        out.push_back(s.solid);
    }
    return out;
}

/// int psi (Finv^T : grad v) for the P1 test functions of `p` (Finv empty
/// means the identity).
Eigen::VectorXd weak_divergence(const Field& v, const Space& p, const QpData<Mat2>& Finv)
{
    Eigen::VectorXd r = Eigen::VectorXd::Zero(p.num_dofs());
    CellValues cv(*v.space, triangle_rule());
    CellValues pv(p, triangle_rule());
    for (int k = 0; k < v.space->num_cells(); ++k) {
        cv.reinit(k);
        pv.reinit(k);
        for (int q = 0; q < cv.num_points(); ++q) {
            const Mat2 G = cv.vector_gradient(v, q);
            const double div = Finv.empty() ? G.trace() : Finv(k, q).transpose().cwiseProduct(G).sum();
            for (int a = 0; a < pv.num_basis(); ++a) {
                r[pv.dofs()[static_cast<std::size_t>(a)]] += cv.JxW(q) * pv.shape(q, a) * div;
            }
        }
    }
    return r;
}

double lumped_l2(const Eigen::VectorXd& dual, const Eigen::VectorXd& lumped)
{
    return std::sqrt((dual.array().square() / lumped.array()).sum());
}

/// L2(Gamma) norm of facet quadrature data.
double facet_norm(const Space& space, const FacetQpData<double>& f)
{
    double acc = 0.0;
    for (int i = 0; i < f.size(); ++i) {
        for (int q = 0; q < f.num_points; ++q) {
            acc += facet_point(space, f.facets[static_cast<std::size_t>(i)], q).weight * f(i, q) * f(i, q);
        }
    }
    return std::sqrt(acc);
}

struct WindowStart {
    InitialData data;
    Field uf_offset;      // fluid displacement at the window start
    Field growth_offset;  // int_0^t c_s at the window start
};

WindowStart initial_window(const CoupledProblem& problem, const InitialData& w0)
{
    return {w0, Field(problem.disc().vf, 2), Field(problem.disc().ps, 1)};
}

struct SnapshotRef {
    const Field& vf;
    const Field& us;
    const Field& pf;
    const Field& ps;
    const TwoSidedField& c;
    const Field& cstar;
    const Field& g;
    const Field& uf;
    const Field& growth;
};

RhsTerms evaluate_terms(const CoupledProblem& problem, const InitialData& ref, const SnapshotRef& s)
{
    const Discretization& disc = problem.disc();
    const ModelParams& prm = problem.params();
    const CellsParams& cp = prm.cells;
    const EnergyDensity<2>& W = problem.energy();
    const int d = cp.dim;
    RhsTerms t;

    // Fluid: Piola flux J F^{-T} T with J = 1 minus the Stokes flux.
    {
        const QpData<Mat2> F = deformation_gradient(s.uf);
        const InverseGradient inv = invert_F(*disc.vf, F);
        const QpData<Mat2> Gv = gradient_at_qp(s.vf);
        const QpData<double> pi = values_at_qp(s.pf);
        const QpData<Vec2> gc = scalar_gradient_at_qp(s.c.fluid);
        const int nc = disc.vf->num_cells();
        const int nq = Gv.num_points;
        t.Kf = QpData<Mat2>(nc, nq, Mat2::Zero());
        t.Gf = QpData<double>(nc, nq, 0.0);
        t.Ftf = QpData<Vec2>(nc, nq, Vec2::Zero());
        const double nu = prm.nu_f;
        for (int k = 0; k < nc; ++k) {
            for (int q = 0; q < nq; ++q) {
                const Mat2& Fi = inv.Finv(k, q);
                const Mat2 FiT = Fi.transpose();
                const Mat2 A = FiT - kI;
                const Mat2& G = Gv(k, q);
                const Mat2 visc = nu * (Fi * G + G.transpose() * FiT);
                t.Kf(k, q) = -pi(k, q) * A + A * visc + nu * ((Fi - kI) * G + G.transpose() * A);
                t.Gf(k, q) = -A.cwiseProduct(G).sum();
                t.Ftf(k, q) = cp.Df * (FiT * Fi - kI) * gc(k, q);
            }
        }
    }

    // Solid: Piola flux -g^d pi F^{-T} + g^{d-1} DW(F/g) minus the linear flux.
    {
        const QpData<Mat2> F = deformation_gradient(s.us);
        const InverseGradient inv = invert_F(*disc.us, F);
        const QpData<Mat2> Gu = gradient_at_qp(s.us);
        const QpData<double> pi = values_at_qp(s.ps);
        const QpData<double> g = values_at_qp(s.g);
        const QpData<double> g0 = values_at_qp(ref.g0);
        const QpData<double> c = values_at_qp(s.c.solid);
        const QpData<Vec2> gc = scalar_gradient_at_qp(s.c.solid);
        const QpData<Vec2> gg = scalar_gradient_at_qp(s.g);
        t.growth = values_at_qp(s.growth);
        const int nc = disc.us->num_cells();
        const int nq = Gu.num_points;
        t.Ks = QpData<Mat2>(nc, nq, Mat2::Zero());
        t.Gs = QpData<double>(nc, nq, 0.0);
        t.Fts = QpData<Vec2>(nc, nq, Vec2::Zero());
        t.F1s = QpData<double>(nc, nq, 0.0);
        QpData<Mat2> phi(nc, nq, Mat2::Zero());
        for (int k = 0; k < nc; ++k) {
            for (int q = 0; q < nq; ++q) {
                const double gk = g(k, q);
                if (!(gk > 0.0)) {
                    throw InvariantViolation(
                        fmt::format("growth metric g = {:.6g} <= 0 in mesh cell {}", gk, disc.us->cells()[k]));
                }
                const Mat2& Fk = F(k, q);
                const Mat2& Fi = inv.Finv(k, q);
                const Mat2 FiT = Fi.transpose();
                const Mat2 A = FiT - kI;
                const double p = pi(k, q);
                const double gd = std::pow(gk, d);
                const double gd1 = std::pow(gk, d - 1);
                const double g0d = std::pow(g0(k, q), d);
                const double g0d1 = std::pow(g0(k, q), d - 1);
                const Mat2 DWF = W.dw(Fk);
                const Mat2 DWFg = W.dw(Fk / gk);
                t.Ks(k, q) = -gd * p * A - (gd - g0d) * p * kI - (g0d - 1.0) * p * kI + DWF * (gd1 - g0d1) +
                             DWF * (g0d1 - 1.0) - gd1 * (DWF - DWFg) + W.remainder_R(Fk);
                t.Gs(k, q) = -A.cwiseProduct(Gu(k, q)).sum();
                phi(k, q) = W.d2w_identity(Gu(k, q)) - p * kI + t.Ks(k, q);
                const Mat2 AA = FiT * Fi;
                t.Fts(k, q) = cp.Ds * (AA - kI) * gc(k, q);
                const double ck = c(k, q);
                t.F1s(k, q) = -cp.beta * ck * (1.0 + cp.gamma * ck / cp.rho_s) +
                              d * (gg(k, q) / gk).dot(cp.Ds * AA * gc(k, q));
            }
        }
        // Interface load of the fluid: int_Gamma (Phi_s^T n) . phi = -int_{solid} Phi_s : grad(phi_ext).
        Eigen::VectorXd rs = Eigen::VectorXd::Zero(2 * disc.us->num_dofs());
        add_flux_load(*disc.us, phi, 1.0, rs);
        t.Hf = Eigen::VectorXd::Zero(2 * disc.vf->num_dofs());
        for (const auto& [f, sd] : problem.interface_pairs()) {
            t.Hf[2 * f] = -rs[2 * sd];
            t.Hf[2 * f + 1] = -rs[2 * sd + 1];
        }
    }

    t.F2 = problem.cells().interface_exchange(s.c);
    OdeLinearization lin = ode_linearization({s.cstar, s.g}, {ref.cstar0, ref.g0}, s.c.solid, cp);
    t.F4 = std::move(lin.F4);
    t.F5 = std::move(lin.F5);
    return t;
}

/// u_s^0 on the interface plus the time integral of the fluid velocity.
Field interface_displacement(const CoupledProblem& problem, const Field& us0, const Field& uf_from_start)
{
    Field h(problem.disc().us, 2);
    for (const auto& [f, s] : problem.interface_pairs()) {
        h.at(s, 0) = us0.at(s, 0) + uf_from_start.at(f, 0);
        h.at(s, 1) = us0.at(s, 1) + uf_from_start.at(f, 1);
    }
    return h;
}

std::vector<double> window_times(double t0, int steps, double dt)
{
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) {
        t[static_cast<std::size_t>(i)] = t0 + i * dt;
    }
    return t;
}

std::vector<RhsTerms> all_terms(const CoupledProblem& problem, const StateW& w, const InitialData& ref,
                                const WindowStart& start, int first)
{
    const auto& times = w.times();
    const std::vector<Field> uf = cumulative_integral(w.vf.snapshots, times, start.uf_offset);
    const std::vector<Field> growth = cumulative_integral(solid_concentrations(w.c), times, start.growth_offset);
    const Field zero_uf(problem.disc().vf, 2);
    const std::vector<Field> uf_window = cumulative_integral(w.vf.snapshots, times, zero_uf);
    std::vector<RhsTerms> out(times.size());
    for (std::size_t n = static_cast<std::size_t>(first); n < times.size(); ++n) {
        const SnapshotRef s{w.vf.snapshots[n], w.us.snapshots[n], w.pf.snapshots[n], w.ps.snapshots[n],
                            w.c.snapshots[n],  w.cstar.snapshots[n], w.g.snapshots[n], uf[n], growth[n]};
        out[n] = evaluate_terms(problem, ref, s);
        out[n].Hs1 = interface_displacement(problem, start.data.us0, uf_window[n]);
    }
    return out;
}

StateW constant_window(const InitialData& s, const std::vector<double>& times)
{
    StateW w;
    auto fill = [&](Trajectory<Field>& tr, const Field& f) {
        tr.times = times;
        tr.snapshots.assign(times.size(), f);
    };
    fill(w.vf, s.vf0);
    fill(w.us, s.us0);
    fill(w.pf, s.pf0);
    fill(w.ps, s.ps0);
    fill(w.cstar, s.cstar0);
    fill(w.g, s.g0);
    w.c.times = times;
    w.c.snapshots.assign(times.size(), s.c0);
    return w;
}

/// Rest state (zero fields, growth metric of the data): every nonlinear term
/// vanishes there, so mapping it solves the linear problem driven by the
/// initial data alone.
StateW zero_like_window(const InitialData& s, const std::vector<double>& times)
{
    InitialData z = s;
    z.vf0.values.setZero();
    z.us0.values.setZero();
    z.pf0.values.setZero();
    z.ps0.values.setZero();
    z.c0.fluid.values.setZero();
    z.c0.solid.values.setZero();
    z.cstar0.values.setZero();
    return constant_window(z, times);
}

StateW map_window(const CoupledProblem& problem, const StateW& w, const InitialData& ref, const WindowStart& start)
{
    const auto& times = w.times();
    const std::size_t N = times.size();
    std::vector<RhsTerms> terms = all_terms(problem, w, ref, start, 1);
    const InitialData& s0 = start.data;
    const CellsParams& cp = problem.params().cells;

    StateW out;
    for (auto* tr : {&out.vf, &out.us, &out.pf, &out.ps, &out.cstar, &out.g}) {
        tr->times = times;
        tr->snapshots.reserve(N);
    }
    out.c.times = times;
    out.c.snapshots.reserve(N);

    // Fluid over all steps.
    out.vf.snapshots.push_back(s0.vf0);
    out.pf.snapshots.push_back(s0.pf0);
    for (std::size_t n = 1; n < N; ++n) {
        StokesStepData d;
        d.flux = std::move(terms[n].Kf);
        d.divergence = std::move(terms[n].Gf);
        d.load = std::move(terms[n].Hf);
        StokesStep step = problem.fluid().solve_step(out.vf.snapshots.back(), d);
        out.vf.snapshots.push_back(std::move(step.velocity));
        out.pf.snapshots.push_back(std::move(step.pressure));
    }

    // Solid per step, interface displacement from the new fluid velocity.
    const Field zero_uf(problem.disc().vf, 2);
    const std::vector<Field> uf_new = cumulative_integral(out.vf.snapshots, times, zero_uf);
    const double coef = cp.gamma * cp.beta / cp.rho_s;
    out.us.snapshots.push_back(s0.us0);
    out.ps.snapshots.push_back(s0.ps0);
    for (std::size_t n = 1; n < N; ++n) {
        ElasticStepData d;
        d.flux = std::move(terms[n].Ks);
        d.divergence = std::move(terms[n].Gs);
        d.growth_integral = std::move(terms[n].growth);
        d.growth_coefficient = coef;
        d.boundary_displacement = interface_displacement(problem, s0.us0, uf_new[n]);
        ElasticSolution sol = problem.solid().solve(d);
        out.us.snapshots.push_back(std::move(sol.displacement));
        out.ps.snapshots.push_back(std::move(sol.pressure));
    }

    // Concentrations with the lagged interface exchange.
    out.c.snapshots.push_back(s0.c0);
    for (std::size_t n = 1; n < N; ++n) {
        ConcentrationStepData d;
        d.flux_f = std::move(terms[n].Ftf);
        d.flux_s = std::move(terms[n].Fts);
        d.source_s = std::move(terms[n].F1s);
        d.interface_flux = std::move(terms[n].F2);
        out.c.snapshots.push_back(problem.cells().step(out.c.snapshots.back(), d));
    }

    // Pointwise ODEs with the new solid concentration.
    out.cstar.snapshots.push_back(s0.cstar0);
    out.g.snapshots.push_back(s0.g0);
    for (std::size_t n = 1; n < N; ++n) {
        const OdeState next = step_odes({out.cstar.snapshots.back(), out.g.snapshots.back()},
                                        out.c.snapshots[n].solid, cp, times[n] - times[n - 1]);
        out.cstar.snapshots.push_back(next.foam);
        out.g.snapshots.push_back(next.growth);
    }
    return out;
}

template <class T>
void append(Trajectory<T>& dst, const Trajectory<T>& src)
{
    const std::size_t skip = dst.times.empty() ? 0 : 1;
    for (std::size_t i = skip; i < src.times.size(); ++i) {
        dst.times.push_back(src.times[i]);
        dst.snapshots.push_back(src.snapshots[i]);
    }
}

void append_state(StateW& dst, const StateW& src)
{
    append(dst.vf, src.vf);
    append(dst.us, src.us);
    append(dst.pf, src.pf);
    append(dst.ps, src.ps);
    append(dst.c, src.c);
    append(dst.cstar, src.cstar);
    append(dst.g, src.g);
}

Trajectory<Field> difference(const Trajectory<Field>& a, const Trajectory<Field>& b)
{
    Trajectory<Field> d;
    d.times = a.times;
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
        d.snapshots.push_back(minus(a.snapshots[i], b.snapshots[i]));
    }
    return d;
}

}  // namespace

Discretization Discretization::build(double L, double Hf, double Hs, int n)
{
    Discretization d;
    d.L = L;
    d.Hf = Hf;
    d.Hs = Hs;
    d.n = n;
    d.mesh = std::make_shared<const Mesh>(build_strip_mesh(L, Hf, Hs, n));
    d.vf = std::make_shared<const Space>(d.mesh, 2, Subdomain::Fluid);
    d.pf = std::make_shared<const Space>(d.mesh, 1, Subdomain::Fluid);
    d.us = std::make_shared<const Space>(d.mesh, 2, Subdomain::Solid);
    d.ps = std::make_shared<const Space>(d.mesh, 1, Subdomain::Solid);
    return d;
}

void ModelParams::validate() const
{
    if (!(rho_f > 0.0) || !(nu_f > 0.0) || !(mu > 0.0)) {
        throw InvalidArgument(
            fmt::format("ModelParams: rho_f, nu_f, mu must be positive (got {}, {}, {})", rho_f, nu_f, mu));
    }
    cells.validate();
}

CoupledProblem::CoupledProblem(Discretization disc, const ModelParams& params, double dt)
    : disc_(std::move(disc)),
      params_((params.validate(), params)),
      energy_(params.mu, params.energy),
      dt_(dt),
      fluid_(disc_.vf, disc_.pf, params.rho_f, params.nu_f, dt),
      solid_(disc_.us, disc_.ps, energy_, 0.0),
      cells_(disc_.pf, disc_.ps, params.cells, dt, false)
{
    for (int f : disc_.vf->boundary_dofs(FacetTag::Interface)) {
        const int s = disc_.us->dof_of_key(disc_.vf->node_key(f));
        if (s < 0) {
            throw InvalidArgument("CoupledProblem: unmatched interface node");
        }
        interface_pairs_.emplace_back(f, s);
    }
}

RawInitialData zero_initial(const Discretization& disc)
{
    RawInitialData r;
    r.vf0 = Field(disc.vf, 2);
    r.c0 = {Field(disc.pf, 1), Field(disc.ps, 1)};
    r.cstar0 = Field(disc.ps, 1);
    r.g0 = Field(disc.ps, 1);
    r.g0.values.setOnes();
    r.pf0 = Field(disc.pf, 1);
    return r;
}

InitialData prepare_initial(const Discretization& disc, const ModelParams& params, const RawInitialData& raw,
                            const PrepareOptions& opts)
{
    params.validate();
    const CellsParams& cp = params.cells;
    if (raw.vf0.space != disc.vf || raw.c0.fluid.space != disc.pf || raw.c0.solid.space != disc.ps ||
        raw.cstar0.space != disc.ps || raw.g0.space != disc.ps || raw.pf0.space != disc.pf) {
        throw InvalidArgument("prepare_initial: initial fields live on the wrong spaces");
    }
    if (raw.g0.values.minCoeff() < kMinGrowth) {
        throw InvalidArgument(fmt::format("prepare_initial: g0 must be >= 1/2 (min {})", raw.g0.values.minCoeff()));
    }

    // Compatibility conditions.
    const double tol = opts.compatibility_tol;
    auto fail = [&](const char* what, double value) {
        throw InvalidArgument(
            fmt::format("prepare_initial: compatibility condition violated: {} (residual {:.3e} > {:.1e})", what,
                        value, tol));
    };
    {
        const double div = lumped_l2(weak_divergence(raw.vf0, *disc.pf, {}), lumped_mass(*disc.pf));
        if (div > tol) {
            fail("div v_f0 = 0", div);
        }
        const double tr = facet_l2_norm(raw.vf0, FacetTag::Interface);
        if (tr > tol) {
            fail("v_f0 = 0 on the interface", tr);
        }
        const auto cf = scalar_on_facets(raw.c0.fluid, FacetTag::Interface);
        const auto cs = scalar_on_facets(raw.c0.solid, FacetTag::Interface);
        const auto gf = scalar_gradient_on_facets(raw.c0.fluid, FacetTag::Interface);
        const auto gs = scalar_gradient_on_facets(raw.c0.solid, FacetTag::Interface);
        FacetQpData<double> jump(cf.facets, cf.num_points, 0.0);
        FacetQpData<double> flux(cf.facets, cf.num_points, 0.0);
        for (std::size_t i = 0; i < cf.data.size(); ++i) {
            jump.data[i] = cp.zeta * (cs.data[i] - cf.data[i]) - cp.Ds * gs.data[i].y();
            flux.data[i] = cp.Ds * gs.data[i].y() - cp.Df * gf.data[i].y();
        }
        const double rj = facet_norm(*disc.ps, jump);
        if (rj > tol) {
            fail("zeta [[c0]] - D_s grad c_s0 . n = 0 on the interface", rj);
        }
        const double rf = facet_norm(*disc.ps, flux);
        if (rf > tol) {
            fail("[[D grad c0]] . n = 0 on the interface", rf);
        }
        const auto go = scalar_gradient_on_facets(raw.c0.solid, FacetTag::Outer);
        FacetQpData<double> outer(go.facets, go.num_points, 0.0);
        for (std::size_t i = 0; i < go.data.size(); ++i) {
            outer.data[i] = cp.Ds * go.data[i].y();
        }
        const double ro = facet_norm(*disc.ps, outer);
        if (ro > tol) {
            fail("D_s grad c_s0 . n = 0 on the outer boundary", ro);
        }
    }

    InitialData out;
    out.vf0 = raw.vf0;
    out.c0 = raw.c0;
    out.cstar0 = raw.cstar0;
    out.g0 = raw.g0;
    out.kappa = raw.kappa;

    // Extend the interface pressure trace constant in y.
    {
        const double h = disc.mesh->h();
        const int nx = static_cast<int>(std::lround(disc.L / h));
        std::vector<double> trace(static_cast<std::size_t>(nx), 0.0);
        for (int dof : disc.pf->boundary_dofs(FacetTag::Interface)) {
            const int i = static_cast<int>(std::lround(disc.pf->dof_point(dof).x() / h)) % nx;
            trace[static_cast<std::size_t>(i)] = raw.pf0.at(dof);
        }
        out.pf0 = Field(disc.pf, 1);
        for (int dof = 0; dof < disc.pf->num_dofs(); ++dof) {
            const double s = disc.pf->dof_point(dof).x() / h;
            const int i = static_cast<int>(std::floor(s + 1e-12));
            const double a = s - i;
            const double v0 = trace[static_cast<std::size_t>(((i % nx) + nx) % nx)];
            const double v1 = trace[static_cast<std::size_t>((((i + 1) % nx) + nx) % nx)];
            out.pf0.at(dof) = (1.0 - a) * v0 + a * v1;
        }
    }

    // Fluid traction on the interface, normal pointing into the solid.
    const auto pif = scalar_on_facets(out.pf0, FacetTag::Interface);
    const auto gv = gradient_on_facets(raw.vf0, FacetTag::Interface);
    FacetQpData<Vec2> traction(pif.facets, pif.num_points, Vec2::Zero());
    const Vec2 n(0.0, 1.0);
    Vec2 total = Vec2::Zero();
    double length = 0.0;
    for (int i = 0; i < traction.size(); ++i) {
        for (int q = 0; q < traction.num_points; ++q) {
            const Mat2 T = -pif(i, q) * kI + params.nu_f * (gv(i, q) + gv(i, q).transpose());
            traction(i, q) = T.transpose() * n;
            const double w = facet_point(*disc.us, traction.facets[static_cast<std::size_t>(i)], q).weight;
            total += w * traction(i, q);
            length += w;
        }
    }
    const Vec2 mean = total / length;
    if (mean.norm() > 1e-14) {
        for (auto& t : traction.data) {
            t -= mean;
        }
        out.warnings.push_back(fmt::format(
            "interface traction has nonzero mean ({:.3e}, {:.3e}); removed for the pure-traction solid problem",
            mean.x(), mean.y()));
    }

    // Newton iteration on the nonlinear solid equilibrium.
    const EnergyDensity<2> W(params.mu, params.energy);
    Field u(disc.us, 2);
    Field p(disc.ps, 1);
    const int nu = 2 * disc.us->num_dofs();
    const int np = disc.ps->num_dofs();
    double first_norm = -1.0;
    for (int it = 0;; ++it) {
        const QpData<Mat2> F = deformation_gradient(u);
        const QpData<double> pq = values_at_qp(p);
        QpData<Mat2> P(disc.us->num_cells(), F.num_points, Mat2::Zero());
        for (std::size_t i = 0; i < F.data.size(); ++i) {
            if (!(F.data[i].determinant() > 0.0)) {
                throw SolverError("prepare_initial: Newton iterate lost det F > 0");
            }
            P.data[i] = W.dw(F.data[i]) - pq.data[i] * kI;
        }
        Eigen::VectorXd R = Eigen::VectorXd::Zero(nu + np + 2);
        Eigen::VectorXd ru = Eigen::VectorXd::Zero(nu);
        add_flux_load(*disc.us, P, 1.0, ru);
        add_facet_vector_load(*disc.us, traction, 1.0, ru);
        R.head(nu) = ru;
        R.segment(nu, np) = -weak_divergence(u, *disc.ps, {});
        const double rnorm = R.norm();
        if (first_norm < 0.0) {
            first_norm = rnorm;
        }
        if (rnorm <= opts.newton_tol * std::max(1.0, first_norm) || rnorm == 0.0) {
            out.newton_iterations = it;
            break;
        }
        if (it >= opts.newton_max_iter) {
            throw SolverError(fmt::format("prepare_initial: Newton did not converge in {} iterations (residual {:.3e})",
                                          opts.newton_max_iter, rnorm));
        }
        const SaddlePointSystem sys(
            disc.us, disc.ps, 0.0,
            [&](int k, int q) {
                Tensor4 C;
                const Mat2& Fk = F(k, q);
                for (int a = 0; a < 2; ++a) {
                    for (int b = 0; b < 2; ++b) {
                        Mat2 E = Mat2::Zero();
                        E(a, b) = 1.0;
                        const Mat2 col = W.d2w(Fk, E);
                        for (int i = 0; i < 2; ++i) {
                            for (int j = 0; j < 2; ++j) {
                                C(i * 2 + j, a * 2 + b) = col(i, j);
                            }
                        }
                    }
                }
                return C;
            },
            {}, true);
        const Eigen::VectorXd dx = sys.solve(-R);
        if (!dx.allFinite()) {
            throw SolverError("prepare_initial: Newton step is not finite");
        }
        u.values += dx.head(nu);
        p.values += dx.segment(nu, np);
    }
    out.us0 = std::move(u);
    out.ps0 = std::move(p);
    out.smallness = sobolev_norm(out.us0, 2.0 - 2.0 / opts.q, opts.q) + sobolev_norm(out.ps0, 1.0 - 2.0 / opts.q, opts.q);
    if (out.smallness > out.kappa) {
        out.warnings.push_back(
            fmt::format("initial smallness {:.4g} exceeds kappa = {:.4g}", out.smallness, out.kappa));
    }
    return out;
}

RhsBundle assemble_rhs(const CoupledProblem& problem, const StateW& w, const InitialData& w0)
{
    RhsBundle b;
    b.times = w.times();
    b.terms = all_terms(problem, w, w0, initial_window(problem, w0), 0);
    return b;
}

double max_abs(const RhsBundle& bundle)
{
    double m = 0.0;
    auto mat = [&](const auto& qp) {
        for (const auto& v : qp.data) {
            m = std::max(m, v.cwiseAbs().maxCoeff());
        }
    };
    auto scal = [&](const QpData<double>& qp) {
        for (double v : qp.data) {
            m = std::max(m, std::abs(v));
        }
    };
    auto vec = [&](const Eigen::VectorXd& v) {
        if (v.size() > 0) {
            m = std::max(m, v.cwiseAbs().maxCoeff());
        }
    };
    for (const auto& t : bundle.terms) {
        mat(t.Kf);
        mat(t.Ks);
        mat(t.Ftf);
        mat(t.Fts);
        scal(t.Gf);
        scal(t.Gs);
        scal(t.growth);
        scal(t.F1s);
        vec(t.Hf);
        vec(t.F2);
        vec(t.Hs1.values);
        vec(t.F4.values);
        vec(t.F5.values);
    }
    return m;
}

const char* to_string(PicardStatus s)
{
    switch (s) {
    case PicardStatus::Converged:
        return "converged";
    case PicardStatus::NoContraction:
        return "no-contraction";
    case PicardStatus::MaxIterations:
        return "max-iterations";
    }
    return "?";
}

const std::vector<std::string>& component_names()
{
    static const std::vector<std::string> names{"v_f", "u_s", "pi_f", "pi_s", "c", "c_star", "g"};
    return names;
}

std::map<std::string, double> state_difference(const StateW& a, const StateW& b, double q)
{
    NormSpec spec;
    spec.s = 1.0;
    spec.q = q;
    spec.r = 0.5 - 0.5 / q;
    spec.kind = NormKind::Anisotropic;
    std::map<std::string, double> out;
    out["v_f"] = trajectory_norm(difference(a.vf, b.vf), spec);
    out["u_s"] = trajectory_norm(difference(a.us, b.us), spec);
    out["pi_f"] = trajectory_norm(difference(a.pf, b.pf), spec);
    out["pi_s"] = trajectory_norm(difference(a.ps, b.ps), spec);
    Trajectory<TwoSidedField> dc;
    dc.times = a.c.times;
    for (std::size_t i = 0; i < a.c.snapshots.size(); ++i) {
        dc.snapshots.push_back({minus(a.c.snapshots[i].fluid, b.c.snapshots[i].fluid),
                                minus(a.c.snapshots[i].solid, b.c.snapshots[i].solid)});
    }
    out["c"] = trajectory_norm(dc, spec);
    out["c_star"] = trajectory_norm(difference(a.cstar, b.cstar), spec);
    out["g"] = trajectory_norm(difference(a.g, b.g), spec);
    return out;
}

StateW constant_state(const CoupledProblem& /*problem*/, const InitialData& w0, const std::vector<double>& times)
{
    return constant_window(w0, times);
}

StateW picard_map(const CoupledProblem& problem, const StateW& w, const InitialData& w0)
{
    return map_window(problem, w, w0, initial_window(problem, w0));
}

PicardResult picard_solve(const CoupledProblem& problem, const InitialData& w0, const PicardOptions& opts)
{
    if (!(opts.final_time > 0.0) || opts.windows < 1 || !(opts.tol > 0.0) || opts.max_iter < 1) {
        throw InvalidArgument("picard_solve: need T > 0, windows >= 1, tol > 0, max_iter >= 1");
    }
    const double dt = problem.dt();
    const double Tw = opts.final_time / opts.windows;
    const int steps = static_cast<int>(std::lround(Tw / dt));
    if (steps < 1 || std::abs(steps * dt - Tw) > 1e-9 * std::max(1.0, Tw)) {
        throw InvalidArgument(
            fmt::format("picard_solve: window length {} is not a multiple of dt = {}", Tw, dt));
    }

    PicardResult res;
    WindowStart start = initial_window(problem, w0);
    for (int win = 0; win < opts.windows; ++win) {
        const std::vector<double> times = window_times(win * Tw, steps, dt);
        StateW w = map_window(problem, zero_like_window(start.data, times), w0, start);
        double prev = -1.0;
        bool converged = false;
        bool diverging = false;
        for (int k = 0; k < opts.max_iter; ++k) {
            StateW next;
            try {
                next = map_window(problem, w, w0, start);
            } catch (const InvariantViolation& e) {
                if (k == 0) {
                    throw;
                }
                res.status = PicardStatus::NoContraction;
                res.message = fmt::format("window {}: iterate {} left the admissible set: {}", win, k, e.what());
                diverging = true;
                break;
            }
            IterateRecord rec;
            rec.window = win;
            rec.k = k;
            rec.diff = state_difference(next, w, opts.q);
            for (const auto& [name, v] : rec.diff) {
                rec.norm = std::max(rec.norm, v);
            }
            rec.q = prev > 0.0 ? rec.norm / prev : 0.0;
            if (k > 0) {
                res.max_q = std::max(res.max_q, rec.q);
            }
            res.final_norm = rec.norm;
            res.iterates.push_back(rec);
            w = std::move(next);
            if (rec.norm < opts.tol) {
                converged = true;
                break;
            }
            // Two consecutive non-contracting steps: the map does not contract.
            if (k >= 2 && rec.q >= 1.0 && res.iterates[res.iterates.size() - 2].q >= 1.0) {
                res.status = PicardStatus::NoContraction;
                res.message = fmt::format("window {}: no contraction at this T (q = {:.3g})", win, rec.q);
                diverging = true;
                break;
            }
            prev = rec.norm;
        }
        append_state(res.state, w);
        if (!converged) {
            if (!diverging) {
                const bool contracting = !res.iterates.empty() && res.iterates.back().q < 1.0;
                res.status = contracting ? PicardStatus::MaxIterations : PicardStatus::NoContraction;
                res.message = fmt::format("window {}: not converged after {} iterations (last norm {:.3e})", win,
                                          opts.max_iter, res.final_norm);
            }
            return res;
        }
        // Restart from the end of the window.
        const auto& t = w.times();
        const Field uf_end = cumulative_integral(w.vf.snapshots, t, start.uf_offset).back();
        const Field growth_end = cumulative_integral(solid_concentrations(w.c), t, start.growth_offset).back();
        InitialData next = start.data;
        next.vf0 = w.vf.snapshots.back();
        next.us0 = w.us.snapshots.back();
        next.pf0 = w.pf.snapshots.back();
        next.ps0 = w.ps.snapshots.back();
        next.c0 = w.c.snapshots.back();
        next.cstar0 = w.cstar.snapshots.back();
        next.g0 = w.g.snapshots.back();
        start = {std::move(next), uf_end, growth_end};
    }
    res.status = PicardStatus::Converged;
    res.message = "converged";
    return res;
}

double ResidualReport::max_value() const
{
    double m = 0.0;
    for (const auto& [k, v] : values) {
        if (k != "interface_velocity") {
            m = std::max(m, v);
        }
    }
    return m;
}

ResidualReport converged_residuals(const CoupledProblem& problem, const StateW& w, const InitialData& w0)
{
    const auto& times = w.times();
    const std::vector<RhsTerms> terms = all_terms(problem, w, w0, initial_window(problem, w0), 1);
    const CellsParams& cp = problem.params().cells;
    const Discretization& disc = problem.disc();
    const Eigen::VectorXd mass_s = lumped_mass(*disc.ps);
    ResidualReport rep;
    for (const char* k : {"fluid_momentum", "fluid_divergence", "solid_equilibrium", "solid_constraint",
                          "interface_displacement", "interface_velocity", "concentration", "foam_ode",
                          "growth_ode"}) {
        rep.values[k] = 0.0;
    }
    auto upd = [&](const char* k, double v) { rep.values[k] = std::max(rep.values[k], v); };
    for (std::size_t n = 1; n < times.size(); ++n) {
        const double dt = times[n] - times[n - 1];
        const RhsTerms& t = terms[n];

        StokesStepData fd;
        fd.flux = t.Kf;
        fd.divergence = t.Gf;
        fd.load = t.Hf;
        const StokesStep fs{w.vf.snapshots[n], w.pf.snapshots[n]};
        upd("fluid_momentum", problem.fluid().momentum_residual(w.vf.snapshots[n - 1], fs, fd));
        upd("fluid_divergence", problem.fluid().divergence_residual(w.vf.snapshots[n], fd));

        ElasticStepData sd;
        sd.flux = t.Ks;
        sd.divergence = t.Gs;
        sd.growth_integral = t.growth;
        sd.growth_coefficient = cp.gamma * cp.beta / cp.rho_s;
        sd.boundary_displacement = t.Hs1;
        const auto sr = problem.solid().residual(w.us.snapshots[n], w.ps.snapshots[n], sd);
        upd("solid_equilibrium", sr.equilibrium);
        upd("solid_constraint", sr.constraint);

        Field jump_u(disc.us, 2);
        Field jump_v(disc.vf, 2);
        for (const auto& [f, s] : problem.interface_pairs()) {
            for (int j = 0; j < 2; ++j) {
                jump_u.at(s, j) = w.us.snapshots[n].at(s, j) - t.Hs1.at(s, j);
                jump_v.at(f, j) = w.vf.snapshots[n].at(f, j) -
                                  (w.us.snapshots[n].at(s, j) - w.us.snapshots[n - 1].at(s, j)) / dt;
            }
        }
        upd("interface_displacement", facet_l2_norm(jump_u, FacetTag::Interface));
        upd("interface_velocity", facet_l2_norm(jump_v, FacetTag::Interface));

        ConcentrationStepData cd;
        cd.flux_f = t.Ftf;
        cd.flux_s = t.Fts;
        cd.source_s = t.F1s;
        cd.interface_flux = t.F2;
        const auto& cells = problem.cells();
        Eigen::VectorXd x(disc.pf->num_dofs() + disc.ps->num_dofs());
        x << w.c.snapshots[n].fluid.values, w.c.snapshots[n].solid.values;
        upd("concentration", (cells.matrix() * x - cells.load(w.c.snapshots[n - 1], cd)).norm());

        const Eigen::VectorXd& c = w.c.snapshots[n].solid.values;
        const Eigen::VectorXd& cs = w.cstar.snapshots[n].values;
        const Eigen::VectorXd& g = w.g.snapshots[n].values;
        const Eigen::VectorXd rf = (cs - w.cstar.snapshots[n - 1].values) / dt -
                                   (cp.beta * c.array() * (1.0 - cp.gamma * cs.array() / cp.rho_s)).matrix();
        const Eigen::VectorXd rg = (g - w.g.snapshots[n - 1].values) / dt -
                                   (cp.gamma * cp.beta / (cp.dim * cp.rho_s) * c.array() * g.array()).matrix();
        upd("foam_ode", std::sqrt((mass_s.array() * rf.array().square()).sum()));
        upd("growth_ode", std::sqrt((mass_s.array() * rg.array().square()).sum()));
    }
    return rep;
}

std::vector<StepDiagnostics> step_diagnostics(const CoupledProblem& problem, const StateW& w, const InitialData& w0)
{
    (void)w0;
    const auto& times = w.times();
    const Discretization& disc = problem.disc();
    const CellsParams& cp = problem.params().cells;
    const Field zero_uf(disc.vf, 2);
    const Field zero_growth(disc.ps, 1);
    const std::vector<Field> uf = cumulative_integral(w.vf.snapshots, times, zero_uf);
    const std::vector<Field> growth = cumulative_integral(solid_concentrations(w.c), times, zero_growth);
    const Eigen::VectorXd mf = lumped_mass(*disc.pf);
    const Eigen::VectorXd ms = lumped_mass(*disc.ps);
    std::vector<StepDiagnostics> out;
    for (std::size_t n = 0; n < times.size(); ++n) {
        StepDiagnostics d;
        d.t = times[n];
        d.piola_residual = piola_identity_residual(w.us.snapshots[n]);
        d.min_g = w.g.snapshots[n].values.minCoeff();
        d.min_c = std::min(w.c.snapshots[n].fluid.values.minCoeff(), w.c.snapshots[n].solid.values.minCoeff());
        d.min_cstar = w.cstar.snapshots[n].values.minCoeff();
        const InverseGradient invf = invert_F(*disc.vf, deformation_gradient(uf[n]));
        const InverseGradient invs = invert_F(*disc.us, deformation_gradient(w.us.snapshots[n]));
        d.max_F_minus_I = std::max(invf.max_F_minus_I, invs.max_F_minus_I);
        d.div_residual_f = lumped_l2(weak_divergence(w.vf.snapshots[n], *disc.pf, invf.Finv), mf);
        Eigen::VectorXd rs = weak_divergence(w.us.snapshots[n], *disc.ps, invs.Finv);
        add_scalar_load(*disc.ps, values_at_qp(growth[n]), -cp.gamma * cp.beta / cp.rho_s, rs);
        d.div_residual_s = lumped_l2(rs, ms);
        d.mass = mf.dot(w.c.snapshots[n].fluid.values) + ms.dot(w.c.snapshots[n].solid.values);
        out.push_back(d);
    }
    return out;
}

}  // namespace plaquefsi
