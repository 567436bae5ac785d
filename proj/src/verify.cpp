#include "sentinel/verify.hpp"

#include "sentinel/adversary.hpp"
#include "sentinel/bounds.hpp"
#include "sentinel/errors.hpp"
#include "sentinel/experiment.hpp"
#include "sentinel/geometry.hpp"
#include "sentinel/pagerank.hpp"
#include "sentinel/random.hpp"
#include "sentinel/spectral.hpp"
#include "sentinel/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sentinel {

namespace {

constexpr double kConstantTolerance = 1e-12;

std::vector<std::size_t> horizon(std::size_t from, std::size_t to) {
  std::vector<std::size_t> t(to - from + 1);
  std::iota(t.begin(), t.end(), from);
  return t;
}

Dist random_dist(Rng& rng, std::size_t n) {
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = rng.exponential();
  return Dist::from_numeric(v / v.sum());
}

std::string p_label(double p) { return std::isinf(p) ? "inf" : format_double(p); }

// A report is summarized by its tightest point.
SuiteCase summarize(const BoundReport& report, std::string label) {
  const auto margin = [](const BoundPoint& pt) { return pt.lhs - pt.rhs; };
  const auto cmp = [&](const BoundPoint& a, const BoundPoint& b) {
    return margin(a) < margin(b);
  };
  const BoundPoint& pt = *std::max_element(report.points.begin(), report.points.end(), cmp);
  SuiteCase c;
  c.label = std::move(label) + " t=" + std::to_string(pt.t);
  c.lhs = pt.lhs;
  c.rhs = pt.rhs;
  c.holds = report.holds;
  return c;
}

void contract(const MarkovChain& chain, const Dist& pi, const VerifyOptions& opt,
              std::vector<SuiteCase>& out) {
  Rng rng(opt.seed);
  const auto n = static_cast<Eigen::Index>(chain.n());
  const Vector ones = Vector::Ones(n);
  for (const double p : {1.0, 2.0, 4.0, kInfinity}) {
    SuiteCase c;
    c.label = "constant p=" + p_label(p);
    c.lhs = weighted_lp_norm(chain.apply(ones), pi, p);
    c.rhs = weighted_lp_norm(ones, pi, p);
    c.holds = std::abs(c.lhs - c.rhs) <= kConstantTolerance;
    out.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < opt.trials; ++i) {
    Vector f(n);
    for (auto& x : f) x = 2.0 * rng.uniform() - 1.0;
    for (const double p : {1.0, 2.0, 4.0, kInfinity}) {
      SuiteCase c;
      c.label = "random p=" + p_label(p);
      c.lhs = weighted_lp_norm(chain.apply(f), pi, p);
      c.rhs = weighted_lp_norm(f, pi, p);
      c.holds = c.lhs <= c.rhs + kBoundSlack;
      out.push_back(std::move(c));
    }
  }
}

void mixing(const MarkovChain& chain, const Dist& pi, const VerifyOptions& opt,
            std::vector<SuiteCase>& out) {
  Rng rng(opt.seed);
  const double gamma = spectral_gap(chain, pi).gamma;
  const auto t = horizon(0, opt.t_max);
  for (std::size_t i = 0; i < opt.trials; ++i) {
    const Dist mu = i == 0 ? Dist::point_mass(chain.n(), rng.index(chain.n()))
                           : random_dist(rng, chain.n());
    out.push_back(summarize(check_mixing_bound(chain, pi, mu, gamma, t),
                            "gamma=" + format_double(gamma)));
  }
}

void coupling(const MarkovChain& chain, const Dist& pi, const VerifyOptions& opt,
              std::vector<SuiteCase>& out) {
  Rng rng(opt.seed);
  const auto t = horizon(0, opt.t_max);
  for (std::size_t i = 0; i < opt.trials; ++i) {
    const Dist nu = i % 2 == 0 ? Dist::point_mass(chain.n(), rng.index(chain.n()))
                               : random_dist(rng, chain.n());
    out.push_back(summarize(check_coupling_bound(chain, pi, nu, t), "nu"));
  }
}

void prclose(const MarkovChain& chain, const Dist& pi, const VerifyOptions& opt,
             std::vector<SuiteCase>& out) {
  const Dist mu = Dist::uniform(chain.n());
  const double gamma = spectral_gap(chain, pi).gamma;
  const auto t = horizon(1, opt.t_max);
  for (const double delta : {0.01, 0.05, 0.1, 0.3}) {
    const std::string tag = "delta=" + format_double(delta);
    out.push_back(summarize(check_pr_close(chain, pi, mu, gamma, delta, t), tag));
    for (const auto& cmp : check_density_contraction(chain, pi, mu, delta).norms) {
      out.push_back({0, tag + " density p=" + p_label(cmp.p), cmp.lhs, cmp.rhs, cmp.holds});
    }
  }
}

void corruptclose(const MarkovChain& chain, const Dist& pi, const VerifyOptions& opt,
                  std::vector<SuiteCase>& out) {
  Rng rng(opt.seed);
  const std::size_t n = chain.n();
  const Dist mu = Dist::uniform(n);
  const auto t = horizon(1, opt.t_max);
  constexpr CorruptionKind kinds[] = {CorruptionKind::PerRowTv, CorruptionKind::RowReplacement,
                                      CorruptionKind::Absorbing};
  for (std::size_t i = 0; i < opt.trials; ++i) {
    CorruptionSpec spec;
    spec.kind = kinds[i % 3];
    spec.seed = mix_seed(opt.seed, i);
    if (spec.kind == CorruptionKind::PerRowTv) {
      spec.budget = 0.01 + 0.19 * rng.uniform();
    } else {
      spec.budget = 2.0;
      spec.target_rows = random_rows(n, 0.1 * rng.uniform(), spec.seed);
    }
    const MarkovChain corrupted = corrupt(chain, pi, spec).chain;
    for (const double p : {2.0, kInfinity}) {
      for (const double delta : {0.05, 0.2}) {
        const std::string tag = std::string(to_string(spec.kind)) + " p=" + p_label(p) +
                                " delta=" + format_double(delta);
        out.push_back(summarize(check_corrupted_close(chain, corrupted, pi, mu, p, delta, t),
                                tag));
      }
    }
  }
}

}  // namespace

std::string_view to_string(Suite suite) {
  switch (suite) {
    case Suite::Contract: return "contract";
    case Suite::Mixing: return "mixing";
    case Suite::Coupling: return "coupling";
    case Suite::PrClose: return "prclose";
    case Suite::CorruptClose: return "corruptclose";
  }
  return "unknown";
}

Suite suite_from_string(std::string_view name) {
  for (const Suite s : {Suite::Contract, Suite::Mixing, Suite::Coupling, Suite::PrClose,
                        Suite::CorruptClose}) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorCode::ParseError, "unknown suite \"" + std::string(name) + "\"");
}

std::vector<SuiteCase> run_suite(Suite suite, const MarkovChain& chain,
                                 const VerifyOptions& options) {
  if (options.trials < 1) throw Error(ErrorCode::OutOfRange, "trials must be at least 1");
  if (options.t_max < 1) throw Error(ErrorCode::OutOfRange, "t_max must be at least 1");
  const Dist pi = stationary(chain);
  std::vector<SuiteCase> cases;
  switch (suite) {
    case Suite::Contract: contract(chain, pi, options, cases); break;
    case Suite::Mixing: mixing(chain, pi, options, cases); break;
    case Suite::Coupling: coupling(chain, pi, options, cases); break;
    case Suite::PrClose: prclose(chain, pi, options, cases); break;
    case Suite::CorruptClose: corruptclose(chain, pi, options, cases); break;
  }
  for (std::size_t i = 0; i < cases.size(); ++i) cases[i].index = i;
  return cases;
}

std::string suite_csv(Suite suite, const std::vector<SuiteCase>& cases) {
  std::ostringstream out;
  out << "suite,case,label,lhs,rhs,holds\n";
  for (const auto& c : cases) {
    out << to_string(suite) << ',' << c.index << ',' << c.label << ','
        << format_double(c.lhs) << ',' << format_double(c.rhs) << ','
        << (c.holds ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace sentinel
