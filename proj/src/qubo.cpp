// Copyright 2026 The boolrule Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "boolrule/qubo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <unordered_map>

#include "boolrule/error.hpp"
#include "boolrule/rng.hpp"

namespace boolrule {

QuboMode parse_qubo_mode(std::string_view name) {
  if (name == "with-eta" || name == "with_eta") return QuboMode::WithEta;
  if (name == "without-eta" || name == "without_eta") return QuboMode::WithoutEta;
  throw UsageError("unknown QUBO mode '" + std::string(name) +
                   "' (expected with-eta or without-eta)");
}

std::string_view qubo_mode_name(QuboMode mode) {
  return mode == QuboMode::WithEta ? "with-eta" : "without-eta";
}

double QuboModel::energy(std::span<const std::uint8_t> x) const {
  double e = offset;
  for (const auto& q : entries) {
    if (x[q.i] && x[q.j]) e += q.value;
  }
  return e;
}

double QuboModel::penalized_value(std::span<const std::uint8_t> x) const {
  double total = 0.0;
  for (const auto& t : objective) total += t.coef * x[t.var];
  for (const auto& p : penalties) {
    double lhs = 0.0;
    for (const auto& t : p.terms) lhs += t.coef * x[t.var];
    double s = 0.0;
    for (std::size_t v : p.slack) s += vars[v].value * x[v];
    const double r = p.side >= 0 ? lhs - p.lower - s : lhs - p.upper + s;
    total += p.weight * r * r;
  }
  return total;
}

namespace {

int bits_for(double range) {
  if (range <= 0) return 0;
  return static_cast<int>(std::ceil(std::log2(range + 1.0) - 1e-12));
}

// Accumulates upper-triangular coefficients: dense over the first `dense`
// variables, hashed elsewhere.
class Accumulator {
 public:
  Accumulator(std::size_t dense) : dense_(dense), block_(dense * dense, 0.0) {}

  void add(std::size_t i, std::size_t j, double v) {
    if (i > j) std::swap(i, j);
    if (j < dense_) {
      block_[i * dense_ + j] += v;
    } else {
      sparse_[(static_cast<std::uint64_t>(i) << 32) | j] += v;
    }
  }

  std::vector<QuboEntry> entries() const {
    std::vector<QuboEntry> out;
    for (std::size_t i = 0; i < dense_; ++i) {
      for (std::size_t j = i; j < dense_; ++j) {
        const double v = block_[i * dense_ + j];
        if (v != 0.0) out.push_back({i, j, v});
      }
    }
    for (const auto& [key, v] : sparse_) {
      if (v != 0.0) out.push_back({static_cast<std::size_t>(key >> 32),
                                   static_cast<std::size_t>(key & 0xFFFFFFFFULL), v});
    }
    std::sort(out.begin(), out.end(), [](const QuboEntry& a, const QuboEntry& b) {
      return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    return out;
  }

 private:
  std::size_t dense_;
  std::vector<double> block_;
  std::unordered_map<std::uint64_t, double> sparse_;
};

}  // namespace

QuboModel ilp_to_qubo(const IlpModel& model, QuboMode mode,
                      const QuboPenalties& penalties) {
  QuboModel q;
  q.mode = mode;
  q.l1 = penalties.l1;
  const double n = static_cast<double>(model.num_positive + model.num_negative);
  q.l2 = penalties.l2 ? *penalties.l2
                      : 100.0 * penalties.l1 *
                            std::max(model.weights.positive, model.weights.negative) * n;
  const bool keep_eta = mode == QuboMode::WithEta;
  const double mp = static_cast<double>(model.max_literals);

  // ILP variable -> list of (QUBO variable, multiplier).
  std::vector<std::vector<std::pair<std::size_t, double>>> expand(model.vars.size());
  const auto add_var = [&](std::string name, QuboRole role, std::size_t index,
                           double value, std::optional<std::size_t> owner = {}) {
    q.vars.push_back({std::move(name), role, index, value, owner});
    return q.vars.size() - 1;
  };
  for (std::size_t v = 0; v < model.vars.size(); ++v) {
    const IlpVar& iv = model.vars[v];
    switch (iv.role) {
      case VarRole::B:
        expand[v].emplace_back(add_var(iv.name, QuboRole::B, iv.index, 1.0), 1.0);
        break;
      case VarRole::NB:
        expand[v].emplace_back(add_var(iv.name, QuboRole::NB, iv.index, 1.0), 1.0);
        break;
      case VarRole::EtaP:
      case VarRole::EtaN:
        if (keep_eta) {
          const auto role = iv.role == VarRole::EtaP ? QuboRole::EtaP : QuboRole::EtaN;
          expand[v].emplace_back(add_var(iv.name, role, iv.index, 1.0), 1.0);
        }
        break;
      case VarRole::Q:
        expand[v].emplace_back(add_var(iv.name, QuboRole::Q, iv.index, 1.0), 1.0);
        break;
      case VarRole::K: {
        const int nbits = bits_for(iv.upper);
        for (int b = 0; b < nbits; ++b) {
          const double w = std::ldexp(1.0, b);
          expand[v].emplace_back(
              add_var("k_bit_" + std::to_string(b), QuboRole::KBit,
                      static_cast<std::size_t>(b), w),
              w);
        }
        break;
      }
    }
  }

  // Range of one ILP constraint row over its feasible region: literal
  // variables contribute at most m' ones, k lies in [0, m'].
  const auto analytic_range = [&](const IlpConstraint& c) {
    std::vector<double> literal_coefs;
    double lo = 0.0, hi = 0.0;
    for (const auto& t : c.terms) {
      const VarRole r = model.vars[t.var].role;
      if (r == VarRole::B || r == VarRole::NB) {
        literal_coefs.push_back(t.coef);
      } else if (r == VarRole::K) {
        lo += std::min(0.0, t.coef * mp);
        hi += std::max(0.0, t.coef * mp);
      } else if (keep_eta || (r != VarRole::EtaP && r != VarRole::EtaN)) {
        lo += std::min(0.0, t.coef);
        hi += std::max(0.0, t.coef);
      }
    }
    std::sort(literal_coefs.begin(), literal_coefs.end());
    const std::size_t take = std::min(model.max_literals, literal_coefs.size());
    for (std::size_t i = 0; i < take; ++i) {
      lo += std::min(0.0, literal_coefs[i]);
      hi += std::max(0.0, literal_coefs[literal_coefs.size() - 1 - i]);
    }
    return std::pair{lo, hi};
  };

  struct Pending {
    const IlpConstraint* source;
    std::vector<LinearTerm> terms;
    double lower, upper, alo, ahi;
  };
  std::vector<Pending> pending;
  for (const auto& c : model.constraints) {
    std::vector<LinearTerm> terms;
    for (const auto& t : c.terms) {
      for (const auto& [qv, mult] : expand[t.var]) terms.push_back({qv, t.coef * mult});
    }
    const double inf = std::numeric_limits<double>::infinity();
    double lower = c.sense == Sense::LessEqual ? -inf : c.rhs;
    double upper = c.sense == Sense::GreaterEqual ? inf : c.rhs;
    const auto [alo, ahi] = analytic_range(c);
    // Without eta, rows of one sample that share a left-hand side become a
    // single range constraint.
    if (!keep_eta && !pending.empty() && pending.back().source->role == c.role &&
        pending.back().source->sample == c.sample && pending.back().terms == terms &&
        (c.role == ConstraintRole::PositiveSample ||
         c.role == ConstraintRole::NegativeSample)) {
      pending.back().lower = std::max(pending.back().lower, lower);
      pending.back().upper = std::min(pending.back().upper, upper);
      continue;
    }
    pending.push_back({&c, std::move(terms), lower, upper, alo, ahi});
  }

  for (auto& p : pending) {
    Penalty pen;
    const IlpConstraint& c = *p.source;
    pen.name = c.name;
    pen.role = c.role;
    pen.terms = std::move(p.terms);
    pen.lower = std::max(p.alo, p.lower);
    pen.upper = std::min(p.ahi, p.upper);
    if (pen.lower > pen.upper) {
      throw UsageError("constraint " + c.name + " cannot be satisfied: range [" +
                       std::to_string(pen.lower) + ", " + std::to_string(pen.upper) + "]");
    }
    switch (c.role) {
      case ConstraintRole::PositiveSample:
        pen.weight = model.weights.positive * q.l1;
        break;
      case ConstraintRole::NegativeSample:
        pen.weight = model.weights.negative * q.l1;
        break;
      default:
        pen.weight = q.l2;
        break;
    }
    const double range = pen.upper - pen.lower;
    if (range > 0) {
      pen.side = std::abs(pen.lower) <= std::abs(pen.upper) ? 1 : -1;
      const int nbits = bits_for(range);
      double used = 0.0;
      for (int b = 0; b < nbits; ++b) {
        const double w = b + 1 < nbits ? std::ldexp(1.0, b) : range - used;
        used += w;
        pen.slack.push_back(add_var("s_" + c.name + "_" + std::to_string(b),
                                    QuboRole::SlackBit, static_cast<std::size_t>(b),
                                    w, q.penalties.size()));
      }
    }
    q.penalties.push_back(std::move(pen));
  }

  q.num_vars = q.vars.size();
  // Literal variables interact with almost everything; keep them dense.
  Accumulator acc(2 * model.num_features);
  for (const auto& t : model.objective) {
    for (const auto& [qv, mult] : expand[t.var]) {
      acc.add(qv, qv, t.coef * mult);
      q.objective.push_back({qv, t.coef * mult});
    }
  }
  for (const auto& pen : q.penalties) {
    std::vector<LinearTerm> lin = pen.terms;
    for (std::size_t v : pen.slack) {
      lin.push_back({v, pen.side >= 0 ? -q.vars[v].value : q.vars[v].value});
    }
    const double c = pen.bound();
    // P (sum a_i x_i - c)^2 with x_i^2 = x_i.
    for (std::size_t a = 0; a < lin.size(); ++a) {
      acc.add(lin[a].var, lin[a].var,
              pen.weight * (lin[a].coef * lin[a].coef - 2.0 * c * lin[a].coef));
      for (std::size_t b = a + 1; b < lin.size(); ++b) {
        acc.add(lin[a].var, lin[b].var, 2.0 * pen.weight * lin[a].coef * lin[b].coef);
      }
    }
    q.offset += pen.weight * c * c;
  }
  q.entries = acc.entries();
  return q;
}

QuboModel make_qubo(std::size_t num_vars, std::vector<QuboEntry> entries,
                    double offset) {
  QuboModel q;
  q.num_vars = num_vars;
  q.offset = offset;
  Accumulator acc(0);
  for (const auto& e : entries) {
    if (e.i >= num_vars || e.j >= num_vars) {
      throw UsageError("QUBO entry index out of range");
    }
    acc.add(e.i, e.j, e.value);
  }
  q.entries = acc.entries();
  return q;
}

void write_qubo(std::ostream& out, const QuboModel& q) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%zu %.17g\n", q.num_vars, q.offset);
  out << buf;
  for (const auto& e : q.entries) {
    std::snprintf(buf, sizeof(buf), "%zu %zu %.17g\n", e.i, e.j, e.value);
    out << buf;
  }
}

std::pair<double, double> default_beta_range(const QuboModel& q) {
  std::vector<double> max_delta(q.num_vars, 0.0);
  double min_coef = std::numeric_limits<double>::infinity();
  for (const auto& e : q.entries) {
    const double a = std::abs(e.value);
    if (a == 0.0) continue;
    min_coef = std::min(min_coef, a);
    max_delta[e.i] += a;
    if (e.j != e.i) max_delta[e.j] += a;
  }
  const double largest = max_delta.empty()
                             ? 0.0
                             : *std::max_element(max_delta.begin(), max_delta.end());
  if (largest == 0.0) return {1.0, 1.0};
  return {std::numbers::ln2 / largest, std::log(100.0) / min_coef};
}

AnnealResult qubo_anneal(const QuboModel& q, const AnnealConfig& config) {
  const std::size_t n = q.num_vars;
  if (n == 0) throw UsageError("QUBO has no variables");
  if (config.num_reads == 0 || config.num_sweeps == 0) {
    throw UsageError("num_reads and num_sweeps must be positive");
  }
  // CSR neighbourhoods plus linear terms.
  std::vector<double> linear(n, 0.0);
  std::vector<std::size_t> degree(n + 1, 0);
  for (const auto& e : q.entries) {
    if (e.i == e.j) {
      linear[e.i] += e.value;
    } else {
      ++degree[e.i];
      ++degree[e.j];
    }
  }
  std::vector<std::size_t> start(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) start[i + 1] = start[i] + degree[i];
  std::vector<std::size_t> nbr(start[n]);
  std::vector<double> weight(start[n]);
  {
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (const auto& e : q.entries) {
      if (e.i == e.j) continue;
      nbr[fill[e.i]] = e.j;
      weight[fill[e.i]++] = e.value;
      nbr[fill[e.j]] = e.i;
      weight[fill[e.j]++] = e.value;
    }
  }

  const auto [hot, cold] = config.beta_range ? *config.beta_range : default_beta_range(q);
  std::vector<double> betas(config.num_sweeps);
  for (std::size_t s = 0; s < config.num_sweeps; ++s) {
    const double frac = config.num_sweeps == 1
                            ? 1.0
                            : static_cast<double>(s) / static_cast<double>(config.num_sweeps - 1);
    betas[s] = hot * std::pow(cold / hot, frac);
  }

  const auto began = std::chrono::steady_clock::now();
  AnnealResult result;
  std::vector<double> field(n);
  for (std::size_t read = 0; read < config.num_reads; ++read) {
    Rng rng(mix_seed(config.seed, read));
    std::vector<std::uint8_t> x(n);
    for (auto& b : x) b = rng.coin() ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i) {
      double f = linear[i];
      for (std::size_t p = start[i]; p < start[i + 1]; ++p) {
        if (x[nbr[p]]) f += weight[p];
      }
      field[i] = f;
    }
    for (double beta : betas) {
      for (std::size_t i = 0; i < n; ++i) {
        const double dE = x[i] ? -field[i] : field[i];
        if (dE > 0.0) {
          const double scaled = beta * dE;
          // exp(-40) is below the resolution of the uniform draw.
          if (scaled > 40.0 || rng.uniform() >= std::exp(-scaled)) continue;
        }
        const double d = x[i] ? -1.0 : 1.0;
        x[i] ^= 1U;
        for (std::size_t p = start[i]; p < start[i + 1]; ++p) {
          field[nbr[p]] += d * weight[p];
        }
      }
    }
    result.energies.push_back(q.energy(x));
    result.reads.push_back(std::move(x));
    if (result.energies.back() < result.energies[result.best]) {
      result.best = result.reads.size() - 1;
    }
    if (config.timeout_seconds) {
      const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - began;
      if (spent.count() > *config.timeout_seconds && read + 1 < config.num_reads) {
        result.timed_out = true;
        break;
      }
    }
  }
  return result;
}

std::vector<int> ilp_assignment(const QuboModel& q, const IlpModel& model,
                                std::span<const std::uint8_t> x) {
  std::vector<int> out(model.vars.size(), 0);
  for (std::size_t v = 0; v < q.vars.size(); ++v) {
    const QuboVar& qv = q.vars[v];
    switch (qv.role) {
      case QuboRole::B:
        out[model.b(qv.index)] = x[v];
        break;
      case QuboRole::NB:
        out[model.nb(qv.index)] = x[v];
        break;
      case QuboRole::EtaP:
        out[model.eta_p(qv.index)] = x[v];
        break;
      case QuboRole::EtaN:
        out[model.eta_n(qv.index)] = x[v];
        break;
      case QuboRole::Q:
        out[model.q(qv.index)] = x[v];
        break;
      case QuboRole::KBit:
        out[model.k()] += static_cast<int>(qv.value) * x[v];
        break;
      case QuboRole::SlackBit:
        break;
    }
  }
  return out;
}

}  // namespace boolrule
