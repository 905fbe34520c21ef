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

#include "boolrule/ilp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "boolrule/error.hpp"

namespace boolrule {

namespace {

std::string var_name(VarRole role, std::size_t index) {
  switch (role) {
    case VarRole::B:
      return "b_" + std::to_string(index);
    case VarRole::NB:
      return "nb_" + std::to_string(index);
    case VarRole::EtaP:
      return "etaP_" + std::to_string(index);
    case VarRole::EtaN:
      return "etaN_" + std::to_string(index);
    case VarRole::Q:
      return "q_" + std::to_string(index);
    case VarRole::K:
      return "k";
  }
  return "?";
}

bool satisfied(double lhs, Sense sense, double rhs) {
  constexpr double kTol = 1e-9;
  switch (sense) {
    case Sense::LessEqual:
      return lhs <= rhs + kTol;
    case Sense::GreaterEqual:
      return lhs >= rhs - kTol;
    case Sense::Equal:
      return std::abs(lhs - rhs) <= kTol;
  }
  return false;
}

double dot(const std::vector<LinearTerm>& terms, const std::vector<int>& x) {
  double s = 0.0;
  for (const auto& t : terms) s += t.coef * x[t.var];
  return s;
}

}  // namespace

double IlpModel::objective_value(const std::vector<int>& x) const {
  return dot(objective, x);
}

std::vector<std::string> IlpModel::violations(const std::vector<int>& x) const {
  std::vector<std::string> out;
  for (std::size_t v = 0; v < vars.size(); ++v) {
    if (x[v] < vars[v].lower || x[v] > vars[v].upper) {
      out.push_back(vars[v].name + " out of bounds");
    }
  }
  for (const auto& c : constraints) {
    if (!satisfied(dot(c.terms, x), c.sense, c.rhs)) out.push_back(c.name);
  }
  return out;
}

IlpModel build_ilp(const BitMatrix& X, const BitVector& y,
                   const IlpOptions& options) {
  if (X.rows() != y.size()) {
    throw DataError("matrix has " + std::to_string(X.rows()) + " rows but " +
                    std::to_string(y.size()) + " labels");
  }
  if (options.max_literals < std::max<std::size_t>(1, options.min_literals)) {
    throw UsageError("max_literals must be at least max(1, min_literals)");
  }
  if (options.lambda < 0.0) throw UsageError("lambda must be non-negative");

  IlpModel model;
  model.kind = options.kind;
  model.num_features = X.cols();
  model.max_literals = options.max_literals;
  model.min_literals = options.min_literals;
  model.lambda = options.lambda;
  model.weights = options.weights ? *options.weights : class_weights(y);

  std::vector<std::size_t> pos_rows, neg_rows;
  for (std::size_t r = 0; r < y.size(); ++r) {
    (y.get(r) ? pos_rows : neg_rows).push_back(r);
  }
  if (pos_rows.empty() || neg_rows.empty()) {
    throw DataError("depth-one model needs both classes present");
  }
  model.num_positive = pos_rows.size();
  model.num_negative = neg_rows.size();

  const std::size_t m = model.num_features;
  const OpKind kind = options.kind;
  const auto add_var = [&](VarRole role, std::size_t index, int upper = 1) {
    model.vars.push_back({var_name(role, index), role, index, 0, upper});
  };
  for (std::size_t i = 0; i < m; ++i) add_var(VarRole::B, i);
  for (std::size_t i = 0; i < m; ++i) add_var(VarRole::NB, i);
  for (std::size_t r = 0; r < pos_rows.size(); ++r) add_var(VarRole::EtaP, r);
  for (std::size_t r = 0; r < neg_rows.size(); ++r) add_var(VarRole::EtaN, r);
  if (kind == OpKind::Choose) {
    for (std::size_t r = 0; r < neg_rows.size(); ++r) add_var(VarRole::Q, r);
  }
  const bool param = is_parameterized(kind);
  if (param) add_var(VarRole::K, 0, static_cast<int>(options.max_literals));

  for (std::size_t r = 0; r < pos_rows.size(); ++r) {
    model.objective.push_back({model.eta_p(r), model.weights.positive});
  }
  for (std::size_t r = 0; r < neg_rows.size(); ++r) {
    model.objective.push_back({model.eta_n(r), model.weights.negative});
  }
  if (options.lambda != 0.0) {
    for (std::size_t i = 0; i < m; ++i) model.objective.push_back({model.b(i), options.lambda});
    for (std::size_t i = 0; i < m; ++i) model.objective.push_back({model.nb(i), options.lambda});
  }

  // Number of chosen literals that are true on row `row`; for And the roles
  // of b and nb swap, which counts the false literals instead.
  const auto count_terms = [&](std::size_t row) {
    std::vector<LinearTerm> terms;
    const bool swap = kind == OpKind::And;
    for (std::size_t i = 0; i < m; ++i) {
      if (X.get(row, i) != swap) terms.push_back({model.b(i), 1.0});
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (X.get(row, i) == swap) terms.push_back({model.nb(i), 1.0});
    }
    return terms;
  };
  const double mp = static_cast<double>(options.max_literals);
  const double mp1 = mp + 1.0;
  const auto with = [](std::vector<LinearTerm> terms,
                       std::initializer_list<LinearTerm> extra) {
    terms.insert(terms.end(), extra);
    return terms;
  };
  const auto add = [&](std::string name, ConstraintRole role, std::size_t sample,
                       std::vector<LinearTerm> terms, Sense sense, double rhs) {
    model.constraints.push_back(
        {std::move(name), role, sample, std::move(terms), sense, rhs});
  };
  const std::size_t kv = param ? model.vars.size() - 1 : 0;

  for (std::size_t r = 0; r < pos_rows.size(); ++r) {
    const auto cnt = count_terms(pos_rows[r]);
    const LinearTerm eta{model.eta_p(r), 0.0};
    const std::string name = "pos_" + std::to_string(r);
    const auto role = ConstraintRole::PositiveSample;
    switch (kind) {
      case OpKind::Or:
        add(name, role, r, with(cnt, {{eta.var, 1.0}}), Sense::GreaterEqual, 1.0);
        break;
      case OpKind::And:
        add(name, role, r, with(cnt, {{eta.var, -mp}}), Sense::LessEqual, 0.0);
        break;
      case OpKind::AtLeast:
        add(name, role, r, with(cnt, {{eta.var, mp}, {kv, -1.0}}), Sense::GreaterEqual, 0.0);
        break;
      case OpKind::AtMost:
        add(name, role, r, with(cnt, {{eta.var, -mp}, {kv, -1.0}}), Sense::LessEqual, 0.0);
        break;
      case OpKind::Choose:
        add(name + "_a", role, r, with(cnt, {{eta.var, mp}, {kv, -1.0}}),
            Sense::GreaterEqual, 0.0);
        add(name + "_b", role, r, with(cnt, {{eta.var, -mp}, {kv, -1.0}}),
            Sense::LessEqual, 0.0);
        break;
    }
  }
  for (std::size_t r = 0; r < neg_rows.size(); ++r) {
    const auto cnt = count_terms(neg_rows[r]);
    const std::size_t eta = model.eta_n(r);
    const std::string name = "neg_" + std::to_string(r);
    const auto role = ConstraintRole::NegativeSample;
    switch (kind) {
      case OpKind::Or:
        add(name, role, r, with(cnt, {{eta, -mp}}), Sense::LessEqual, 0.0);
        break;
      case OpKind::And:
        add(name, role, r, with(cnt, {{eta, 1.0}}), Sense::GreaterEqual, 1.0);
        break;
      case OpKind::AtLeast:
        add(name, role, r, with(cnt, {{eta, -mp1}, {kv, -1.0}}), Sense::LessEqual, -1.0);
        break;
      case OpKind::AtMost:
        add(name, role, r, with(cnt, {{eta, mp1}, {kv, -1.0}}), Sense::GreaterEqual, 1.0);
        break;
      case OpKind::Choose: {
        const std::size_t q = model.q(r);
        add(name + "_a", role, r, with(cnt, {{eta, mp1}, {q, mp1}, {kv, -1.0}}),
            Sense::GreaterEqual, 1.0);
        add(name + "_b", role, r, with(cnt, {{eta, -mp1}, {q, mp1}, {kv, -1.0}}),
            Sense::LessEqual, mp);
        break;
      }
    }
  }

  std::vector<LinearTerm> all_literals;
  for (std::size_t i = 0; i < m; ++i) all_literals.push_back({model.b(i), 1.0});
  for (std::size_t i = 0; i < m; ++i) all_literals.push_back({model.nb(i), 1.0});
  add("card", ConstraintRole::Cardinality, 0, all_literals, Sense::LessEqual, mp);
  if (param) {
    std::vector<LinearTerm> link{{kv, 1.0}};
    for (const auto& t : all_literals) link.push_back({t.var, -1.0});
    add("klink", ConstraintRole::KLink, 0, std::move(link), Sense::LessEqual, 0.0);
  }
  if (options.min_literals > 0) {
    add("minlit", ConstraintRole::MinLiterals, 0, all_literals, Sense::GreaterEqual,
        static_cast<double>(options.min_literals));
  }
  return model;
}

namespace {

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Prefer the short form when it round-trips.
  char shortbuf[64];
  std::snprintf(shortbuf, sizeof(shortbuf), "%.10g", v);
  double back = 0.0;
  std::from_chars(shortbuf, shortbuf + std::char_traits<char>::length(shortbuf), back);
  return back == v ? shortbuf : buf;
}

void write_expression(std::ostringstream& out, const IlpModel& model,
                      const std::vector<LinearTerm>& terms) {
  std::size_t on_line = 0;
  bool first = true;
  for (const auto& t : terms) {
    if (t.coef == 0.0) continue;
    if (on_line == 8) {
      out << "\n   ";
      on_line = 0;
    }
    const double mag = std::abs(t.coef);
    if (first) {
      if (t.coef < 0) out << " -";
    } else {
      out << (t.coef < 0 ? " -" : " +");
    }
    out << ' ';
    if (mag != 1.0) out << number(mag) << ' ';
    out << model.vars[t.var].name;
    first = false;
    ++on_line;
  }
  if (first) out << " 0 " << model.vars.front().name;
}

const char* sense_text(Sense s) {
  switch (s) {
    case Sense::LessEqual:
      return "<=";
    case Sense::GreaterEqual:
      return ">=";
    case Sense::Equal:
      return "=";
  }
  return "?";
}

}  // namespace

std::string export_lp(const IlpModel& model) {
  std::ostringstream out;
  out << "\\ boolrule depth-one model kind=" << op_name(model.kind)
      << " features=" << model.num_features
      << " positives=" << model.num_positive
      << " negatives=" << model.num_negative
      << " max_literals=" << model.max_literals
      << " min_literals=" << model.min_literals
      << " lambda=" << number(model.lambda)
      << " wP=" << number(model.weights.positive)
      << " wN=" << number(model.weights.negative) << "\n";
  out << "Minimize\n obj:";
  write_expression(out, model, model.objective);
  out << "\nSubject To\n";
  for (const auto& c : model.constraints) {
    out << ' ' << c.name << ':';
    write_expression(out, model, c.terms);
    out << ' ' << sense_text(c.sense) << ' ' << number(c.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : model.vars) {
    if (v.is_integer()) out << ' ' << v.lower << " <= " << v.name << " <= " << v.upper << '\n';
  }
  out << "Generals\n";
  for (const auto& v : model.vars) {
    if (v.is_integer()) out << ' ' << v.name << '\n';
  }
  out << "Binaries\n";
  std::size_t on_line = 0;
  for (const auto& v : model.vars) {
    if (v.is_integer()) continue;
    out << ' ' << v.name;
    if (++on_line == 16) {
      out << '\n';
      on_line = 0;
    }
  }
  if (on_line != 0) out << '\n';
  out << "End\n";
  return out.str();
}

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("LP reader: bad number '" + s + "'");
  }
  return v;
}

std::pair<VarRole, std::size_t> role_from_name(const std::string& name) {
  if (name == "k") return {VarRole::K, 0};
  const auto us = name.find('_');
  if (us == std::string::npos) throw DataError("LP reader: unknown variable '" + name + "'");
  const std::string prefix = name.substr(0, us);
  const std::size_t index = static_cast<std::size_t>(parse_double(name.substr(us + 1)));
  if (prefix == "b") return {VarRole::B, index};
  if (prefix == "nb") return {VarRole::NB, index};
  if (prefix == "etaP") return {VarRole::EtaP, index};
  if (prefix == "etaN") return {VarRole::EtaN, index};
  if (prefix == "q") return {VarRole::Q, index};
  throw DataError("LP reader: unknown variable '" + name + "'");
}

}  // namespace

IlpModel parse_lp(std::string_view text) {
  IlpModel model;
  std::map<std::string, std::string> header;
  std::map<std::string, std::string> sections;
  std::string current;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("\\", 0) == 0) {
      for (const auto& tok : tokenize(line.substr(1))) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos) header[tok.substr(0, eq)] = tok.substr(eq + 1);
      }
      continue;
    }
    if (line == "Minimize" || line == "Subject To" || line == "Bounds" ||
        line == "Generals" || line == "Binaries" || line == "End") {
      current = line;
      continue;
    }
    sections[current] += line + "\n";
  }
  for (const char* key : {"kind", "features", "positives", "negatives",
                          "max_literals", "min_literals", "lambda", "wP", "wN"}) {
    if (!header.count(key)) throw DataError(std::string("LP reader: header lacks ") + key);
  }
  model.kind = parse_op_kind(header["kind"]);
  model.num_features = static_cast<std::size_t>(parse_double(header["features"]));
  model.num_positive = static_cast<std::size_t>(parse_double(header["positives"]));
  model.num_negative = static_cast<std::size_t>(parse_double(header["negatives"]));
  model.max_literals = static_cast<std::size_t>(parse_double(header["max_literals"]));
  model.min_literals = static_cast<std::size_t>(parse_double(header["min_literals"]));
  model.lambda = parse_double(header["lambda"]);
  model.weights = {parse_double(header["wP"]), parse_double(header["wN"])};

  // Variables in canonical order: the binaries as listed, then k.
  std::map<std::string, std::size_t> index;
  for (const auto& name : tokenize(sections["Binaries"])) {
    auto [role, i] = role_from_name(name);
    index[name] = model.vars.size();
    model.vars.push_back({name, role, i, 0, 1});
  }
  for (const auto& name : tokenize(sections["Generals"])) {
    auto [role, i] = role_from_name(name);
    index[name] = model.vars.size();
    model.vars.push_back({name, role, i, 0, 1});
  }
  {
    const auto toks = tokenize(sections["Bounds"]);
    for (std::size_t t = 0; t + 4 < toks.size(); t += 5) {
      auto& v = model.vars.at(index.at(toks[t + 2]));
      v.lower = static_cast<int>(parse_double(toks[t]));
      v.upper = static_cast<int>(parse_double(toks[t + 4]));
    }
  }

  // Parses "[-] [coef] name (+|- [coef] name)*" from tokens[pos..end).
  const auto parse_terms = [&](const std::vector<std::string>& toks,
                               std::size_t begin, std::size_t end) {
    std::vector<LinearTerm> terms;
    double sign = 1.0;
    double coef = 1.0;
    for (std::size_t t = begin; t < end; ++t) {
      const std::string& tok = toks[t];
      if (tok == "+" || tok == "-") {
        sign = tok == "-" ? -1.0 : 1.0;
        coef = 1.0;
      } else if (index.count(tok)) {
        if (coef != 0.0) terms.push_back({index[tok], sign * coef});
        sign = 1.0;
        coef = 1.0;
      } else {
        coef = parse_double(tok);
      }
    }
    return terms;
  };

  {
    const auto toks = tokenize(sections["Minimize"]);
    if (toks.empty() || toks[0] != "obj:") throw DataError("LP reader: missing objective");
    model.objective = parse_terms(toks, 1, toks.size());
  }
  const auto toks = tokenize(sections["Subject To"]);
  std::size_t t = 0;
  while (t < toks.size()) {
    if (toks[t].back() != ':') throw DataError("LP reader: expected constraint name");
    IlpConstraint c;
    c.name = toks[t].substr(0, toks[t].size() - 1);
    std::size_t s = t + 1;
    while (s < toks.size() && toks[s] != "<=" && toks[s] != ">=" && toks[s] != "=") ++s;
    if (s + 1 >= toks.size()) throw DataError("LP reader: truncated constraint " + c.name);
    c.terms = parse_terms(toks, t + 1, s);
    c.sense = toks[s] == "<=" ? Sense::LessEqual
              : toks[s] == ">=" ? Sense::GreaterEqual
                                : Sense::Equal;
    c.rhs = parse_double(toks[s + 1]);
    if (c.name.rfind("pos_", 0) == 0 || c.name.rfind("neg_", 0) == 0) {
      c.role = c.name[0] == 'p' ? ConstraintRole::PositiveSample
                                : ConstraintRole::NegativeSample;
      const std::string rest = c.name.substr(4);
      c.sample = static_cast<std::size_t>(parse_double(rest.substr(0, rest.find('_'))));
    } else if (c.name == "card") {
      c.role = ConstraintRole::Cardinality;
    } else if (c.name == "klink") {
      c.role = ConstraintRole::KLink;
    } else if (c.name == "minlit") {
      c.role = ConstraintRole::MinLiterals;
    } else {
      throw DataError("LP reader: unknown constraint " + c.name);
    }
    model.constraints.push_back(std::move(c));
    t = s + 2;
  }
  return model;
}

IlpCheckResult exhaustive_ilp_optimum(const IlpModel& model) {
  const std::size_t m = model.num_features;
  if (m > 8) throw SolverLimitError("exhaustive ILP check limited to 8 features");
  const std::size_t nv = model.vars.size();

  // Variables owned by a single sample (eta and q) are optimized per sample;
  // the rest are enumerated.
  std::vector<bool> is_local(nv, false);
  for (std::size_t v = 0; v < nv; ++v) {
    const VarRole r = model.vars[v].role;
    is_local[v] = r == VarRole::EtaP || r == VarRole::EtaN || r == VarRole::Q;
  }
  std::vector<double> obj(nv, 0.0);
  for (const auto& t : model.objective) obj[t.var] += t.coef;

  struct Group {
    std::vector<std::size_t> locals;
    std::vector<const IlpConstraint*> rows;
  };
  std::map<std::pair<int, std::size_t>, Group> by_sample;
  std::vector<const IlpConstraint*> global_rows;
  for (const auto& c : model.constraints) {
    const bool touches_local =
        std::any_of(c.terms.begin(), c.terms.end(),
                    [&](const LinearTerm& t) { return is_local[t.var]; });
    if (!touches_local) {
      global_rows.push_back(&c);
      continue;
    }
    Group& g = by_sample[{c.role == ConstraintRole::PositiveSample ? 0 : 1, c.sample}];
    g.rows.push_back(&c);
    for (const auto& t : c.terms) {
      if (is_local[t.var] &&
          std::find(g.locals.begin(), g.locals.end(), t.var) == g.locals.end()) {
        g.locals.push_back(t.var);
      }
    }
  }
  // Local variables that appear in no constraint sit at their cheapest value.
  std::vector<bool> seen(nv, false);
  for (auto& [key, g] : by_sample) {
    for (std::size_t v : g.locals) seen[v] = true;
  }

  std::vector<std::size_t> outer;
  for (std::size_t v = 0; v < nv; ++v) {
    if (!is_local[v]) outer.push_back(v);
  }

  IlpCheckResult best;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<int> x(nv, 0);
  for (std::size_t v = 0; v < nv; ++v) {
    if (is_local[v] && !seen[v]) x[v] = obj[v] < 0 ? model.vars[v].upper : model.vars[v].lower;
  }
  double free_cost = 0.0;
  for (std::size_t v = 0; v < nv; ++v) {
    if (is_local[v] && !seen[v]) free_cost += obj[v] * x[v];
  }

  // Odometer over the outer variables.
  for (std::size_t v : outer) x[v] = model.vars[v].lower;
  while (true) {
    bool ok = true;
    for (const auto* c : global_rows) {
      if (!satisfied(dot(c->terms, x), c->sense, c->rhs)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      double total = free_cost;
      for (std::size_t v : outer) total += obj[v] * x[v];
      for (auto& [key, g] : by_sample) {
        double cheapest = std::numeric_limits<double>::infinity();
        std::uint32_t best_mask = 0;
        const std::uint32_t combos = 1U << g.locals.size();
        for (std::uint32_t mask = 0; mask < combos; ++mask) {
          double cost = 0.0;
          for (std::size_t l = 0; l < g.locals.size(); ++l) {
            x[g.locals[l]] = static_cast<int>((mask >> l) & 1U);
            cost += obj[g.locals[l]] * x[g.locals[l]];
          }
          if (cost >= cheapest) continue;
          bool feasible = true;
          for (const auto* c : g.rows) {
            if (!satisfied(dot(c->terms, x), c->sense, c->rhs)) {
              feasible = false;
              break;
            }
          }
          if (feasible) {
            cheapest = cost;
            best_mask = mask;
          }
        }
        for (std::size_t l = 0; l < g.locals.size(); ++l) {
          x[g.locals[l]] = static_cast<int>((best_mask >> l) & 1U);
        }
        total += cheapest;
        if (!std::isfinite(total)) break;
      }
      if (total < best.objective - 1e-12) {
        best.objective = total;
        best.assignment = x;
        best.feasible = true;
      }
    }
    std::size_t p = 0;
    while (p < outer.size()) {
      const std::size_t v = outer[p];
      if (x[v] < model.vars[v].upper) {
        ++x[v];
        break;
      }
      x[v] = model.vars[v].lower;
      ++p;
    }
    if (p == outer.size()) break;
  }
  return best;
}

}  // namespace boolrule
